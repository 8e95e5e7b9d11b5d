#include "fq/translation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fq/constants.hpp"
#include "fq/oracle.hpp"
#include "fq/query.hpp"

namespace fq {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Angular slack when comparing covering arcs against a half circle.
constexpr double kArcTol = 1e-9;

double normalize_angle(double a) {
  const double two_pi = 2.0 * kPi;
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  return a;
}

// Inward normals at p of the active constraints: one unit direction per disk
// (toward its center) and one vertical direction per half-plane.
std::vector<double> constraint_angles(const Point& p, const std::vector<Point>& centers,
                                      bool half_above, bool half_below) {
  std::vector<double> ang;
  ang.reserve(centers.size() + 2);
  for (const Point& c : centers) {
    const double dx = c.x - p.x;
    const double dy = c.y - p.y;
    if (dx * dx + dy * dy == 0.0) continue;  // disk centered at p: no constraint at p
    ang.push_back(normalize_angle(std::atan2(dy, dx)));
  }
  if (half_above) ang.push_back(0.5 * kPi);
  if (half_below) ang.push_back(1.5 * kPi);
  return ang;
}

}  // namespace

const char* vertical_decision_name(VerticalDecision d) {
  switch (d) {
    case VerticalDecision::Up: return "up";
    case VerticalDecision::Down: return "down";
    case VerticalDecision::Stop: return "stop";
  }
  return "?";
}

const char* horizontal_decision_name(HorizontalDecision d) {
  switch (d) {
    case HorizontalDecision::Left: return "left";
    case HorizontalDecision::Right: return "right";
    case HorizontalDecision::Stop: return "stop";
  }
  return "?";
}

// A point x near p lies in every open constraint iff its direction from p has
// positive dot product with every inward normal; such a direction exists iff
// the normals fit in an open half circle, i.e. some circular gap between
// consecutive normals exceeds pi.
bool region_empty(const Point& p, double radius, const std::vector<Point>& centers,
                  bool half_above, bool half_below) {
  (void)radius;
  std::vector<double> ang = constraint_angles(p, centers, half_above, half_below);
  if (ang.empty()) return false;
  std::sort(ang.begin(), ang.end());
  double max_gap = 2.0 * kPi - (ang.back() - ang.front());
  for (std::size_t i = 1; i < ang.size(); ++i)
    max_gap = std::max(max_gap, ang[i] - ang[i - 1]);
  return max_gap <= kPi + kArcTol;
}

bool region_empty_sampled(const Point& p, double radius, const std::vector<Point>& centers,
                          bool half_above, bool half_below, int samples) {
  if (centers.empty() && !half_above && !half_below) return false;
  const double r0 = std::max(radius, 1e-12);
  const double fractions[] = {1e-4, 1e-3, 1e-2, 0.1, 0.3, 1.0};
  for (int i = 0; i < samples; ++i) {
    const double phi = 2.0 * kPi * (static_cast<double>(i) / samples);
    const double cs = std::cos(phi), sn = std::sin(phi);
    for (double f : fractions) {
      const Point x{p.x + f * r0 * cs, p.y + f * r0 * sn};
      bool ok = true;
      for (const Point& c : centers) {
        if (dist(x, c) >= radius) {
          ok = false;
          break;
        }
      }
      if (ok && half_above && !(x.y > p.y)) ok = false;
      if (ok && half_below && !(x.y < p.y)) ok = false;
      if (ok) return false;
    }
  }
  return true;
}

std::array<int, 3> reduce_disks_three(const Point& p, double radius,
                                      const std::vector<Point>& centers) {
  (void)radius;
  // Minimal covering arc of the normals seen so far, kept as a start angle, a
  // width, and the indices of the disks sitting at its two ends. Inserting a
  // disk extends the arc on the cheaper side; the moment the arc reaches a
  // half circle the intersection is empty, and the two previous end disks
  // together with the inserted one form an empty triple (their own covering
  // arc is the same extended arc).
  double start = 0.0, width = -1.0;
  int lo_idx = -1, hi_idx = -1;
  for (int i = 0; i < static_cast<int>(centers.size()); ++i) {
    const double dx = centers[i].x - p.x;
    const double dy = centers[i].y - p.y;
    if (dx * dx + dy * dy == 0.0) continue;
    const double th = normalize_angle(std::atan2(dy, dx));
    if (width < 0.0) {
      start = th;
      width = 0.0;
      lo_idx = hi_idx = i;
      continue;
    }
    const double t = normalize_angle(th - start);
    if (t <= width) continue;
    const double forward = t;                   // arc becomes [start, th]
    const double backward = width + 2.0 * kPi - t;  // arc becomes [th, start+width]
    const double grown = std::min(forward, backward);
    if (grown >= kPi - kArcTol) return {lo_idx, hi_idx, i};
    if (forward <= backward) {
      width = forward;
      hi_idx = i;
    } else {
      start = th;
      width = backward;
      lo_idx = i;
    }
  }
  return {-1, -1, -1};
}

namespace {

// Direction implied by the attaining witnesses at height y_c: every witness
// pulls the line toward its own height (backward pairs toward their
// midpoint). A witness at the current height pins it, and opposite pulls
// cancel; both mean no strictly improving vertical move exists.
VerticalDecision direction_from(const FrechetBreakdown& bd, double y_c) {
  if (bd.value <= kTol) return VerticalDecision::Stop;
  const double on_tol = kTol * (1.0 + std::abs(y_c));
  bool up = false, down = false;
  for (const Witness& w : bd.attaining) {
    const double wy = (w.term == Term::BWD) ? 0.5 * (w.a.y + w.b.y) : w.a.y;
    const double dy = wy - y_c;
    if (std::abs(dy) <= on_tol) return VerticalDecision::Stop;
    (dy > 0.0 ? up : down) = true;
  }
  if (up && down) return VerticalDecision::Stop;
  return up ? VerticalDecision::Up : VerticalDecision::Down;
}

}  // namespace

VerticalDecision decide_vertical(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                                 double x1, double x2, double y_c,
                                 const RangeIndex& idx) {
  if (!(x1 <= x2)) throw std::invalid_argument("decide_vertical: x1 > x2");
  QueryOptions qo;
  qo.want_split = false;
  const QueryResult r = frechet_query(traj, u, v, HorizontalSegment(x1, x2, y_c), idx, qo);
  return direction_from(r.breakdown, y_c);
}

VerticalOpt optimize_vertical(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                              double x1, double x2, const RangeIndex& idx) {
  if (!(x1 <= x2)) throw std::invalid_argument("optimize_vertical: x1 > x2");
  const Bracket br = vertical_bracket(traj, u, v, x1, x2);
  double lo = br.lo, hi = br.hi;
  const double eps_y = 1e-10 * (1.0 + (hi - lo));
  QueryOptions qo;
  qo.want_split = false;
  VerticalOpt best;
  bool have = false;
  auto eval = [&](double y) {
    const QueryResult r = frechet_query(traj, u, v, HorizontalSegment(x1, x2, y), idx, qo);
    if (!have || r.breakdown.value < best.value) {
      have = true;
      best.y_star = y;
      best.value = r.breakdown.value;
      best.breakdown = r.breakdown;
    }
    return direction_from(r.breakdown, y);
  };
  int steps = 0;
  while (hi - lo > eps_y && steps < kMaxBisectSteps) {
    const double mid = 0.5 * (lo + hi);
    ++steps;
    const VerticalDecision d = eval(mid);
    if (d == VerticalDecision::Stop) break;
    if (d == VerticalDecision::Up)
      lo = mid;
    else
      hi = mid;
  }
  if (!have) eval(0.5 * (lo + hi));
  best.steps = steps;
  return best;
}

std::vector<TermClass> classify_terms(const FrechetBreakdown& bd,
                                      const HorizontalSegment& l_c, double L) {
  const double d = bd.value;
  const double on_tol = 1e-7 * (1.0 + d);
  std::vector<TermClass> out;
  out.reserve(bd.attaining.size());
  for (const Witness& w : bd.attaining) {
    TermClass tc;
    tc.term = w.term;
    switch (w.term) {
      case Term::UP:
      case Term::HL:
        tc.kind = TermClass::C1Disk;
        tc.center = w.a;
        tc.radius = d;
        break;
      case Term::VQ:
      case Term::HR:
        // Anchored at the right endpoint; pull the center into the left
        // endpoint's frame.
        tc.kind = TermClass::C1Disk;
        tc.center = Point{w.a.x - L, w.a.y};
        tc.radius = d;
        break;
      case Term::HM: {
        tc.kind = TermClass::C2HalfPlane;
        const double dy = w.a.y - l_c.y;
        tc.above = dy > 0.0;
        tc.on_line = std::abs(dy) <= on_tol;
        break;
      }
      case Term::BWD: {
        tc.kind = TermClass::C2HalfPlane;
        const double dy = 0.5 * (w.a.y + w.b.y) - l_c.y;
        tc.above = dy > 0.0;
        tc.on_line = std::abs(dy) <= on_tol;
        break;
      }
    }
    out.push_back(tc);
  }
  return out;
}

namespace {

// Side of p on which the closed constraint intersection lies, from the
// extreme-x points of the region: each circle's horizontal extremes, all
// pairwise circle crossings, circle crossings with the half-plane boundary
// line, and p itself.
HorizontalDecision region_side(const Point& p, double d, const std::vector<Point>& centers,
                               bool half_above, bool half_below) {
  std::vector<Point> cand;
  cand.push_back(p);
  for (const Point& c : centers) {
    cand.push_back(Point{c.x + d, c.y});
    cand.push_back(Point{c.x - d, c.y});
  }
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      const Point &a = centers[i], &b = centers[j];
      const double sep = dist(a, b);
      if (sep <= 1e-12 * (1.0 + d) || sep > 2.0 * d) continue;
      const double h = std::sqrt(std::max(0.0, d * d - 0.25 * sep * sep));
      const Point m{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
      const double nx = -(b.y - a.y) / sep, ny = (b.x - a.x) / sep;
      cand.push_back(Point{m.x + h * nx, m.y + h * ny});
      cand.push_back(Point{m.x - h * nx, m.y - h * ny});
    }
  }
  if (half_above || half_below) {
    for (const Point& c : centers) {
      const double dy = p.y - c.y;
      if (std::abs(dy) > d) continue;
      const double dx = std::sqrt(std::max(0.0, d * d - dy * dy));
      cand.push_back(Point{c.x + dx, p.y});
      cand.push_back(Point{c.x - dx, p.y});
    }
  }
  const double mem = 1e-9 * (1.0 + d);
  double min_x = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  for (const Point& x : cand) {
    bool inside = true;
    for (const Point& c : centers) {
      if (dist(x, c) > d + mem) {
        inside = false;
        break;
      }
    }
    if (inside && half_above && x.y < p.y - mem) inside = false;
    if (inside && half_below && x.y > p.y + mem) inside = false;
    if (!inside) continue;
    min_x = std::min(min_x, x.x);
    max_x = std::max(max_x, x.x);
  }
  const double tau = 1e-7 * (1.0 + d);
  const bool right = min_x >= p.x - tau;
  const bool left = max_x <= p.x + tau;
  if (right && !left) return HorizontalDecision::Right;
  if (left && !right) return HorizontalDecision::Left;
  return HorizontalDecision::Stop;
}

struct HorizontalProbe {
  HorizontalDecision dec = HorizontalDecision::Stop;
  VerticalOpt vert;
};

HorizontalProbe probe_horizontal(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                                 double L, double x1_c, const RangeIndex& idx) {
  HorizontalProbe pr;
  pr.vert = optimize_vertical(traj, u, v, x1_c, x1_c + L, idx);
  const double d = pr.vert.value;
  if (d <= kTol) return pr;  // already at distance ~0
  // Re-evaluate at the converged height with a tie band wide enough to pick
  // up every member of the balanced configuration that stopped the vertical
  // search, not just the single numerically largest term.
  const double c_tol = 1e-7 * (1.0 + d);
  const HorizontalSegment seg(x1_c, x1_c + L, pr.vert.y_star);
  QueryOptions qo;
  qo.want_split = false;
  qo.tie_tol = c_tol;
  const FrechetBreakdown bd = frechet_query(traj, u, v, seg, idx, qo).breakdown;
  const Point p{seg.x0, seg.y};
  std::vector<Point> centers;
  bool half_above = false, half_below = false;
  for (const TermClass& tc : classify_terms(bd, seg, L)) {
    if (tc.kind == TermClass::C1Disk) {
      centers.push_back(tc.center);
    } else {
      // A height-only term whose witness sits on the line is at its floor;
      // no rigid motion reduces it, so the placement cannot improve.
      if (tc.on_line) return pr;
      (tc.above ? half_above : half_below) = true;
    }
  }
  if (centers.empty()) return pr;  // half-planes alone never pick a side
  if (region_empty(p, d, centers, half_above, half_below)) return pr;
  pr.dec = region_side(p, d, centers, half_above, half_below);
  return pr;
}

}  // namespace

HorizontalDecision decide_horizontal(const Trajectory& traj, TrajectoryPos u,
                                     TrajectoryPos v, double L, double x1_c,
                                     const RangeIndex& idx) {
  if (!(L >= 0.0)) throw std::invalid_argument("decide_horizontal: negative length");
  return probe_horizontal(traj, u, v, L, x1_c, idx).dec;
}

PlacementOpt optimize_placement(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                                double L, const RangeIndex& idx) {
  if (!(L >= 0.0)) throw std::invalid_argument("optimize_placement: negative length");
  const Bracket br = horizontal_bracket(traj, u, v, L);
  double lo = br.lo, hi = br.hi;
  const double eps_x = 1e-10 * (1.0 + (hi - lo));
  PlacementOpt best;
  bool have = false;
  auto take = [&](double x1, const VerticalOpt& vo) {
    if (!have || vo.value < best.value) {
      have = true;
      best.x1_star = x1;
      best.y_star = vo.y_star;
      best.value = vo.value;
      best.breakdown = vo.breakdown;
    }
  };
  auto eval = [&](double x1) {
    const HorizontalProbe pr = probe_horizontal(traj, u, v, L, x1, idx);
    take(x1, pr.vert);
    return pr.dec;
  };
  int steps = 0;
  while (hi - lo > eps_x && steps < kMaxBisectSteps) {
    const double mid = 0.5 * (lo + hi);
    ++steps;
    const HorizontalDecision dec = eval(mid);
    if (dec == HorizontalDecision::Stop) break;
    if (dec == HorizontalDecision::Right)
      lo = mid;
    else
      hi = mid;
  }
  if (!have) eval(0.5 * (lo + hi));
  // The side decision turns conservative once the level set around the
  // optimum degenerates into a thin lens, so a Stop can fire while the
  // bracket is still wide. The height-optimized value is convex in x1;
  // polish it over the remaining bracket with a plain golden section.
  if (best.value > kTol && hi - lo > eps_x) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    const double gs_eps = 1e-9 * (1.0 + (b - a));
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    VerticalOpt vc = optimize_vertical(traj, u, v, c, c + L, idx);
    VerticalOpt vd = optimize_vertical(traj, u, v, d, d + L, idx);
    take(c, vc);
    take(d, vd);
    while (b - a > gs_eps) {
      if (vc.value <= vd.value) {
        b = d;
        d = c;
        vd = vc;
        c = b - kInvPhi * (b - a);
        vc = optimize_vertical(traj, u, v, c, c + L, idx);
        take(c, vc);
      } else {
        a = c;
        c = d;
        vc = vd;
        d = a + kInvPhi * (b - a);
        vd = optimize_vertical(traj, u, v, d, d + L, idx);
        take(d, vd);
      }
    }
  }
  best.steps = steps;
  return best;
}

}  // namespace fq
