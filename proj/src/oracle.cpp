#include "fq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

SubtrajPoints subtrajectory_vertices(const Trajectory& traj, TrajectoryPos u,
                                     TrajectoryPos v) {
  const std::size_t n = traj.size();
  u = canonical_pos(u, n);
  v = canonical_pos(v, n);
  const double ku = u.key();
  const double kv = v.key();
  if (ku > kv) throw std::invalid_argument("subtrajectory: u > v");

  SubtrajPoints out;
  if (n == 1) {
    out.pts = {traj[0]};
    out.ids = {0};
    out.first_vertex = out.last_vertex = 0;
    return out;
  }

  const Point pu = point_at(traj, u);
  const Point pv = point_at(traj, v);

  // Vertices k with ku <= k <= kv. Vertex k has key exactly k.
  int k_lo = static_cast<int>(std::ceil(ku));
  int k_hi = static_cast<int>(std::floor(kv));
  k_hi = std::min<int>(k_hi, static_cast<int>(n) - 1);

  int uvtx = -1, vvtx = -1;
  pos_at_vertex(u, n, uvtx);
  pos_at_vertex(v, n, vvtx);

  out.pts.push_back(pu);
  out.ids.push_back(uvtx >= 0 ? uvtx : kWitnessU);
  for (int k = k_lo; k <= k_hi; ++k) {
    if (static_cast<double>(k) == ku) continue;  // already emitted as u
    out.pts.push_back(traj[k]);
    out.ids.push_back(k);
  }
  // v, unless it coincides with the last emitted vertex position.
  if (kv > ku && static_cast<double>(k_hi) != kv) {
    out.pts.push_back(pv);
    out.ids.push_back(vvtx >= 0 ? vvtx : kWitnessV);
  }

  if (k_lo <= k_hi) {
    out.first_vertex = k_lo;
    out.last_vertex = k_hi;
  }
  return out;
}

namespace {

// Hoisted per-instance state for repeated formula evaluations at different
// segment placements: the point list and the backward-pair index list.
struct FormulaContext {
  std::vector<Point> pts;
  std::vector<int> ids;
  std::vector<std::pair<int, int>> pairs;  // i < j, pts[i].x >= pts[j].x

  explicit FormulaContext(SubtrajPoints sp) : pts(std::move(sp.pts)), ids(std::move(sp.ids)) {
    const int m = static_cast<int>(pts.size());
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (pts[i].x >= pts[j].x) pairs.push_back({i, j});
  }

  double value(const HorizontalSegment& seg) const {
    const Point p = seg.p();
    const Point q = seg.q();
    double best = std::max(dist(pts.front(), p), dist(pts.back(), q));
    for (const Point& r : pts) {
      if (r.x <= seg.x0) best = std::max(best, dist(p, r));
      if (r.x >= seg.x1) best = std::max(best, dist(q, r));
      best = std::max(best, std::abs(seg.y - r.y));
    }
    for (const auto& [i, j] : pairs)
      best = std::max(best, backward_pair_distance(pts[i], pts[j], seg.y));
    return best;
  }

  FrechetBreakdown breakdown(const HorizontalSegment& seg) const {
    const Point p = seg.p();
    const Point q = seg.q();
    std::array<TieCollector, kNumTerms> col{
        TieCollector(kTieTol), TieCollector(kTieTol), TieCollector(kTieTol),
        TieCollector(kTieTol), TieCollector(kTieTol), TieCollector(kTieTol)};

    col[0].offer(dist(pts.front(), p),
                 {Term::UP, pts.front(), {}, ids.front(), kWitnessNone});
    col[1].offer(dist(pts.back(), q),
                 {Term::VQ, pts.back(), {}, ids.back(), kWitnessNone});
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const Point& r = pts[k];
      if (r.x <= seg.x0)
        col[2].offer(dist(p, r), {Term::HL, r, {}, ids[k], kWitnessNone});
      if (r.x >= seg.x1)
        col[3].offer(dist(q, r), {Term::HR, r, {}, ids[k], kWitnessNone});
      col[4].offer(std::abs(seg.y - r.y), {Term::HM, r, {}, ids[k], kWitnessNone});
    }
    for (const auto& [i, j] : pairs)
      col[5].offer(backward_pair_distance(pts[i], pts[j], seg.y),
                   {Term::BWD, pts[i], pts[j], ids[i], ids[j]});

    FrechetBreakdown out;
    for (int t = 0; t < kNumTerms; ++t)
      out.term_values[t] = col[t].empty() ? 0.0 : col[t].best();
    out.value = *std::max_element(out.term_values.begin(), out.term_values.end());
    for (int t = 0; t < kNumTerms; ++t) {
      if (col[t].empty() || col[t].best() < out.value - kTieTol) continue;
      for (const auto& w : col[t].witnesses()) out.attaining.push_back(w);
    }
    return out;
  }
};

}  // namespace

FrechetBreakdown frechet_formula_scan(const Trajectory& traj, TrajectoryPos u,
                                      TrajectoryPos v, const HorizontalSegment& seg) {
  return FormulaContext(subtrajectory_vertices(traj, u, v)).breakdown(seg);
}

// ---------------------------------------------------------------------------
// Free-space diagram oracle.

bool freespace_decision(const std::vector<Point>& poly, const HorizontalSegment& seg,
                        double eps) {
  const std::size_t m = poly.size();
  const Point p = seg.p();
  const Point q = seg.q();
  if (m == 0) throw std::invalid_argument("freespace_decision: empty polyline");
  if (m == 1) return std::max(dist(poly[0], p), dist(poly[0], q)) <= eps;
  const double delta = seg.length();
  if (delta == 0.0) {
    for (const Point& r : poly)
      if (dist(r, p) > eps) return false;
    return true;
  }

  // Free interval of segment parameters t for vertex r: points of the segment
  // within eps of r.
  auto free_interval = [&](const Point& r, double& lo, double& hi) {
    const double dy = r.y - seg.y;
    const double rad2 = eps * eps - dy * dy;
    if (rad2 < 0.0) {
      lo = 1.0;
      hi = 0.0;
      return;
    }
    const double rad = std::sqrt(rad2);
    const double c = r.x - seg.x0;
    lo = std::max(0.0, (c - rad) / delta);
    hi = std::min(1.0, (c + rad) / delta);
  };

  // Reachable t-interval on the vertical diagram edge at each vertex. The
  // free region inside a cell is convex, so a passage exists between any two
  // free boundary points with non-decreasing t.
  double lo, hi;
  free_interval(poly[0], lo, hi);
  if (lo > 0.0 || lo > hi) return false;  // start corner (0,0) must be free
  double reach_lo = 0.0, reach_hi = hi;
  for (std::size_t i = 1; i < m; ++i) {
    if (reach_lo > reach_hi) return false;
    free_interval(poly[i], lo, hi);
    reach_lo = std::max(lo, reach_lo);
    reach_hi = hi;
  }
  return reach_lo <= reach_hi && reach_hi >= 1.0 - 1e-12;
}

double frechet_freespace(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                         const HorizontalSegment& seg) {
  const SubtrajPoints sp = subtrajectory_vertices(traj, u, v);
  const auto& P = sp.pts;
  const std::size_t m = P.size();
  const Point p = seg.p();
  const Point q = seg.q();

  if (m == 1) return std::max(dist(P[0], p), dist(P[0], q));
  if (seg.length() == 0.0) {
    double best = 0.0;
    for (const Point& r : P) best = std::max(best, dist(r, p));
    return best;
  }

  // Classical critical values: endpoint distances, vertex-segment and
  // vertex-vertex distances, segment-endpoint to polyline-edge distances,
  // and monotonicity-opening events from perpendicular bisectors.
  std::vector<double> vals;
  vals.push_back(dist(P.front(), p));
  vals.push_back(dist(P.back(), q));
  double upper = 0.0;
  for (const Point& r : P) {
    const double dp = dist(r, p);
    const double dq = dist(r, q);
    vals.push_back(dp);
    vals.push_back(dq);
    vals.push_back(dist(r, project_onto_segment(r, seg)));
    upper = std::max(upper, std::max(dp, dq));
  }
  vals.push_back(upper);  // always feasible: traverse P at p, then sweep pq
  for (std::size_t e = 0; e + 1 < m; ++e) {
    vals.push_back(point_segment_dist(p, P[e], P[e + 1]));
    vals.push_back(point_segment_dist(q, P[e], P[e + 1]));
    // Bisector of (p, q) is the vertical line through the segment midpoint;
    // where an edge crosses it, both segment endpoints are equidistant.
    const double xm = 0.5 * (seg.x0 + seg.x1);
    const double ax = P[e].x, bx = P[e + 1].x;
    if ((ax - xm) * (bx - xm) <= 0.0 && ax != bx) {
      const double t = (xm - ax) / (bx - ax);
      const Point z{xm, P[e].y + t * (P[e + 1].y - P[e].y)};
      vals.push_back(dist(z, p));
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (auto bx = bisector_x_on_line(P[i], P[j], seg.y)) {
        const Point z{*bx, seg.y};
        vals.push_back(std::max(dist(P[i], z), dist(P[j], z)));
      }

  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end(),
                         [](double a, double b) { return b - a <= 1e-12 * (1.0 + b); }),
             vals.end());

  auto feasible = [&](double eps) {
    return freespace_decision(P, seg, eps + 1e-11 * (1.0 + eps));
  };
  std::size_t lo = 0, hi = vals.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (feasible(vals[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return vals[lo];
}

// ---------------------------------------------------------------------------
// Placement oracles.

namespace {

struct BBox {
  double min_x = kInf, max_x = -kInf, min_y = kInf, max_y = -kInf;
  void add(const Point& r) {
    min_x = std::min(min_x, r.x);
    max_x = std::max(max_x, r.x);
    min_y = std::min(min_y, r.y);
    max_y = std::max(max_y, r.y);
  }
  double diag() const { return dist({min_x, min_y}, {max_x, max_y}); }
};

BBox subtraj_bbox(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v) {
  BBox bb;
  for (const Point& r : subtrajectory_vertices(traj, u, v).pts) bb.add(r);
  return bb;
}

struct GoldenResult {
  double x = 0.0;
  double f = kInf;
};

// Golden-section minimization of a convex objective; returns the best point
// actually evaluated. Plateau ties move the bracket left, so repeated runs
// are deterministic.
template <class F>
GoldenResult golden_min(F&& f, double a, double b, double tol) {
  constexpr double invphi = 0.6180339887498949;
  GoldenResult best;
  auto eval = [&](double x) {
    const double fx = f(x);
    if (fx < best.f) best = {x, fx};
    return fx;
  };
  eval(a);
  eval(b);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval(d);
    }
  }
  return best;
}

}  // namespace

Bracket vertical_bracket(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                         double x1, double x2) {
  const BBox bb = subtraj_bbox(traj, u, v);
  const double D = std::max(bb.diag(), std::abs(x2 - x1)) + 1.0;
  return {bb.min_y - D, bb.max_y + D};
}

Bracket horizontal_bracket(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                           double L) {
  const BBox bb = subtraj_bbox(traj, u, v);
  const double D = std::max(bb.diag(), L) + 1.0;
  return {bb.min_x - L - D, bb.max_x + D};
}

VerticalOracleResult brute_force_vertical_opt(const Trajectory& traj, TrajectoryPos u,
                                              TrajectoryPos v, double x1, double x2) {
  if (!(x1 <= x2)) throw std::invalid_argument("vertical opt: x1 > x2");
  const FormulaContext ctx(subtrajectory_vertices(traj, u, v));
  const Bracket br = vertical_bracket(traj, u, v, x1, x2);
  const double tol = kGoldenTol * (1.0 + br.hi - br.lo);
  const GoldenResult r = golden_min(
      [&](double y) { return ctx.value(HorizontalSegment(x1, x2, y)); }, br.lo, br.hi,
      tol);
  return {r.x, r.f};
}

PlacementOracleResult brute_force_placement_opt(const Trajectory& traj, TrajectoryPos u,
                                                TrajectoryPos v, double L) {
  if (!(L >= 0.0)) throw std::invalid_argument("placement opt: negative length");
  const FormulaContext ctx(subtrajectory_vertices(traj, u, v));
  const Bracket hbr = horizontal_bracket(traj, u, v, L);
  const Bracket vbr = vertical_bracket(traj, u, v, 0.0, L);
  const double vtol = kGoldenTol * (1.0 + vbr.hi - vbr.lo);

  double best_y = 0.0;
  auto vert_best = [&](double x1) {
    const GoldenResult r = golden_min(
        [&](double y) { return ctx.value(HorizontalSegment(x1, x1 + L, y)); }, vbr.lo,
        vbr.hi, vtol);
    best_y = r.x;
    return r.f;
  };

  const double htol = kGoldenTol * (1.0 + hbr.hi - hbr.lo);
  GoldenResult outer = golden_min(vert_best, hbr.lo, hbr.hi, htol);
  PlacementOracleResult res{outer.x, 0.0, outer.f};
  res.value = vert_best(res.x1_star);
  res.y_star = best_y;

  // Local grid polish around the golden-section winner; keeps the result
  // stable on plateaus where the section search tie-breaks arbitrarily.
  double half = std::max(1e-6 * (1.0 + std::abs(res.x1_star)), 4.0 * htol);
  for (int round = 0; round < 2; ++round) {
    const int steps = 8;
    for (int k = -steps; k <= steps; ++k) {
      const double x1 = res.x1_star + half * k / steps;
      const double f = vert_best(x1);
      if (f < res.value) res = {x1, best_y, f};
    }
    half *= 0.1;
  }
  // Re-evaluate to restore the matching y for the final x1.
  res.value = vert_best(res.x1_star);
  res.y_star = best_y;
  return res;
}

}  // namespace fq
