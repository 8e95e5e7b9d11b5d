#include "fq/query.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fq {

VertexSpan vertex_span(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v) {
  u = canonical_pos(u, traj.size());
  v = canonical_pos(v, traj.size());
  if (u.key() > v.key()) throw std::invalid_argument("vertex_span: u > v");
  VertexSpan s;
  const int first = static_cast<int>(std::ceil(u.key()));
  const int last = static_cast<int>(std::floor(v.key()));
  if (first <= last) {
    s.first = first;
    s.last = last;
  }
  return s;
}

namespace {

struct QueryContext {
  const Trajectory& traj;
  const RangeIndex& idx;
  TrajectoryPos u, v;
  HorizontalSegment seg;
  VertexSpan span;
  Point u_pt{}, v_pt{};
  Point pu{}, pv{};  // first / last vertex points, valid when span.exists()
  bool u_extra = false, v_extra = false;

  QueryContext(const Trajectory& t, TrajectoryPos uu, TrajectoryPos vv,
               const HorizontalSegment& s, const RangeIndex& ix)
      : traj(t),
        idx(ix),
        u(canonical_pos(uu, t.size())),
        v(canonical_pos(vv, t.size())),
        seg(s) {
    if (u.key() > v.key()) throw std::invalid_argument("frechet query: u > v");
    span = vertex_span(t, u, v);
    u_pt = point_at(traj, u);
    v_pt = point_at(traj, v);
    if (span.exists()) {
      pu = traj[span.first];
      pv = traj[span.last];
      u_extra = u.key() < static_cast<double>(span.first);
      v_extra = v.key() > static_cast<double>(span.last);
    } else {
      u_extra = v_extra = true;
    }
  }

  void require_vertex() const {
    if (!span.exists())
      throw std::logic_error("subtrajectory has no vertex; single-segment case");
  }
};

// The five terms of F(s) with the Hausdorff part split into its three
// sub-terms. Only pus and hl depend on s; everything else is fixed once the
// query is fixed.
struct FTerms {
  double up = 0.0, vq = 0.0, pus = 0.0;
  double hl = 0.0, hr = 0.0, hm = 0.0;
  double bwd = -1.0;

  double value() const {
    return std::max({up, vq, pus, hl, hr, hm, bwd});
  }
};

// s-independent part of F.
FTerms f_constants(const QueryContext& c) {
  FTerms f;
  f.up = dist(c.u_pt, c.seg.p());
  f.vq = dist(c.v_pt, c.seg.q());
  const int a = c.span.first, b = c.span.last;
  const double y = c.seg.y;
  f.hr = c.idx.hausdorff_right(a, b, c.seg.q());
  f.hm = c.idx.hausdorff_mid(a, b, y);
  f.bwd = c.idx.backward_max(a, b, y);
  if (c.v_extra) {
    if (c.v_pt.x >= c.seg.x1) f.hr = std::max(f.hr, dist(c.seg.q(), c.v_pt));
    f.hm = std::max(f.hm, std::abs(y - c.v_pt.y));
    f.bwd = std::max(f.bwd, c.idx.backward_with_trail(a, b, c.v_pt, kWitnessV, y));
  }
  return f;
}

void f_movables(const QueryContext& c, const Point& s, FTerms& f) {
  f.pus = dist(c.pu, s);
  f.hl = c.idx.hausdorff_left(c.span.first, c.span.last, s);
  if (c.v_extra && c.v_pt.x <= s.x) f.hl = std::max(f.hl, dist(s, c.v_pt));
}

FTerms f_terms_at(const QueryContext& c, const Point& s) {
  FTerms f = f_constants(c);
  f_movables(c, s, f);
  return f;
}

StepDirection decide_from_f(const QueryContext& c, const FTerms& f, const Point& s) {
  const double m = f.value();
  // Terms that do not move with s attain the max: F(s') >= that term for all
  // s', so s is already optimal.
  if (f.up >= m - kTieTol || f.vq >= m - kTieTol || f.hr >= m - kTieTol ||
      f.hm >= m - kTieTol || f.bwd >= m - kTieTol)
    return StepDirection::Stop;
  bool left = false, right = false;
  if (f.pus >= m - kTieTol) {
    if (std::abs(c.pu.x - s.x) <= kTol) return StepDirection::Stop;  // at its minimum
    (c.pu.x > s.x ? right : left) = true;
  }
  if (f.hl >= m - kTieTol) left = true;  // shrink the segment from the left
  if (left && right) return StepDirection::Stop;
  if (left) return StepDirection::Left;
  if (right) return StepDirection::Right;
  return StepDirection::Stop;
}

// The terms of G(t): second stage with the first vertex pinned at p_prime,
// the last vertex matched to t on [p_prime, q]. Movables: pvt and hr.
struct GTerms {
  double pup = 0.0, vq = 0.0, hl = 0.0, hm = 0.0;
  double bwd = -1.0;
  double pvt = 0.0, hr = 0.0;

  double value() const {
    return std::max({pup, vq, hl, hm, bwd, pvt, hr});
  }
};

GTerms g_constants(const QueryContext& c, const Point& pp) {
  GTerms g;
  g.pup = dist(c.pu, pp);
  g.vq = dist(c.v_pt, c.seg.q());
  const int a = c.span.first, b = c.span.last;
  g.hl = c.idx.hausdorff_left(a, b, pp);
  g.hm = c.idx.hausdorff_mid(a, b, c.seg.y);
  g.bwd = c.idx.backward_max(a, b, c.seg.y);
  return g;
}

void g_movables(const QueryContext& c, const Point& t, GTerms& g) {
  g.pvt = dist(c.pv, t);
  g.hr = c.idx.hausdorff_right(c.span.first, c.span.last, t);
}

StepDirection decide_from_g(const QueryContext& c, const GTerms& g, const Point& t) {
  const double m = g.value();
  if (g.pup >= m - kTieTol || g.vq >= m - kTieTol || g.hl >= m - kTieTol ||
      g.hm >= m - kTieTol || g.bwd >= m - kTieTol)
    return StepDirection::Stop;
  bool left = false, right = false;
  if (g.pvt >= m - kTieTol) {
    if (std::abs(c.pv.x - t.x) <= kTol) return StepDirection::Stop;
    (c.pv.x > t.x ? right : left) = true;
  }
  // Reversed against the first stage: the segment grows rightward with t, so
  // the Hausdorff pull discards the left side.
  if (g.hr >= m - kTieTol) right = true;
  if (left && right) return StepDirection::Stop;
  if (left) return StepDirection::Left;
  if (right) return StepDirection::Right;
  return StepDirection::Stop;
}

void push_candidate(std::vector<double>& xs, double x, double lo, double hi) {
  xs.push_back(std::clamp(x, lo, hi));
}

void push_bisector(std::vector<double>& xs, const Point& a, const Point& b, double y,
                   double lo, double hi) {
  if (auto x = bisector_x_on_line(a, b, y))
    if (*x >= lo - kTol && *x <= hi + kTol) xs.push_back(std::clamp(*x, lo, hi));
}

std::vector<double> finish_candidates(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::vector<double> candidates_p(const QueryContext& c) {
  const double lo = c.seg.x0, hi = c.seg.x1, y = c.seg.y;
  std::vector<double> xs{lo, hi};
  for (int i = c.span.first; i <= c.span.last; ++i) {
    push_candidate(xs, c.traj[i].x, lo, hi);
    push_bisector(xs, c.pu, c.traj[i], y, lo, hi);
  }
  if (c.v_extra) {
    push_candidate(xs, c.v_pt.x, lo, hi);
    push_bisector(xs, c.pu, c.v_pt, y, lo, hi);
  }
  return finish_candidates(std::move(xs));
}

std::vector<double> candidates_q(const QueryContext& c, const Point& pp) {
  const double lo = pp.x, hi = c.seg.x1, y = c.seg.y;
  std::vector<double> xs{lo, hi};
  for (int i = c.span.first; i <= c.span.last; ++i) {
    push_candidate(xs, c.traj[i].x, lo, hi);
    push_bisector(xs, c.traj[i], c.pv, y, lo, hi);
  }
  if (c.v_extra) {
    push_candidate(xs, c.v_pt.x, lo, hi);
    push_bisector(xs, c.v_pt, c.pv, y, lo, hi);
  }
  return finish_candidates(std::move(xs));
}

Point p_prime_impl(const QueryContext& c, SplitMode mode, int& steps) {
  const double y = c.seg.y;
  if (mode == SplitMode::ExactCandidates) {
    const FTerms base = f_constants(c);
    double best = std::numeric_limits<double>::infinity();
    double best_x = c.seg.x0;
    for (double x : candidates_p(c)) {
      FTerms f = base;
      f_movables(c, {x, y}, f);
      const double fv = f.value();
      if (fv < best) {  // strict: ties keep the leftmost candidate
        best = fv;
        best_x = x;
      }
    }
    return {best_x, y};
  }
  double lo = c.seg.x0, hi = c.seg.x1;
  const double eps_x = kBisectRel * (1.0 + (hi - lo));
  const FTerms base = f_constants(c);
  int local = 0;
  while (hi - lo > eps_x && local < kMaxBisectSteps) {
    const double mid = 0.5 * (lo + hi);
    FTerms f = base;
    f_movables(c, {mid, y}, f);
    ++local;
    ++steps;
    const StepDirection d = decide_from_f(c, f, {mid, y});
    if (d == StepDirection::Stop) return {mid, y};
    (d == StepDirection::Left ? hi : lo) = mid;
  }
  return {0.5 * (lo + hi), y};
}

Point q_prime_impl(const QueryContext& c, const Point& pp, SplitMode mode, int& steps) {
  const double y = c.seg.y;
  if (mode == SplitMode::ExactCandidates) {
    const GTerms base = g_constants(c, pp);
    double best = std::numeric_limits<double>::infinity();
    double best_x = pp.x;
    for (double x : candidates_q(c, pp)) {
      GTerms g = base;
      g_movables(c, {x, y}, g);
      const double gv = g.value();
      if (gv < best) {
        best = gv;
        best_x = x;
      }
    }
    return {best_x, y};
  }
  double lo = pp.x, hi = c.seg.x1;
  const double eps_x = kBisectRel * (1.0 + (hi - lo));
  const GTerms base = g_constants(c, pp);
  int local = 0;
  while (hi - lo > eps_x && local < kMaxBisectSteps) {
    const double mid = 0.5 * (lo + hi);
    GTerms g = base;
    g_movables(c, {mid, y}, g);
    ++local;
    ++steps;
    const StepDirection d = decide_from_g(c, g, {mid, y});
    if (d == StepDirection::Stop) return {mid, y};
    (d == StepDirection::Left ? hi : lo) = mid;
  }
  return {0.5 * (lo + hi), y};
}

double eq4_value(const QueryContext& c, const Point& pp, const Point& qp) {
  const double lead = std::max(dist(c.u_pt, c.seg.p()), dist(c.pu, pp));
  const double trail = std::max(dist(c.pv, qp), dist(c.v_pt, c.seg.q()));
  const int a = c.span.first, b = c.span.last;
  const double middle = std::max({dist(c.pu, pp), dist(c.pv, qp),
                                  c.idx.hausdorff_left(a, b, pp),
                                  c.idx.hausdorff_right(a, b, qp),
                                  c.idx.hausdorff_mid(a, b, c.seg.y),
                                  c.idx.backward_max(a, b, c.seg.y)});
  return std::max({lead, trail, middle});
}

FrechetBreakdown assemble(std::array<TieCollector, kNumTerms>& col, double tie_tol) {
  FrechetBreakdown out;
  for (int t = 0; t < kNumTerms; ++t)
    out.term_values[t] = col[t].empty() ? 0.0 : col[t].best();
  out.value = *std::max_element(out.term_values.begin(), out.term_values.end());
  for (int t = 0; t < kNumTerms; ++t) {
    if (col[t].empty() || col[t].best() < out.value - tie_tol) continue;
    for (Witness w : col[t].witnesses()) {
      w.term = static_cast<Term>(t);
      out.attaining.push_back(w);
    }
  }
  return out;
}

std::array<TieCollector, kNumTerms> make_collectors(double tie_tol) {
  return {TieCollector(tie_tol), TieCollector(tie_tol), TieCollector(tie_tol),
          TieCollector(tie_tol), TieCollector(tie_tol), TieCollector(tie_tol)};
}

// Six-term decomposition of the distance over pi[u,v] with u and v treated as
// polyline vertices, evaluated through the index.
FrechetBreakdown direct_breakdown(const QueryContext& c, double tie_tol) {
  auto col = make_collectors(tie_tol);
  const Point p = c.seg.p(), q = c.seg.q();
  const double y = c.seg.y;
  const int iu = c.u_extra ? kWitnessU : c.span.first;
  const int iv = c.v_extra ? kWitnessV : c.span.last;
  const int up_i = static_cast<int>(Term::UP), vq_i = static_cast<int>(Term::VQ);
  const int hl_i = static_cast<int>(Term::HL), hr_i = static_cast<int>(Term::HR);
  const int hm_i = static_cast<int>(Term::HM), bw_i = static_cast<int>(Term::BWD);

  col[up_i].offer(dist(c.u_pt, p), {Term::UP, c.u_pt, {}, iu, kWitnessNone});
  col[vq_i].offer(dist(c.v_pt, q), {Term::VQ, c.v_pt, {}, iv, kWitnessNone});

  auto offer_extra = [&](const Point& r, int id) {
    if (r.x <= c.seg.x0) col[hl_i].offer(dist(p, r), {Term::HL, r, {}, id, kWitnessNone});
    if (r.x >= c.seg.x1) col[hr_i].offer(dist(q, r), {Term::HR, r, {}, id, kWitnessNone});
    col[hm_i].offer(std::abs(y - r.y), {Term::HM, r, {}, id, kWitnessNone});
  };

  if (c.span.exists()) {
    const int a = c.span.first, b = c.span.last;
    c.idx.hausdorff_left(a, b, p, &col[hl_i]);
    c.idx.hausdorff_right(a, b, q, &col[hr_i]);
    c.idx.hausdorff_mid(a, b, y, &col[hm_i]);
    c.idx.backward_max(a, b, y, &col[bw_i]);
    if (c.u_extra) {
      offer_extra(c.u_pt, kWitnessU);
      c.idx.backward_with_lead(a, b, c.u_pt, kWitnessU, y, &col[bw_i]);
    }
    if (c.v_extra) {
      offer_extra(c.v_pt, kWitnessV);
      c.idx.backward_with_trail(a, b, c.v_pt, kWitnessV, y, &col[bw_i]);
    }
  } else {
    offer_extra(c.u_pt, kWitnessU);
    offer_extra(c.v_pt, kWitnessV);
  }
  if (c.u_extra && c.v_extra && c.u_pt.x >= c.v_pt.x)
    col[bw_i].offer(backward_pair_distance(c.u_pt, c.v_pt, y),
                    {Term::BWD, c.u_pt, c.v_pt, kWitnessU, kWitnessV});

  return assemble(col, tie_tol);
}

}  // namespace

FrechetBreakdown eval_F(const Point& s, const Trajectory& traj, TrajectoryPos u,
                        TrajectoryPos v, const HorizontalSegment& seg,
                        const RangeIndex& idx) {
  QueryContext c(traj, u, v, seg, idx);
  c.require_vertex();
  auto col = make_collectors(kTieTol);
  const Point q = seg.q();
  const double y = seg.y;
  const int a = c.span.first, b = c.span.last;
  const int iu = c.u_extra ? kWitnessU : c.span.first;
  const int up_i = static_cast<int>(Term::UP), vq_i = static_cast<int>(Term::VQ);
  const int hl_i = static_cast<int>(Term::HL), hr_i = static_cast<int>(Term::HR);
  const int hm_i = static_cast<int>(Term::HM), bw_i = static_cast<int>(Term::BWD);

  // Both distances of the leading segment-vs-segment part live in the UP slot.
  col[up_i].offer(dist(c.u_pt, seg.p()), {Term::UP, c.u_pt, {}, iu, kWitnessNone});
  col[up_i].offer(dist(c.pu, s), {Term::UP, c.pu, {}, c.span.first, kWitnessNone});
  col[vq_i].offer(dist(c.v_pt, q), {Term::VQ, c.v_pt, {}, c.v_extra ? kWitnessV : b, kWitnessNone});

  c.idx.hausdorff_left(a, b, s, &col[hl_i]);
  c.idx.hausdorff_right(a, b, q, &col[hr_i]);
  c.idx.hausdorff_mid(a, b, y, &col[hm_i]);
  c.idx.backward_max(a, b, y, &col[bw_i]);
  if (c.v_extra) {
    if (c.v_pt.x <= s.x)
      col[hl_i].offer(dist(s, c.v_pt), {Term::HL, c.v_pt, {}, kWitnessV, kWitnessNone});
    if (c.v_pt.x >= seg.x1)
      col[hr_i].offer(dist(q, c.v_pt), {Term::HR, c.v_pt, {}, kWitnessV, kWitnessNone});
    col[hm_i].offer(std::abs(y - c.v_pt.y), {Term::HM, c.v_pt, {}, kWitnessV, kWitnessNone});
    c.idx.backward_with_trail(a, b, c.v_pt, kWitnessV, y, &col[bw_i]);
  }
  return assemble(col, kTieTol);
}

StepDirection decide_p_prime(const Point& s, const Trajectory& traj, TrajectoryPos u,
                             TrajectoryPos v, const HorizontalSegment& seg,
                             const RangeIndex& idx) {
  QueryContext c(traj, u, v, seg, idx);
  c.require_vertex();
  return decide_from_f(c, f_terms_at(c, s), s);
}

std::vector<double> build_candidate_set_p(const Trajectory& traj, TrajectoryPos u,
                                          TrajectoryPos v, const HorizontalSegment& seg) {
  // The candidate set is index-independent; a throwaway brute index feeds the
  // shared context plumbing.
  RangeIndex scratch = RangeIndex::build(traj, {.mode = IndexMode::Brute});
  QueryContext c(traj, u, v, seg, scratch);
  c.require_vertex();
  return candidates_p(c);
}

Point compute_p_prime(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                      const HorizontalSegment& seg, const RangeIndex& idx,
                      SplitMode mode, int* steps) {
  QueryContext c(traj, u, v, seg, idx);
  c.require_vertex();
  int local = 0;
  const Point pp = p_prime_impl(c, mode, local);
  if (steps) *steps += local;
  return pp;
}

StepDirection decide_q_prime(const Point& t, const Trajectory& traj, TrajectoryPos u,
                             TrajectoryPos v, const HorizontalSegment& seg,
                             const Point& p_prime, const RangeIndex& idx) {
  QueryContext c(traj, u, v, seg, idx);
  c.require_vertex();
  GTerms g = g_constants(c, p_prime);
  g_movables(c, t, g);
  return decide_from_g(c, g, t);
}

std::vector<double> build_candidate_set_q(const Trajectory& traj, TrajectoryPos u,
                                          TrajectoryPos v, const HorizontalSegment& seg,
                                          const Point& p_prime) {
  RangeIndex scratch = RangeIndex::build(traj, {.mode = IndexMode::Brute});
  QueryContext c(traj, u, v, seg, scratch);
  c.require_vertex();
  return candidates_q(c, p_prime);
}

Point compute_q_prime(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                      const HorizontalSegment& seg, const Point& p_prime,
                      const RangeIndex& idx, SplitMode mode, int* steps) {
  QueryContext c(traj, u, v, seg, idx);
  c.require_vertex();
  int local = 0;
  const Point qp = q_prime_impl(c, p_prime, mode, local);
  if (steps) *steps += local;
  return qp;
}

QueryResult frechet_query(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                          const HorizontalSegment& seg, const RangeIndex& idx,
                          const QueryOptions& opts) {
  QueryContext c(traj, u, v, seg, idx);
  QueryResult r;
  r.breakdown = direct_breakdown(c, opts.tie_tol);
  if (!c.span.exists() || !opts.want_split) return r;
  int steps = 0;
  const Point pp = p_prime_impl(c, opts.mode, steps);
  const Point qp = q_prime_impl(c, pp, opts.mode, steps);
  r.split = SplitResult{pp, qp, eq4_value(c, pp, qp), opts.mode};
  r.decision_steps = steps;
  return r;
}

}  // namespace fq
