#include "fq/range_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fq {

namespace {

inline std::uint64_t pair_key(std::uint32_t i, std::uint32_t j) {
  return (static_cast<std::uint64_t>(i) << 32) | j;
}

// Andrew monotone chain over a lexicographically sorted slice; keeps extreme
// points only (collinear points are dominated for convex maximization).
void build_hull_from_slice(const std::vector<Point>& pts, const std::vector<int>& order,
                           int lo, int hi, std::vector<std::pair<Point, int>>& hull) {
  hull.clear();
  const int m = hi - lo;
  if (m <= 0) return;
  if (m <= 2) {
    for (int k = lo; k < hi; ++k) hull.push_back({pts[order[k]], order[k]});
    return;
  }
  auto cross = [](const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<std::pair<Point, int>> h(2 * m);
  int k = 0;
  for (int t = lo; t < hi; ++t) {
    const Point p = pts[order[t]];
    while (k >= 2 && cross(h[k - 2].first, h[k - 1].first, p) <= 0.0) --k;
    h[k++] = {p, order[t]};
  }
  const int lower = k + 1;
  for (int t = hi - 2; t >= lo; --t) {
    const Point p = pts[order[t]];
    while (k >= lower && cross(h[k - 2].first, h[k - 1].first, p) <= 0.0) --k;
    h[k++] = {p, order[t]};
  }
  h.resize(k - 1);
  hull = std::move(h);
}

inline void offer_point(TieCollector* ties, double value, const Point& a, int id) {
  if (ties) ties->offer(value, Witness{Term::UP, a, {}, id, kWitnessNone});
}

inline void offer_pair(TieCollector* ties, double value, const Point& a, const Point& b,
                       int ia, int ib) {
  if (ties) ties->offer(value, Witness{Term::BWD, a, b, ia, ib});
}

// Slack for branch-and-bound pruning in the divide-and-conquer backward paths.
// Wide enough to dominate every tie band collectors use (the widest is about
// 1e-7 relative), so skipped subtrees can hold neither the maximum nor any
// witness a caller would keep.
constexpr double kCrossPruneRel = 1e-5;

inline double prune_slack(double best) {
  return kCrossPruneRel * (1.0 + std::max(best, 0.0));
}

// Largest distance from m to the axis-aligned box [x0,x1] x [y0,y1].
inline double box_farthest(double x0, double x1, double y0, double y1,
                           const Point& m) {
  const double dx = std::max(std::abs(m.x - x0), std::abs(m.x - x1));
  const double dy = std::max(std::abs(m.y - y0), std::abs(m.y - y1));
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction.

RangeIndex RangeIndex::build(const Trajectory& traj, const IndexConfig& cfg) {
  if (traj.size() == 0) throw std::invalid_argument("RangeIndex: empty trajectory");
  RangeIndex idx;
  idx.build_skeleton(traj, cfg);
  if (cfg.mode == IndexMode::Fast && cfg.build_supports) idx.build_supports();
  return idx;
}

void RangeIndex::build_skeleton(const Trajectory& traj, const IndexConfig& cfg) {
  cfg_ = cfg;
  cfg_.leaf_size = std::max(1, cfg.leaf_size);
  cfg_.support_cap = std::max(1, cfg.support_cap);
  pts_ = traj.pts;

  double min_y = pts_[0].y, max_y = pts_[0].y, min_x = pts_[0].x, max_x = pts_[0].x;
  for (const Point& p : pts_) {
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
  }
  const double diag = dist({min_x, min_y}, {max_x, max_y});
  const double margin = cfg_.window_margin * (diag + 1.0);
  window_lo_ = min_y - margin;
  window_hi_ = max_y + margin;

  if (cfg_.mode == IndexMode::Brute) return;

  nodes_.clear();
  build_tree(0, static_cast<int>(pts_.size()) - 1);
  // Children sit after their parent in pre-order; walk backwards so payloads
  // exist before the parent needs them.
  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i)
    build_node_payload(nodes_[i]);
}

int RangeIndex::build_tree(int lo, int hi) {
  const int idx = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  nodes_[idx].lo = lo;
  nodes_[idx].hi = hi;
  if (hi - lo + 1 > cfg_.leaf_size) {
    const int mid = lo + (hi - lo) / 2;
    const int l = build_tree(lo, mid);
    const int r = build_tree(mid + 1, hi);
    nodes_[idx].left = l;
    nodes_[idx].right = r;
  }
  return idx;
}

void RangeIndex::build_node_payload(OuterNode& n) {
  auto lex_less = [&](int a, int b) {
    if (pts_[a].x != pts_[b].x) return pts_[a].x < pts_[b].x;
    if (pts_[a].y != pts_[b].y) return pts_[a].y < pts_[b].y;
    return a < b;
  };
  if (n.left < 0) {
    n.xorder.resize(n.hi - n.lo + 1);
    for (int i = n.lo; i <= n.hi; ++i) n.xorder[i - n.lo] = i;
    std::sort(n.xorder.begin(), n.xorder.end(), lex_less);
  } else {
    const auto& xl = nodes_[n.left].xorder;
    const auto& xr = nodes_[n.right].xorder;
    n.xorder.resize(xl.size() + xr.size());
    std::merge(xl.begin(), xl.end(), xr.begin(), xr.end(), n.xorder.begin(), lex_less);
  }

  n.min_y = std::numeric_limits<double>::infinity();
  n.max_y = -std::numeric_limits<double>::infinity();
  for (int i = n.lo; i <= n.hi; ++i) {
    if (pts_[i].y < n.min_y) {
      n.min_y = pts_[i].y;
      n.argmin_y = i;
    }
    if (pts_[i].y > n.max_y) {
      n.max_y = pts_[i].y;
      n.argmax_y = i;
    }
  }

  n.inner.clear();
  build_inner(n, 0, static_cast<int>(n.xorder.size()));
  // Leaf pair lists are tiny and height-independent; build them always so a
  // supportless index still answers backward queries via recursion.
  if (n.left < 0) build_leaf_support(n);
}

void RangeIndex::build_inner(OuterNode& n, int lo, int hi) {
  const int idx = static_cast<int>(n.inner.size());
  n.inner.push_back({});
  n.inner[idx].lo = lo;
  n.inner[idx].hi = hi;
  {
    std::vector<std::pair<Point, int>> hull;
    build_hull_from_slice(pts_, n.xorder, lo, hi, hull);
    n.inner[idx].hull = std::move(hull);
  }
  if (hi > lo) {
    double y0 = pts_[n.xorder[lo]].y, y1 = y0;
    for (int s = lo + 1; s < hi; ++s) {
      const double py = pts_[n.xorder[s]].y;
      y0 = std::min(y0, py);
      y1 = std::max(y1, py);
    }
    n.inner[idx].min_y = y0;
    n.inner[idx].max_y = y1;
  }
  if (hi - lo > 8) {
    const int mid = lo + (hi - lo) / 2;
    const int l = static_cast<int>(n.inner.size());
    build_inner(n, lo, mid);
    const int r = static_cast<int>(n.inner.size());
    build_inner(n, mid, hi);
    n.inner[idx].left = l;
    n.inner[idx].right = r;
  }
}

double RangeIndex::inner_min_x(const OuterNode& n, const InnerNode& b) const {
  return pts_[n.xorder[b.lo]].x;
}
double RangeIndex::inner_max_x(const OuterNode& n, const InnerNode& b) const {
  return pts_[n.xorder[b.hi - 1]].x;
}

void RangeIndex::build_supports() {
  // Group nodes by depth so each level can run as one parallel batch with
  // children completed first.
  std::vector<int> depth(nodes_.size(), 0);
  std::vector<int> max_depth(1, 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const OuterNode& n = nodes_[i];
    if (n.left >= 0) {
      depth[n.left] = depth[i] + 1;
      depth[n.right] = depth[i] + 1;
    }
  }
  int dmax = 0;
  for (int d : depth) dmax = std::max(dmax, d);
  std::vector<std::vector<int>> levels(dmax + 1);
  for (std::size_t i = 0; i < nodes_.size(); ++i) levels[depth[i]].push_back(i);

  for (int d = dmax; d >= 0; --d) {
    auto& level = levels[d];
    const int count = static_cast<int>(level.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int k = 0; k < count; ++k) {
      OuterNode& n = nodes_[level[k]];
      if (n.left >= 0) build_internal_support(n);
    }
  }
}

void RangeIndex::build_leaf_support(OuterNode& n) {
  n.support.clear();
  for (int i = n.lo; i <= n.hi; ++i)
    for (int j = i + 1; j <= n.hi; ++j)
      if (pts_[i].x >= pts_[j].x)
        n.support.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
  n.support_ok = true;  // complete list, valid at every height
}

// Builds the list of backward pairs that can attain the node's internal
// maximum anywhere in the certified height window. Candidates are the
// children's support lists plus, for every right-child vertex, the extreme
// points of the left-child slices at larger x. Candidates are then pruned by
// interval refinement: on an interval a candidate is dropped only when its
// chord provably stays below a tangent lower bound of the current best, so
// the surviving set realizes the exact maximum (over-inclusion is harmless).
void RangeIndex::build_internal_support(OuterNode& n) {
  const OuterNode& L = nodes_[n.left];
  const OuterNode& R = nodes_[n.right];
  n.support.clear();
  n.support_ok = false;
  if (!L.support_ok || !R.support_ok) return;

  std::vector<std::pair<std::uint32_t, std::uint32_t>> cand(L.support.begin(),
                                                            L.support.end());
  cand.insert(cand.end(), R.support.begin(), R.support.end());
  for (int j = R.lo; j <= R.hi; ++j) {
    const double bx = pts_[j].x;
    cover_suffix(
        L, 0, bx,
        [&](const InnerNode& blk) {
          for (const auto& [hp, hid] : blk.hull) cand.push_back({(std::uint32_t)hid, (std::uint32_t)j});
        },
        [&](int i) { cand.push_back({(std::uint32_t)i, (std::uint32_t)j}); });
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  if (cand.empty()) {
    n.support_ok = true;
    return;
  }

  auto eval = [&](const std::pair<std::uint32_t, std::uint32_t>& pr, double y) {
    return backward_pair_distance(pts_[pr.first], pts_[pr.second], y);
  };

  std::vector<std::pair<std::uint32_t, std::uint32_t>> sup;
  std::unordered_set<std::uint64_t> in_sup;
  bool overflow = false;
  int budget = 20000;

  auto add = [&](const std::pair<std::uint32_t, std::uint32_t>& pr) {
    if (in_sup.insert(pair_key(pr.first, pr.second)).second) {
      sup.push_back(pr);
      if (static_cast<int>(sup.size()) > cfg_.support_cap) overflow = true;
    }
  };

  struct Frame {
    double y1, y2;
    std::vector<int> active;
    std::vector<double> f1, f2;
  };

  auto refine = [&](auto&& self, Frame fr) -> void {
    if (overflow || --budget < 0) {
      for (int id : fr.active) add(cand[id]);
      return;
    }
    // Best candidates at the interval ends anchor the lower bound.
    int a1 = 0, a2 = 0;
    for (std::size_t k = 1; k < fr.active.size(); ++k) {
      if (fr.f1[k] > fr.f1[a1]) a1 = static_cast<int>(k);
      if (fr.f2[k] > fr.f2[a2]) a2 = static_cast<int>(k);
    }
    add(cand[fr.active[a1]]);
    add(cand[fr.active[a2]]);
    if (overflow) return;
    const double v1 = fr.f1[a1], v2 = fr.f2[a2];
    const double h = std::max(1e-6, 1e-3 * (fr.y2 - fr.y1));
    // Backward difference at y1 under-estimates the left derivative, forward
    // difference at y2 over-estimates the right one; both give valid global
    // tangent bounds on [y1, y2] for a convex function.
    const double g1 = (v1 - eval(cand[fr.active[a1]], fr.y1 - h)) / h;
    const double g2 = (eval(cand[fr.active[a2]], fr.y2 + h) - v2) / h;
    auto lb = [&](double y) {
      return std::max(v1 + g1 * (y - fr.y1), v2 + g2 * (y - fr.y2));
    };
    double y_cross = fr.y2;
    if (g1 != g2) {
      y_cross = ((v2 - g2 * fr.y2) - (v1 - g1 * fr.y1)) / (g1 - g2);
      y_cross = std::clamp(y_cross, fr.y1, fr.y2);
    }
    const double margin = 1e-10 * (1.0 + std::max(v1, v2));

    Frame next;
    next.y1 = fr.y1;
    next.y2 = fr.y2;
    bool all_in_support = true;
    for (std::size_t k = 0; k < fr.active.size(); ++k) {
      const double s1 = fr.f1[k], s2 = fr.f2[k];
      auto secant = [&](double y) {
        return s1 + (s2 - s1) * (y - fr.y1) / (fr.y2 - fr.y1);
      };
      const double worst =
          std::max({s1 - lb(fr.y1), s2 - lb(fr.y2), secant(y_cross) - lb(y_cross)});
      if (worst <= -margin) continue;  // provably below the support envelope
      next.active.push_back(fr.active[k]);
      next.f1.push_back(s1);
      next.f2.push_back(s2);
      const auto& pr = cand[fr.active[k]];
      if (!in_sup.count(pair_key(pr.first, pr.second))) all_in_support = false;
    }
    if (next.active.empty() || all_in_support) return;
    const double width = fr.y2 - fr.y1;
    if (width < 1e-9 * (1.0 + std::abs(fr.y1) + std::abs(fr.y2))) {
      for (int id : next.active) add(cand[id]);
      return;
    }
    const double ym = 0.5 * (fr.y1 + fr.y2);
    Frame leftf, rightf;
    leftf.y1 = fr.y1;
    leftf.y2 = ym;
    rightf.y1 = ym;
    rightf.y2 = fr.y2;
    leftf.active = next.active;
    rightf.active = std::move(next.active);
    rightf.f2 = std::move(next.f2);
    leftf.f2.reserve(leftf.active.size());
    rightf.f1.reserve(rightf.active.size());
    for (int id : leftf.active) {
      const double fm = eval(cand[id], ym);
      leftf.f2.push_back(fm);
      rightf.f1.push_back(fm);
    }
    leftf.f1 = std::move(next.f1);
    self(self, std::move(leftf));
    if (!overflow) self(self, std::move(rightf));
  };

  Frame root;
  root.y1 = window_lo_;
  root.y2 = window_hi_;
  root.active.resize(cand.size());
  for (std::size_t k = 0; k < cand.size(); ++k) root.active[k] = static_cast<int>(k);
  root.f1.reserve(cand.size());
  root.f2.reserve(cand.size());
  for (const auto& pr : cand) {
    root.f1.push_back(eval(pr, root.y1));
    root.f2.push_back(eval(pr, root.y2));
  }
  refine(refine, std::move(root));

  if (overflow) {
    n.support.clear();
    n.support_ok = false;
    return;
  }
  std::sort(sup.begin(), sup.end());
  n.support = std::move(sup);
  n.support_ok = true;
}

// ---------------------------------------------------------------------------
// Range cover.

void RangeIndex::check_range(int a, int b) const {
  if (a < 0 || b >= static_cast<int>(pts_.size()) || a > b)
    throw std::invalid_argument("RangeIndex: bad vertex range");
}

RangeIndex::RangeCover RangeIndex::decompose(int a, int b) const {
  RangeCover cover;
  auto rec = [&](auto&& self, int ni) -> void {
    const OuterNode& n = nodes_[ni];
    if (b < n.lo || n.hi < a) return;
    if (a <= n.lo && n.hi <= b) {
      cover.nodes.push_back(ni);
      return;
    }
    if (n.left < 0) {
      cover.partial.push_back({std::max(a, n.lo), std::min(b, n.hi)});
      return;
    }
    self(self, n.left);
    self(self, n.right);
  };
  rec(rec, 0);
  return cover;
}

template <class FullBlock, class Single>
void RangeIndex::cover_prefix(const OuterNode& n, int ii, double x_max, FullBlock&& fb,
                              Single&& s) const {
  const InnerNode& blk = n.inner[ii];
  if (blk.hi <= blk.lo || inner_min_x(n, blk) > x_max) return;
  if (inner_max_x(n, blk) <= x_max) {
    fb(blk);
    return;
  }
  if (blk.left < 0) {
    for (int k = blk.lo; k < blk.hi; ++k) {
      const int id = n.xorder[k];
      if (pts_[id].x <= x_max) s(id);
    }
    return;
  }
  cover_prefix(n, blk.left, x_max, fb, s);
  cover_prefix(n, blk.right, x_max, fb, s);
}

template <class FullBlock, class Single>
void RangeIndex::cover_suffix(const OuterNode& n, int ii, double x_min, FullBlock&& fb,
                              Single&& s) const {
  const InnerNode& blk = n.inner[ii];
  if (blk.hi <= blk.lo || inner_max_x(n, blk) < x_min) return;
  if (inner_min_x(n, blk) >= x_min) {
    fb(blk);
    return;
  }
  if (blk.left < 0) {
    for (int k = blk.lo; k < blk.hi; ++k) {
      const int id = n.xorder[k];
      if (pts_[id].x >= x_min) s(id);
    }
    return;
  }
  cover_suffix(n, blk.left, x_min, fb, s);
  cover_suffix(n, blk.right, x_min, fb, s);
}

// ---------------------------------------------------------------------------
// Hausdorff queries.

double RangeIndex::hausdorff_left(int a, int b, const Point& p,
                                  TieCollector* ties) const {
  check_range(a, b);
  double best = 0.0;
  auto take = [&](int i) {
    const double d = dist(p, pts_[i]);
    best = std::max(best, d);
    offer_point(ties, d, pts_[i], i);
  };
  if (cfg_.mode == IndexMode::Brute) {
    for (int i = a; i <= b; ++i)
      if (pts_[i].x <= p.x) take(i);
    return best;
  }
  const RangeCover cover = decompose(a, b);
  for (int ni : cover.nodes) {
    const OuterNode& n = nodes_[ni];
    cover_prefix(
        n, 0, p.x,
        [&](const InnerNode& blk) {
          // A block whose box cannot beat the running best holds no witness
          // within any caller's tie band either; skip its hull.
          if (box_farthest(inner_min_x(n, blk), inner_max_x(n, blk), blk.min_y,
                           blk.max_y, p) <= best - prune_slack(best))
            return;
          for (const auto& [hp, hid] : blk.hull) {
            const double d = dist(p, hp);
            best = std::max(best, d);
            offer_point(ties, d, hp, hid);
          }
        },
        take);
  }
  for (const auto& [s, e] : cover.partial)
    for (int i = s; i <= e; ++i)
      if (pts_[i].x <= p.x) take(i);
  return best;
}

double RangeIndex::hausdorff_right(int a, int b, const Point& q,
                                   TieCollector* ties) const {
  check_range(a, b);
  double best = 0.0;
  auto take = [&](int i) {
    const double d = dist(q, pts_[i]);
    best = std::max(best, d);
    offer_point(ties, d, pts_[i], i);
  };
  if (cfg_.mode == IndexMode::Brute) {
    for (int i = a; i <= b; ++i)
      if (pts_[i].x >= q.x) take(i);
    return best;
  }
  const RangeCover cover = decompose(a, b);
  for (int ni : cover.nodes) {
    const OuterNode& n = nodes_[ni];
    cover_suffix(
        n, 0, q.x,
        [&](const InnerNode& blk) {
          if (box_farthest(inner_min_x(n, blk), inner_max_x(n, blk), blk.min_y,
                           blk.max_y, q) <= best - prune_slack(best))
            return;
          for (const auto& [hp, hid] : blk.hull) {
            const double d = dist(q, hp);
            best = std::max(best, d);
            offer_point(ties, d, hp, hid);
          }
        },
        take);
  }
  for (const auto& [s, e] : cover.partial)
    for (int i = s; i <= e; ++i)
      if (pts_[i].x >= q.x) take(i);
  return best;
}

double RangeIndex::hausdorff_mid(int a, int b, double y, TieCollector* ties) const {
  check_range(a, b);
  double best = 0.0;
  auto take = [&](int i) {
    const double d = std::abs(y - pts_[i].y);
    best = std::max(best, d);
    offer_point(ties, d, pts_[i], i);
  };
  if (cfg_.mode == IndexMode::Brute) {
    for (int i = a; i <= b; ++i) take(i);
    return best;
  }
  const RangeCover cover = decompose(a, b);
  for (int ni : cover.nodes) {
    take(nodes_[ni].argmin_y);
    take(nodes_[ni].argmax_y);
  }
  for (const auto& [s, e] : cover.partial)
    for (int i = s; i <= e; ++i) take(i);
  return best;
}

// ---------------------------------------------------------------------------
// Backward-pair queries.
//
// The divide-and-conquer paths thread the best value seen so far and skip a
// slice pair when its upper bound sits more than prune_slack(best) below it.
// For any probe m on the query line, backward_pair_distance(a, b, y) never
// exceeds max(dist(a, m), dist(b, m)), so the farthest-corner distances of
// the two bounding boxes to a shared probe bound every pair drawn from them.
// The exhaustive configuration never prunes.

double RangeIndex::cross_ub(const OuterNode& na, const InnerNode& A,
                            const OuterNode& nb, const InnerNode& B, double y) const {
  const double ax0 = inner_min_x(na, A), ax1 = inner_max_x(na, A);
  const double bx0 = inner_min_x(nb, B), bx1 = inner_max_x(nb, B);
  const double ca = 0.5 * (ax0 + ax1), cb = 0.5 * (bx0 + bx1);
  double ub = std::numeric_limits<double>::infinity();
  for (const double mx : {0.5 * (ca + cb), ca, cb}) {
    const Point m{mx, y};
    ub = std::min(ub, std::max(box_farthest(ax0, ax1, A.min_y, A.max_y, m),
                               box_farthest(bx0, bx1, B.min_y, B.max_y, m)));
  }
  return ub;
}

double RangeIndex::internal_ub(const OuterNode& n, double y) const {
  const InnerNode& root = n.inner[0];
  const double x0 = inner_min_x(n, root), x1 = inner_max_x(n, root);
  return box_farthest(x0, x1, root.min_y, root.max_y, {0.5 * (x0 + x1), y});
}

// The pair distance is jointly convex in its two endpoints: each point-probe
// distance is convex in (point, probe), the max of the two stays convex, and
// minimizing over the probe preserves convexity in what remains. Its maximum
// over two boxes is therefore attained at a pair of box corners, so sixteen
// exact evaluations bound every pair drawn from the boxes without the slack
// the probe construction carries. Worth the cost only once the cheap bound
// has failed to prune.
double RangeIndex::cross_corner_ub(const OuterNode& na, const InnerNode& A,
                                   const OuterNode& nb, const InnerNode& B,
                                   double y) const {
  const double ax[2] = {inner_min_x(na, A), inner_max_x(na, A)};
  const double ay[2] = {A.min_y, A.max_y};
  const double bx[2] = {inner_min_x(nb, B), inner_max_x(nb, B)};
  const double by[2] = {B.min_y, B.max_y};
  double ub = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      ub = std::max(ub, backward_pair_distance({ax[i & 1], ay[i >> 1]},
                                               {bx[j & 1], by[j >> 1]}, y));
  return ub;
}

double RangeIndex::internal_corner_ub(const OuterNode& n, double y) const {
  const InnerNode& root = n.inner[0];
  const double cx[2] = {inner_min_x(n, root), inner_max_x(n, root)};
  const double cy[2] = {root.min_y, root.max_y};
  double ub = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j)
      ub = std::max(ub, backward_pair_distance({cx[i & 1], cy[i >> 1]},
                                               {cx[j & 1], cy[j >> 1]}, y));
  return ub;
}

void RangeIndex::internal_pairs(const OuterNode& n, double y, TieCollector* ties,
                                double& best) const {
  if (!cfg_.exhaustive_cross) {
    const double cut = best - prune_slack(best);
    if (internal_ub(n, y) <= cut || internal_corner_ub(n, y) <= cut) return;
  }
  const bool in_window = y >= window_lo_ && y <= window_hi_;
  if (n.left < 0 || (n.support_ok && in_window)) {
    for (const auto& [i, j] : n.support) {
      const double d = backward_pair_distance(pts_[i], pts_[j], y);
      best = std::max(best, d);
      offer_pair(ties, d, pts_[i], pts_[j], i, j);
    }
    return;
  }
  internal_pairs(nodes_[n.left], y, ties, best);
  internal_pairs(nodes_[n.right], y, ties, best);
  cross_nodes(nodes_[n.left], nodes_[n.right], y, ties, best);
}

void RangeIndex::cross_nodes(const OuterNode& a, const OuterNode& b, double y,
                             TieCollector* ties, double& best) const {
  if (cfg_.exhaustive_cross) {
    for (int i = a.lo; i <= a.hi; ++i)
      for (int j = b.lo; j <= b.hi; ++j)
        if (pts_[i].x >= pts_[j].x) {
          const double d = backward_pair_distance(pts_[i], pts_[j], y);
          best = std::max(best, d);
          offer_pair(ties, d, pts_[i], pts_[j], i, j);
        }
    return;
  }
  cross_dc(a, 0, b, 0, y, ties, best);
}

void RangeIndex::cross_dc(const OuterNode& na, int ia, const OuterNode& nb, int ib,
                          double y, TieCollector* ties, double& best,
                          double ub_in) const {
  const InnerNode& A = na.inner[ia];
  const InnerNode& B = nb.inner[ib];
  if (A.hi <= A.lo || B.hi <= B.lo) return;
  if (inner_max_x(na, A) < inner_min_x(nb, B)) return;  // no a.x >= b.x
  const double cut = best - prune_slack(best);
  if ((ub_in >= 0.0 ? ub_in : cross_ub(na, A, nb, B, y)) <= cut) return;
  if (cross_corner_ub(na, A, nb, B, y) <= cut) return;
  if (inner_min_x(na, A) >= inner_max_x(nb, B)) {
    // Every pair valid; the pair distance is jointly convex in the two
    // points, so hull vertices realize the maximum.
    for (const auto& [pa, iaid] : A.hull)
      for (const auto& [pb, ibid] : B.hull) {
        const double d = backward_pair_distance(pa, pb, y);
        best = std::max(best, d);
        offer_pair(ties, d, pa, pb, iaid, ibid);
      }
    return;
  }
  if (A.left < 0 && B.left < 0) {
    for (int s = A.lo; s < A.hi; ++s) {
      const int i = na.xorder[s];
      for (int t = B.lo; t < B.hi; ++t) {
        const int j = nb.xorder[t];
        if (pts_[i].x >= pts_[j].x) {
          const double d = backward_pair_distance(pts_[i], pts_[j], y);
          best = std::max(best, d);
          offer_pair(ties, d, pts_[i], pts_[j], i, j);
        }
      }
    }
    return;
  }
  const int size_a = A.hi - A.lo, size_b = B.hi - B.lo;
  if (A.left >= 0 && (B.left < 0 || size_a >= size_b)) {
    int c1 = A.left, c2 = A.right;
    double u1 = cross_ub(na, na.inner[c1], nb, B, y);
    double u2 = cross_ub(na, na.inner[c2], nb, B, y);
    // Likelier child first so the running best tightens before the sibling.
    if (u2 > u1) {
      std::swap(c1, c2);
      std::swap(u1, u2);
    }
    cross_dc(na, c1, nb, ib, y, ties, best, u1);
    cross_dc(na, c2, nb, ib, y, ties, best, u2);
    return;
  }
  int c1 = B.left, c2 = B.right;
  double u1 = cross_ub(na, A, nb, nb.inner[c1], y);
  double u2 = cross_ub(na, A, nb, nb.inner[c2], y);
  if (u2 > u1) {
    std::swap(c1, c2);
    std::swap(u1, u2);
  }
  cross_dc(na, ia, nb, c1, y, ties, best, u1);
  cross_dc(na, ia, nb, c2, y, ties, best, u2);
}

double RangeIndex::node_pairs_with_lead(const OuterNode& n, const Point& lead,
                                        int lead_id, double y,
                                        TieCollector* ties) const {
  double best = -1.0;
  cover_prefix(
      n, 0, lead.x,
      [&](const InnerNode& blk) {
        for (const auto& [hp, hid] : blk.hull) {
          const double d = backward_pair_distance(lead, hp, y);
          best = std::max(best, d);
          offer_pair(ties, d, lead, hp, lead_id, hid);
        }
      },
      [&](int j) {
        const double d = backward_pair_distance(lead, pts_[j], y);
        best = std::max(best, d);
        offer_pair(ties, d, lead, pts_[j], lead_id, j);
      });
  return best;
}

double RangeIndex::node_pairs_with_trail(const OuterNode& n, const Point& trail,
                                         int trail_id, double y,
                                         TieCollector* ties) const {
  double best = -1.0;
  cover_suffix(
      n, 0, trail.x,
      [&](const InnerNode& blk) {
        for (const auto& [hp, hid] : blk.hull) {
          const double d = backward_pair_distance(hp, trail, y);
          best = std::max(best, d);
          offer_pair(ties, d, hp, trail, hid, trail_id);
        }
      },
      [&](int i) {
        const double d = backward_pair_distance(pts_[i], trail, y);
        best = std::max(best, d);
        offer_pair(ties, d, pts_[i], trail, i, trail_id);
      });
  return best;
}

double RangeIndex::backward_max(int a, int b, double y, TieCollector* ties) const {
  check_range(a, b);
  if (cfg_.mode == IndexMode::Brute) {
    double best = -1.0;
    for (int i = a; i <= b; ++i)
      for (int j = i + 1; j <= b; ++j)
        if (pts_[i].x >= pts_[j].x) {
          const double d = backward_pair_distance(pts_[i], pts_[j], y);
          best = std::max(best, d);
          offer_pair(ties, d, pts_[i], pts_[j], i, j);
        }
    return best;
  }

  // Ordered components: full canonical nodes plus up to two partial leaf
  // slices at the range boundary.
  const RangeCover cover = decompose(a, b);
  struct Comp {
    int lo;
    bool is_node;
    int node;
    int s, e;
  };
  std::vector<Comp> comps;
  for (int ni : cover.nodes)
    comps.push_back({nodes_[ni].lo, true, ni, 0, 0});
  for (const auto& [s, e] : cover.partial) comps.push_back({s, false, -1, s, e});
  std::sort(comps.begin(), comps.end(),
            [](const Comp& x, const Comp& z) { return x.lo < z.lo; });

  double best = -1.0;
  std::vector<std::size_t> node_comps;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const Comp& c = comps[k];
    if (c.is_node) {
      node_comps.push_back(k);
      continue;
    }
    for (int i = c.s; i <= c.e; ++i)
      for (int j = i + 1; j <= c.e; ++j)
        if (pts_[i].x >= pts_[j].x) {
          const double d = backward_pair_distance(pts_[i], pts_[j], y);
          best = std::max(best, d);
          offer_pair(ties, d, pts_[i], pts_[j], i, j);
        }
  }
  // Visit nodes and node pairs with the largest bounds first so the running
  // best tightens before the bulk of the candidates are reached.
  if (!cfg_.exhaustive_cross) {
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(node_comps.size());
    for (std::size_t k : node_comps)
      order.push_back({internal_ub(nodes_[comps[k].node], y), k});
    std::sort(order.begin(), order.end(), std::greater<>());
    for (std::size_t i = 0; i < order.size(); ++i) node_comps[i] = order[i].second;
  }
  for (std::size_t k : node_comps) internal_pairs(nodes_[comps[k].node], y, ties, best);

  std::vector<std::pair<std::size_t, std::size_t>> node_pairs;
  for (std::size_t u = 0; u < comps.size(); ++u)
    for (std::size_t w = u + 1; w < comps.size(); ++w) {
      const Comp& ca = comps[u];
      const Comp& cb = comps[w];
      if (ca.is_node && cb.is_node) {
        node_pairs.push_back({u, w});
      } else if (ca.is_node && !cb.is_node) {
        for (int j = cb.s; j <= cb.e; ++j)
          best = std::max(
              best, node_pairs_with_trail(nodes_[ca.node], pts_[j], j, y, ties));
      } else if (!ca.is_node && cb.is_node) {
        for (int i = ca.s; i <= ca.e; ++i)
          best = std::max(best,
                          node_pairs_with_lead(nodes_[cb.node], pts_[i], i, y, ties));
      } else {
        for (int i = ca.s; i <= ca.e; ++i)
          for (int j = cb.s; j <= cb.e; ++j)
            if (pts_[i].x >= pts_[j].x) {
              const double d = backward_pair_distance(pts_[i], pts_[j], y);
              best = std::max(best, d);
              offer_pair(ties, d, pts_[i], pts_[j], i, j);
            }
      }
    }
  if (!cfg_.exhaustive_cross) {
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(node_pairs.size());
    for (std::size_t i = 0; i < node_pairs.size(); ++i) {
      const OuterNode& a = nodes_[comps[node_pairs[i].first].node];
      const OuterNode& b = nodes_[comps[node_pairs[i].second].node];
      order.push_back({cross_ub(a, a.inner[0], b, b.inner[0], y), i});
    }
    std::sort(order.begin(), order.end(), std::greater<>());
    std::vector<std::pair<std::size_t, std::size_t>> sorted;
    sorted.reserve(node_pairs.size());
    for (const auto& [ub, i] : order) sorted.push_back(node_pairs[i]);
    node_pairs.swap(sorted);
  }
  for (const auto& [u, w] : node_pairs)
    cross_nodes(nodes_[comps[u].node], nodes_[comps[w].node], y, ties, best);
  return best;
}

double RangeIndex::backward_with_lead(int a, int b, const Point& lead, int lead_id,
                                      double y, TieCollector* ties) const {
  check_range(a, b);
  if (cfg_.mode == IndexMode::Brute || cfg_.exhaustive_cross) {
    double best = -1.0;
    for (int j = a; j <= b; ++j)
      if (lead.x >= pts_[j].x) {
        const double d = backward_pair_distance(lead, pts_[j], y);
        best = std::max(best, d);
        offer_pair(ties, d, lead, pts_[j], lead_id, j);
      }
    return best;
  }
  const RangeCover cover = decompose(a, b);
  double best = -1.0;
  for (int ni : cover.nodes)
    best = std::max(best, node_pairs_with_lead(nodes_[ni], lead, lead_id, y, ties));
  for (const auto& [s, e] : cover.partial)
    for (int j = s; j <= e; ++j)
      if (lead.x >= pts_[j].x) {
        const double d = backward_pair_distance(lead, pts_[j], y);
        best = std::max(best, d);
        offer_pair(ties, d, lead, pts_[j], lead_id, j);
      }
  return best;
}

double RangeIndex::backward_with_trail(int a, int b, const Point& trail, int trail_id,
                                       double y, TieCollector* ties) const {
  check_range(a, b);
  if (cfg_.mode == IndexMode::Brute || cfg_.exhaustive_cross) {
    double best = -1.0;
    for (int i = a; i <= b; ++i)
      if (pts_[i].x >= trail.x) {
        const double d = backward_pair_distance(pts_[i], trail, y);
        best = std::max(best, d);
        offer_pair(ties, d, pts_[i], trail, i, trail_id);
      }
    return best;
  }
  const RangeCover cover = decompose(a, b);
  double best = -1.0;
  for (int ni : cover.nodes)
    best = std::max(best, node_pairs_with_trail(nodes_[ni], trail, trail_id, y, ties));
  for (const auto& [s, e] : cover.partial)
    for (int i = s; i <= e; ++i)
      if (pts_[i].x >= trail.x) {
        const double d = backward_pair_distance(pts_[i], trail, y);
        best = std::max(best, d);
        offer_pair(ties, d, pts_[i], trail, i, trail_id);
      }
  return best;
}

// ---------------------------------------------------------------------------
// Serialization: "FQI1", little-endian, vertex array + node support payloads,
// trailing FNV-1a64 checksum. Deterministic structures (x-orders, hulls) are
// rebuilt on load and the stored payloads re-attached.

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

struct ChecksumWriter {
  std::ofstream out;
  std::uint64_t hash = kFnvOffset;
  explicit ChecksumWriter(const std::string& path)
      : out(path, std::ios::binary | std::ios::trunc) {}
  void write(const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) hash = (hash ^ b[i]) * kFnvPrime;
    out.write(static_cast<const char*>(p), len);
  }
  template <class T>
  void put(const T& v) {
    write(&v, sizeof(T));
  }
};

struct ChecksumReader {
  std::ifstream in;
  std::uint64_t hash = kFnvOffset;
  explicit ChecksumReader(const std::string& path) : in(path, std::ios::binary) {}
  void read(void* p, std::size_t len) {
    in.read(static_cast<char*>(p), len);
    if (!in) throw std::runtime_error("index file truncated");
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) hash = (hash ^ b[i]) * kFnvPrime;
  }
  template <class T>
  T get() {
    T v;
    read(&v, sizeof(T));
    return v;
  }
};

}  // namespace

void RangeIndex::save(const std::string& path) const {
  ChecksumWriter w(path);
  if (!w.out) throw std::runtime_error("cannot open index file for writing: " + path);
  w.write("FQI1", 4);
  w.put<std::uint32_t>(1);  // version
  w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg_.mode));
  w.put<std::uint8_t>(cfg_.exhaustive_cross ? 1 : 0);
  w.put<std::int32_t>(cfg_.leaf_size);
  w.put<std::int32_t>(cfg_.support_cap);
  w.put<double>(cfg_.window_margin);
  w.put<std::uint8_t>(cfg_.build_supports ? 1 : 0);
  w.put<std::uint64_t>(pts_.size());
  for (const Point& p : pts_) {
    w.put<double>(p.x);
    w.put<double>(p.y);
  }
  if (cfg_.mode == IndexMode::Fast) {
    w.put<double>(window_lo_);
    w.put<double>(window_hi_);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(nodes_.size()));
    for (const OuterNode& n : nodes_) {
      w.put<std::int32_t>(n.lo);
      w.put<std::int32_t>(n.hi);
      w.put<std::uint8_t>(n.support_ok ? 1 : 0);
      w.put<std::uint32_t>(static_cast<std::uint32_t>(n.support.size()));
      for (const auto& [i, j] : n.support) {
        w.put<std::uint32_t>(i);
        w.put<std::uint32_t>(j);
      }
    }
  }
  const std::uint64_t digest = w.hash;  // copy: put() mutates the running hash
  w.put<std::uint64_t>(digest);
  if (!w.out) throw std::runtime_error("write failed: " + path);
}

RangeIndex RangeIndex::load(const std::string& path) {
  ChecksumReader r(path);
  if (!r.in) throw std::runtime_error("cannot open index file: " + path);
  char magic[4];
  r.read(magic, 4);
  if (std::memcmp(magic, "FQI1", 4) != 0)
    throw std::runtime_error("not an FQI1 index file: " + path);
  if (r.get<std::uint32_t>() != 1) throw std::runtime_error("unsupported index version");

  IndexConfig cfg;
  cfg.mode = static_cast<IndexMode>(r.get<std::uint8_t>());
  cfg.exhaustive_cross = r.get<std::uint8_t>() != 0;
  cfg.leaf_size = r.get<std::int32_t>();
  cfg.support_cap = r.get<std::int32_t>();
  cfg.window_margin = r.get<double>();
  cfg.build_supports = r.get<std::uint8_t>() != 0;
  const std::uint64_t n = r.get<std::uint64_t>();
  if (n == 0 || n > (1ULL << 32))
    throw std::runtime_error("index file corrupt: bad vertex count");
  Trajectory traj;
  traj.pts.resize(n);
  for (auto& p : traj.pts) {
    p.x = r.get<double>();
    p.y = r.get<double>();
  }

  RangeIndex idx;
  idx.build_skeleton(traj, cfg);
  if (cfg.mode == IndexMode::Fast) {
    const double wlo = r.get<double>();
    const double whi = r.get<double>();
    if (wlo != idx.window_lo_ || whi != idx.window_hi_)
      throw std::runtime_error("index file corrupt: window mismatch");
    const std::uint32_t node_count = r.get<std::uint32_t>();
    if (node_count != idx.nodes_.size())
      throw std::runtime_error("index file corrupt: node count mismatch");
    for (OuterNode& node : idx.nodes_) {
      const std::int32_t lo = r.get<std::int32_t>();
      const std::int32_t hi = r.get<std::int32_t>();
      if (lo != node.lo || hi != node.hi)
        throw std::runtime_error("index file corrupt: node range mismatch");
      node.support_ok = r.get<std::uint8_t>() != 0;
      const std::uint32_t cnt = r.get<std::uint32_t>();
      if (cnt > (n * (n + 1)) / 2)
        throw std::runtime_error("index file corrupt: support size");
      node.support.resize(cnt);
      for (auto& [i, j] : node.support) {
        i = r.get<std::uint32_t>();
        j = r.get<std::uint32_t>();
        if (i >= n || j >= n)
          throw std::runtime_error("index file corrupt: support vertex id");
      }
    }
  }
  const std::uint64_t computed = r.hash;
  const std::uint64_t stored = r.get<std::uint64_t>();
  if (stored != computed) throw std::runtime_error("index file corrupt: bad checksum");
  return idx;
}

RangeIndex::Stats RangeIndex::stats() const {
  Stats s;
  s.node_count = nodes_.size();
  for (const OuterNode& n : nodes_) {
    s.support_pairs += n.support.size();
    if (n.left >= 0 && !n.support_ok) ++s.fallback_nodes;
  }
  s.window_lo = window_lo_;
  s.window_hi = window_hi_;
  return s;
}

}  // namespace fq
