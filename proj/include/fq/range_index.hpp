#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fq/breakdown.hpp"
#include "fq/geometry.hpp"

namespace fq {

enum class IndexMode : std::uint8_t { Brute = 0, Fast = 1 };

struct IndexConfig {
  IndexMode mode = IndexMode::Fast;
  // When set, cross-node backward pairs are evaluated by the guaranteed
  // O(|A|*|B|) loop instead of the hull divide-and-conquer. The verification
  // suites keep this on; benchmarks turn it off.
  bool exhaustive_cross = true;
  int leaf_size = 8;
  // Backward-pair support lists larger than this mark the node for on-the-fly
  // evaluation instead. The default keeps every node listed for uniform random
  // inputs up to ~10^4 vertices.
  int support_cap = 512;
  // Support lists certify the height window [min_y - M, max_y + M] with
  // M = window_margin * (bbox diagonal + 1); queries outside fall back to
  // recursive evaluation.
  double window_margin = 8.0;
  bool build_supports = true;
};

// Preprocessed trajectory answering, over any inclusive vertex range [a,b],
// the three directed-Hausdorff sub-terms and the maximum backward-pair
// distance at a height y. Two implementations live behind this interface:
// a balanced range-decomposition tree (Fast) and plain scans (Brute).
//
// Hausdorff queries return 0 when no vertex qualifies; backward queries
// return -1 when the range holds no backward pair. When a TieCollector is
// supplied it receives every witness within the tie tolerance of the best
// (term field left at its default; callers tag it).
class RangeIndex {
 public:
  static RangeIndex build(const Trajectory& traj, const IndexConfig& cfg = {});

  const IndexConfig& config() const { return cfg_; }
  IndexMode mode() const { return cfg_.mode; }
  std::size_t size() const { return pts_.size(); }
  const Point& vertex(int i) const { return pts_[i]; }
  const std::vector<Point>& vertices() const { return pts_; }

  // max dist(p, p_i) over i in [a,b] with p_i.x <= p.x
  double hausdorff_left(int a, int b, const Point& p, TieCollector* ties = nullptr) const;
  // max dist(q, p_i) over i in [a,b] with p_i.x >= q.x
  double hausdorff_right(int a, int b, const Point& q, TieCollector* ties = nullptr) const;
  // max |y - p_i.y| over i in [a,b]
  double hausdorff_mid(int a, int b, double y, TieCollector* ties = nullptr) const;
  // max backward-pair distance over pairs i < j inside [a,b]
  double backward_max(int a, int b, double y, TieCollector* ties = nullptr) const;
  // max over pairs (lead, p_j), j in [a,b], lead.x >= p_j.x; `lead` precedes
  // the range in traversal order (witness index lead_id).
  double backward_with_lead(int a, int b, const Point& lead, int lead_id, double y,
                            TieCollector* ties = nullptr) const;
  // max over pairs (p_i, trail), i in [a,b], p_i.x >= trail.x
  double backward_with_trail(int a, int b, const Point& trail, int trail_id, double y,
                             TieCollector* ties = nullptr) const;

  void save(const std::string& path) const;
  static RangeIndex load(const std::string& path);

  // Introspection for tests and diagnostics.
  struct Stats {
    std::size_t node_count = 0;
    std::size_t support_pairs = 0;
    std::size_t fallback_nodes = 0;
    double window_lo = 0.0;
    double window_hi = 0.0;
  };
  Stats stats() const;

 private:
  RangeIndex() = default;

  struct InnerNode {
    int lo = 0, hi = 0;  // slice [lo,hi) of the owning node's xorder
    int left = -1, right = -1;
    double min_y = 0.0, max_y = 0.0;  // y extent of the slice, for pruning bounds
    std::vector<std::pair<Point, int>> hull;  // extreme points with vertex ids
  };

  struct OuterNode {
    int lo = 0, hi = 0;  // inclusive vertex range
    int left = -1, right = -1;
    double min_y = 0.0, max_y = 0.0;
    int argmin_y = -1, argmax_y = -1;
    std::vector<int> xorder;  // vertex ids sorted by (x, y, id)
    std::vector<InnerNode> inner;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> support;
    bool support_ok = false;  // false: evaluate internal pairs by recursion
  };

  struct RangeCover {
    std::vector<int> nodes;                    // full canonical nodes, in order
    std::vector<std::pair<int, int>> partial;  // boundary slices, in order
  };

  void build_skeleton(const Trajectory& traj, const IndexConfig& cfg);
  void build_supports();
  int build_tree(int lo, int hi);
  void build_node_payload(OuterNode& n);
  void build_inner(OuterNode& n, int lo, int hi);
  void build_leaf_support(OuterNode& n);
  void build_internal_support(OuterNode& n);

  RangeCover decompose(int a, int b) const;
  void check_range(int a, int b) const;

  double inner_min_x(const OuterNode& n, const InnerNode& b) const;
  double inner_max_x(const OuterNode& n, const InnerNode& b) const;

  template <class FullBlock, class Single>
  void cover_prefix(const OuterNode& n, int ii, double x_max, FullBlock&& fb,
                    Single&& s) const;
  template <class FullBlock, class Single>
  void cover_suffix(const OuterNode& n, int ii, double x_min, FullBlock&& fb,
                    Single&& s) const;

  void internal_pairs(const OuterNode& n, double y, TieCollector* ties,
                      double& best) const;
  void cross_nodes(const OuterNode& a, const OuterNode& b, double y,
                   TieCollector* ties, double& best) const;
  void cross_dc(const OuterNode& na, int ia, const OuterNode& nb, int ib, double y,
                TieCollector* ties, double& best, double ub_in = -1.0) const;
  double cross_ub(const OuterNode& na, const InnerNode& A, const OuterNode& nb,
                  const InnerNode& B, double y) const;
  double cross_corner_ub(const OuterNode& na, const InnerNode& A, const OuterNode& nb,
                         const InnerNode& B, double y) const;
  double internal_ub(const OuterNode& n, double y) const;
  double internal_corner_ub(const OuterNode& n, double y) const;
  double node_pairs_with_lead(const OuterNode& n, const Point& lead, int lead_id,
                              double y, TieCollector* ties) const;
  double node_pairs_with_trail(const OuterNode& n, const Point& trail, int trail_id,
                               double y, TieCollector* ties) const;

  IndexConfig cfg_{};
  std::vector<Point> pts_;
  std::vector<OuterNode> nodes_;  // pre-order; root at 0 when non-empty
  double window_lo_ = 0.0, window_hi_ = 0.0;
};

}  // namespace fq
