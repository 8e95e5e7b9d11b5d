#pragma once

#include <optional>
#include <vector>

#include "fq/breakdown.hpp"
#include "fq/geometry.hpp"
#include "fq/range_index.hpp"

namespace fq {

enum class SplitMode : std::uint8_t { ExactCandidates = 0, Bisection = 1 };

enum class StepDirection { Left, Right, Stop };

// First/last trajectory vertex with position inside [u, v]; absent when the
// subtrajectory lies strictly inside one edge.
struct VertexSpan {
  int first = -1;
  int last = -1;
  bool exists() const { return first >= 0; }
};
VertexSpan vertex_span(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v);

// The points where the first and last subtrajectory vertices are matched on
// the query segment. Computing the distance does not need them; they pin down
// an optimal matching and split the computation into three independent parts.
struct SplitResult {
  Point p_prime{};
  Point q_prime{};         // q_prime.x >= p_prime.x
  double f_value = 0.0;    // distance reassembled from the three split parts
  SplitMode mode = SplitMode::ExactCandidates;
};

struct QueryOptions {
  SplitMode mode = SplitMode::ExactCandidates;
  bool want_split = true;
  // Band inside which a term counts as attaining (and its witnesses are
  // collected). Callers inspecting a numerically converged optimum widen it.
  double tie_tol = kTieTol;
};

struct QueryResult {
  FrechetBreakdown breakdown;
  std::optional<SplitResult> split;  // absent for single-segment subtrajectories
  int decision_steps = 0;            // direction decisions taken (bisection mode)
};

// F(s): the distance when the first subtrajectory vertex is matched to s on
// the segment. The returned six-slot breakdown folds dist(first vertex, s)
// into the UP slot together with dist(u, p): both belong to the leading
// segment-vs-segment part of the split decomposition.
// Throws std::logic_error when [u, v] contains no vertex.
FrechetBreakdown eval_F(const Point& s, const Trajectory& traj, TrajectoryPos u,
                        TrajectoryPos v, const HorizontalSegment& seg,
                        const RangeIndex& idx);

// Direction toward the minimizer of F from s (Stop: s is optimal within
// tolerance, or opposing subgradients bracket the optimum at s).
StepDirection decide_p_prime(const Point& s, const Trajectory& traj, TrajectoryPos u,
                             TrajectoryPos v, const HorizontalSegment& seg,
                             const RangeIndex& idx);

// Sorted deduplicated x-coordinates on the segment guaranteed to contain a
// minimizer of F: both segment ends, clamped vertex projections, and the
// crossings of the first-vertex bisectors with the segment.
std::vector<double> build_candidate_set_p(const Trajectory& traj, TrajectoryPos u,
                                          TrajectoryPos v, const HorizontalSegment& seg);

// Minimizer of F on the segment. Exact mode scans the candidate set and
// returns the leftmost optimum; bisection mode follows decide_p_prime.
// `steps` (optional) accumulates the number of direction decisions.
Point compute_p_prime(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                      const HorizontalSegment& seg, const RangeIndex& idx,
                      SplitMode mode, int* steps = nullptr);

// Second stage on the segment [p_prime, q]: G(t) fixes the match of the first
// vertex at p_prime and moves the match t of the last vertex. The Hausdorff
// pull now discards the left side (the segment grows rightward), the
// last-vertex pull is toward that vertex.
StepDirection decide_q_prime(const Point& t, const Trajectory& traj, TrajectoryPos u,
                             TrajectoryPos v, const HorizontalSegment& seg,
                             const Point& p_prime, const RangeIndex& idx);

std::vector<double> build_candidate_set_q(const Trajectory& traj, TrajectoryPos u,
                                          TrajectoryPos v, const HorizontalSegment& seg,
                                          const Point& p_prime);

Point compute_q_prime(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                      const HorizontalSegment& seg, const Point& p_prime,
                      const RangeIndex& idx, SplitMode mode, int* steps = nullptr);

// Exact distance between pi[u,v] and the segment with the full six-term
// breakdown, evaluated through the index. When want_split is set and the
// subtrajectory has a vertex, the split points are computed as well and
// split->f_value cross-checks the breakdown value.
QueryResult frechet_query(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                          const HorizontalSegment& seg, const RangeIndex& idx,
                          const QueryOptions& opts = {});

}  // namespace fq
