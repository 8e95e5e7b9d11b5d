#pragma once

#include <vector>

#include "fq/breakdown.hpp"
#include "fq/geometry.hpp"

// Reference implementations used to verify the query engine. Everything here
// is correctness-first: plain scans, quadratic pair loops, free-space diagrams
// and golden-section searches, with no shared code or data structures from the
// indexed query path.

namespace fq {

// The subtrajectory pi[u,v] materialized as an explicit polyline. ids[i] is
// the global vertex index of pts[i], or kWitnessU / kWitnessV when the point
// is a non-vertex endpoint. first_vertex/last_vertex are the global indices of
// the first and last trajectory vertices inside [u,v] (-1 when none exists).
struct SubtrajPoints {
  std::vector<Point> pts;
  std::vector<int> ids;
  int first_vertex = -1;
  int last_vertex = -1;
};

// Throws std::invalid_argument when u > v (after canonicalization).
SubtrajPoints subtrajectory_vertices(const Trajectory& traj, TrajectoryPos u,
                                     TrajectoryPos v);

// Frechet distance between pi[u,v] and seg evaluated directly from the
// six-term decomposition over the materialized points. O(m^2) in the number
// of subtrajectory points because of the all-pairs backward loop.
FrechetBreakdown frechet_formula_scan(const Trajectory& traj, TrajectoryPos u,
                                      TrajectoryPos v, const HorizontalSegment& seg);

// Frechet distance between pi[u,v] and seg computed by the classical
// free-space-diagram decision procedure with bisection over the O(m^2)
// critical values. Fully independent of the formula above.
double frechet_freespace(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                         const HorizontalSegment& seg);

// Decision procedure on its own (exposed for tests): is the Frechet distance
// between the polyline and seg at most eps?
bool freespace_decision(const std::vector<Point>& poly, const HorizontalSegment& seg,
                        double eps);

struct VerticalOracleResult {
  double y_star = 0.0;
  double value = 0.0;
};

// Best vertical placement of the segment [x1,x2] (golden-section over the
// height, objective evaluated with frechet_formula_scan).
VerticalOracleResult brute_force_vertical_opt(const Trajectory& traj, TrajectoryPos u,
                                              TrajectoryPos v, double x1, double x2);

struct PlacementOracleResult {
  double x1_star = 0.0;
  double y_star = 0.0;
  double value = 0.0;
};

// Best placement of a segment of length L >= 0 anywhere in the plane:
// golden-section over the left endpoint x with the vertical oracle inside,
// then a local grid refinement around the best point found.
PlacementOracleResult brute_force_placement_opt(const Trajectory& traj, TrajectoryPos u,
                                                TrajectoryPos v, double L);

// Bracket helpers shared with the optimizers' documentation: the optima are
// searched inside the subtrajectory bounding box expanded by its diameter.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};
Bracket vertical_bracket(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                         double x1, double x2);
Bracket horizontal_bracket(const Trajectory& traj, TrajectoryPos u, TrajectoryPos v,
                           double L);

}  // namespace fq
