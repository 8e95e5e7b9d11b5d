#pragma once

#include <array>
#include <vector>

#include "fq/breakdown.hpp"
#include "fq/geometry.hpp"
#include "fq/range_index.hpp"

// Optimal placement of a horizontal segment against a subtrajectory: best
// height for a fixed strip (decide_vertical / optimize_vertical) and best
// rigid translation of a fixed-length segment (decide_horizontal /
// optimize_placement). Both are bisections driven by local decision
// procedures that read the attaining terms of a distance breakdown.

namespace fq {

enum class VerticalDecision { Up, Down, Stop };
enum class HorizontalDecision { Left, Right, Stop };

const char* vertical_decision_name(VerticalDecision d);
const char* horizontal_decision_name(HorizontalDecision d);

// Constraint implied by one attaining term at a stopped vertical optimum
// with value d. Moving the segment so that its left endpoint enters the
// disk (C1Disk), or so that its supporting line moves into the half-plane
// (C2HalfPlane), strictly decreases that term. Disk centers anchored at the
// right segment endpoint are already translated left by the segment length,
// so every constraint talks about the left endpoint.
struct TermClass {
  Term term = Term::UP;
  enum Kind { C1Disk, C2HalfPlane } kind = C1Disk;
  Point center{};        // C1Disk only
  double radius = 0.0;   // C1Disk only, equals the distance value
  bool above = false;    // C2HalfPlane: strictly above (true) or below
  bool on_line = false;  // C2HalfPlane witness sits on the current line
};

// Which way must the segment [x1,x2] x {y_c} move vertically to get closer
// to pi[u,v]? Stop means no strictly improving direction exists: the
// distance is already ~0, some witness pins the current height, or two
// attaining terms pull in opposite directions.
VerticalDecision decide_vertical(const Trajectory& traj, TrajectoryPos u,
                                 TrajectoryPos v, double x1, double x2,
                                 double y_c, const RangeIndex& idx);

struct VerticalOpt {
  double y_star = 0.0;
  double value = 0.0;
  FrechetBreakdown breakdown;  // at (x1, x2, y_star)
  int steps = 0;               // bisection iterations
};

// Best height for the segment spanning [x1,x2]: bisection on y driven by
// decide_vertical. Returns the best placement actually evaluated.
VerticalOpt optimize_vertical(const Trajectory& traj, TrajectoryPos u,
                              TrajectoryPos v, double x1, double x2,
                              const RangeIndex& idx);

// Maps each attaining witness of `bd` (a breakdown of the distance between a
// subtrajectory and the placed segment l_c of length L) to its constraint.
std::vector<TermClass> classify_terms(const FrechetBreakdown& bd,
                                      const HorizontalSegment& l_c, double L);

// Which way must the left endpoint of a length-L segment move from x1_c?
// Internally optimizes the height at x1_c, classifies the attaining terms
// and intersects their constraint regions; an empty region, or one that
// does not lie strictly to one side of the left endpoint, means Stop.
HorizontalDecision decide_horizontal(const Trajectory& traj, TrajectoryPos u,
                                     TrajectoryPos v, double L, double x1_c,
                                     const RangeIndex& idx);

struct PlacementOpt {
  double x1_star = 0.0;
  double y_star = 0.0;
  double value = 0.0;
  FrechetBreakdown breakdown;  // at ((x1_star, x1_star + L), y_star)
  int steps = 0;               // outer bisection iterations
};

// Best placement anywhere in the plane of a horizontal segment of length L:
// bisection on the left endpoint driven by decide_horizontal, with the
// height optimized at every probe, then a golden-section polish of the
// height-optimized value over the bracket left when the bisection stopped.
// Returns the best placement evaluated.
PlacementOpt optimize_placement(const Trajectory& traj, TrajectoryPos u,
                                TrajectoryPos v, double L,
                                const RangeIndex& idx);

// Building blocks of the horizontal decision, exposed for direct testing.

// Emptiness of the common interior of open disks of one radius whose
// boundaries all pass through p (given by their centers) and up to two open
// horizontal half-planes bounded by the line through p. Decided exactly:
// near p the intersection is nonempty iff the constraints' inward normals
// fit in an open half-circle.
bool region_empty(const Point& p, double radius,
                  const std::vector<Point>& centers, bool half_above,
                  bool half_below);

// Sampling cross-check for region_empty (directional sweep with a few radii
// per direction). One-sided up to resolution: "nonempty" is certain,
// "empty" may miss a sliver thinner than the sweep step.
bool region_empty_sampled(const Point& p, double radius,
                          const std::vector<Point>& centers, bool half_above,
                          bool half_below, int samples = 10000);

// Insertion rule for shrinking an empty intersection certificate to three
// disks: scanning centers in order, the first disk whose insertion empties
// the intersection is returned together with the two extreme disks of the
// arc maintained so far. Returns indices into `centers`, possibly with
// repeats when fewer than three disks already suffice; {-1,-1,-1} when the
// whole intersection is nonempty.
std::array<int, 3> reduce_disks_three(const Point& p, double radius,
                                      const std::vector<Point>& centers);

}  // namespace fq
