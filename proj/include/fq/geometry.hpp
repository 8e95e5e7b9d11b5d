#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fq/constants.hpp"

namespace fq {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point& a, const Point& b) {
    return a.x == b.x && a.y == b.y;
  }
};

inline double dist(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Horizontal segment from (x0, y) to (x1, y), x0 <= x1. x0 == x1 is the
// degenerate (point) segment and is legal everywhere.
struct HorizontalSegment {
  double x0 = 0.0;
  double x1 = 0.0;
  double y = 0.0;

  HorizontalSegment() = default;
  HorizontalSegment(double x0_, double x1_, double y_) : x0(x0_), x1(x1_), y(y_) {
    if (!(x0 <= x1)) throw std::invalid_argument("HorizontalSegment: x0 > x1");
  }

  Point p() const { return {x0, y}; }
  Point q() const { return {x1, y}; }
  double length() const { return x1 - x0; }
};

// Polygonal curve. Consecutive duplicate vertices are permitted (they occur
// naturally in recorded tracks); has_consecutive_duplicates() reports them so
// callers can warn.
struct Trajectory {
  std::vector<Point> pts;

  Trajectory() = default;
  explicit Trajectory(std::vector<Point> p) : pts(std::move(p)) {}

  std::size_t size() const { return pts.size(); }
  const Point& operator[](std::size_t i) const { return pts[i]; }

  bool has_consecutive_duplicates() const {
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (pts[i] == pts[i - 1]) return true;
    return false;
  }

  // Number of edges; 0 for a single-vertex curve.
  std::size_t edges() const { return pts.size() <= 1 ? 0 : pts.size() - 1; }
};

// Position on a trajectory: a point on edge `edge` at parameter `fraction`.
// Canonical form: fraction in [0,1), except the curve end which is
// (last edge, 1). For a single-vertex curve the only position is (0, 0).
struct TrajectoryPos {
  int edge = 0;
  double fraction = 0.0;

  // Along-curve ordering key. Vertex k has key exactly k.
  double key() const { return static_cast<double>(edge) + fraction; }
};

TrajectoryPos canonical_pos(TrajectoryPos pos, std::size_t n);
Point point_at(const Trajectory& traj, TrajectoryPos pos);

inline TrajectoryPos pos_start(const Trajectory&) { return {0, 0.0}; }
inline TrajectoryPos pos_end(const Trajectory& traj) {
  if (traj.size() <= 1) return {0, 0.0};
  return {static_cast<int>(traj.size()) - 2, 1.0};
}

// True if the position sits exactly on vertex k; fills k.
bool pos_at_vertex(TrajectoryPos pos, std::size_t n, int& vertex_out);

// Closest point on the segment to r: (clamp(r.x, [x0,x1]), y).
Point project_onto_segment(const Point& r, const HorizontalSegment& seg);

// x-coordinate where the perpendicular bisector of a and b crosses the
// horizontal line at height y. Absent when a == b, and when a.x == b.x
// (horizontal bisector) unless that bisector is the query line itself, in
// which case the shared x of a and b is returned.
std::optional<double> bisector_x_on_line(const Point& a, const Point& b, double y);

// min over x of max(dist(a,(x,y)), dist(b,(x,y))): the smallest leash that
// lets a point confined to the line at height y dominate both a and b.
// For a == b this degenerates to |y - a.y|.
double backward_pair_distance(const Point& a, const Point& b, double y);

// Distance from point r to the segment ab (general segment, used by oracles).
double point_segment_dist(const Point& r, const Point& a, const Point& b);

}  // namespace fq
