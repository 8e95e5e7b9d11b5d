#include "fq/geometry.hpp"

#include <algorithm>

namespace fq {

TrajectoryPos canonical_pos(TrajectoryPos pos, std::size_t n) {
  if (n == 0) throw std::invalid_argument("position on empty trajectory");
  if (n == 1) {
    if (pos.edge != 0 || pos.fraction != 0.0)
      throw std::invalid_argument("single-vertex trajectory has only position (0,0)");
    return {0, 0.0};
  }
  const int nedges = static_cast<int>(n) - 1;
  if (pos.edge < 0 || pos.edge >= nedges)
    throw std::invalid_argument("position edge out of range");
  if (!(pos.fraction >= 0.0 && pos.fraction <= 1.0) || !std::isfinite(pos.fraction))
    throw std::invalid_argument("position fraction outside [0,1]");
  if (pos.fraction == 1.0) {
    if (pos.edge == nedges - 1) return pos;  // curve end keeps fraction 1
    return {pos.edge + 1, 0.0};
  }
  return pos;
}

Point point_at(const Trajectory& traj, TrajectoryPos pos) {
  pos = canonical_pos(pos, traj.size());
  if (traj.size() == 1) return traj[0];
  const Point& a = traj[pos.edge];
  const Point& b = traj[pos.edge + 1];
  return {a.x + pos.fraction * (b.x - a.x), a.y + pos.fraction * (b.y - a.y)};
}

bool pos_at_vertex(TrajectoryPos pos, std::size_t n, int& vertex_out) {
  pos = canonical_pos(pos, n);
  if (n == 1) {
    vertex_out = 0;
    return true;
  }
  if (pos.fraction == 0.0) {
    vertex_out = pos.edge;
    return true;
  }
  if (pos.fraction == 1.0) {
    vertex_out = pos.edge + 1;
    return true;
  }
  return false;
}

Point project_onto_segment(const Point& r, const HorizontalSegment& seg) {
  return {std::clamp(r.x, seg.x0, seg.x1), seg.y};
}

std::optional<double> bisector_x_on_line(const Point& a, const Point& b, double y) {
  if (a == b) return std::nullopt;
  if (a.x == b.x) {
    // Bisector is the horizontal line through the midpoint; it meets the
    // query line only if the two coincide, and then every x qualifies. The
    // midpoint x is the canonical representative.
    const double mid_y = 0.5 * (a.y + b.y);
    if (std::abs(y - mid_y) <= kTol) return a.x;
    return std::nullopt;
  }
  // Solve |(x,y)-a| = |(x,y)-b| for x.
  const double num = (b.x - a.x) * (b.x + a.x) + (a.y - b.y) * (2.0 * y - a.y - b.y);
  return num / (2.0 * (b.x - a.x));
}

double backward_pair_distance(const Point& a, const Point& b, double y) {
  if (a == b) return std::abs(y - a.y);
  // max(dist to a, dist to b) along the line is piecewise convex in x; its
  // minimum is at the bisector crossing or at the foot of one of the points.
  auto value_at = [&](double x) {
    const Point s{x, y};
    return std::max(dist(a, s), dist(b, s));
  };
  double best = std::min(value_at(a.x), value_at(b.x));
  if (auto bx = bisector_x_on_line(a, b, y)) best = std::min(best, value_at(*bx));
  return best;
}

double point_segment_dist(const Point& r, const Point& a, const Point& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return dist(r, a);
  double t = ((r.x - a.x) * dx + (r.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return dist(r, {a.x + t * dx, a.y + t * dy});
}

}  // namespace fq
