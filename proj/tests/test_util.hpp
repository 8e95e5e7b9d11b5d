#pragma once

#include <random>
#include <utility>
#include <vector>

#include "fq/geometry.hpp"

// Shared generators for the randomized suites. Seeds are fixed per test so
// runs are reproducible.
namespace fqtest {

inline fq::Trajectory make(std::vector<fq::Point> pts) {
  return fq::Trajectory(std::move(pts));
}

struct Rand {
  std::mt19937 g;
  explicit Rand(unsigned seed) : g(seed) {}
  double in(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(g);
  }
  int below(int n) { return static_cast<int>(g() % static_cast<unsigned>(n)); }
};

inline fq::Trajectory random_traj(Rand& r, int n, double lo = -10.0, double hi = 10.0) {
  std::vector<fq::Point> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) p = {r.in(lo, hi), r.in(lo, hi)};
  return fq::Trajectory(std::move(pts));
}

inline fq::TrajectoryPos random_pos(Rand& r, const fq::Trajectory& t) {
  if (t.size() <= 1) return fq::pos_start(t);
  return fq::canonical_pos({r.below(static_cast<int>(t.edges())), r.in(0.0, 1.0)},
                           t.size());
}

// Ordered pair of positions, endpoints kept off the vertices.
inline std::pair<fq::TrajectoryPos, fq::TrajectoryPos> random_span(Rand& r,
                                                                   const fq::Trajectory& t) {
  if (t.size() <= 1) return {fq::pos_start(t), fq::pos_start(t)};
  fq::TrajectoryPos u{r.below(static_cast<int>(t.edges())), r.in(0.01, 0.99)};
  fq::TrajectoryPos v{r.below(static_cast<int>(t.edges())), r.in(0.01, 0.99)};
  if (u.key() > v.key()) std::swap(u, v);
  return {u, v};
}

}  // namespace fqtest
