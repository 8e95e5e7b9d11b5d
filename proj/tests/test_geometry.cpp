#include <cmath>
#include <optional>

#include "doctest.h"
#include "fq/geometry.hpp"
#include "test_util.hpp"

using namespace fq;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("distance basics") {
  CHECK(dist({0, 0}, {3, 4}) == doctest::Approx(5).epsilon(1e-12));
  CHECK(dist({1, 1}, {1, 1}) == 0.0);
  CHECK(dist({0, 0}, {1, 0}) == 1.0);
}

TEST_CASE("projection clamps onto the segment") {
  const HorizontalSegment q(0, 2, 0);
  CHECK(project_onto_segment({5, 3}, q) == Point{2, 0});
  CHECK(project_onto_segment({1, 3}, q) == Point{1, 0});
  CHECK(project_onto_segment({-1, 0}, q) == Point{0, 0});
}

TEST_CASE("segment endpoints must be ordered") {
  CHECK_THROWS_AS(HorizontalSegment(2, 0, 1), std::invalid_argument);
}

TEST_CASE("bisector crossing with a horizontal line") {
  auto x = bisector_x_on_line({2, 1}, {4, 1}, 0);
  REQUIRE(x.has_value());
  CHECK(*x == doctest::Approx(3).epsilon(1e-12));

  CHECK_FALSE(bisector_x_on_line({0, 0}, {0, 2}, 5).has_value());

  x = bisector_x_on_line({2, 1}, {0, -1}, 0);
  REQUIRE(x.has_value());
  CHECK(*x == doctest::Approx(1).epsilon(1e-12));

  // degenerate pair: no bisector
  CHECK_FALSE(bisector_x_on_line({1, 1}, {1, 1}, 0).has_value());

  // the bisector IS the query line: convention is the shared x
  x = bisector_x_on_line({0, 0}, {0, 2}, 1);
  REQUIRE(x.has_value());
  CHECK(*x == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("bisector point is equidistant") {
  fqtest::Rand r(11);
  for (int i = 0; i < 500; ++i) {
    const Point a{r.in(-5, 5), r.in(-5, 5)};
    const Point b{r.in(-5, 5), r.in(-5, 5)};
    const double y = r.in(-5, 5);
    const auto x = bisector_x_on_line(a, b, y);
    if (!x) continue;
    const Point s{*x, y};
    CHECK(dist(a, s) == doctest::Approx(dist(b, s)).epsilon(1e-7));
  }
}

TEST_CASE("backward pair distance, fixed cases") {
  CHECK(backward_pair_distance({1, 0}, {-1, 0}, 0) == doctest::Approx(1).epsilon(1e-12));
  CHECK(backward_pair_distance({1, 0}, {-1, 0}, 1) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(backward_pair_distance({0, 0}, {0, 0}, 5) == doctest::Approx(5).epsilon(1e-12));
  CHECK(backward_pair_distance({2, 1}, {0, -1}, 0) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

namespace {

// Independent reference: the max of two point distances along the line is
// convex in x, so ternary search converges to its minimum.
double bwd_ternary(const Point& a, const Point& b, double y) {
  double lo = std::min(a.x, b.x) - 1.0 - dist(a, b);
  double hi = std::max(a.x, b.x) + 1.0 + dist(a, b);
  auto f = [&](double x) {
    return std::max(dist(a, {x, y}), dist(b, {x, y}));
  };
  for (int i = 0; i < 300; ++i) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (f(m1) <= f(m2))
      hi = m2;
    else
      lo = m1;
  }
  return f(0.5 * (lo + hi));
}

}  // namespace

TEST_CASE("backward pair distance equals ternary-search reference") {
  fqtest::Rand r(23);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Point a{r.in(-8, 8), r.in(-8, 8)};
    const Point b{r.in(-8, 8), r.in(-8, 8)};
    const double y = r.in(-8, 8);
    const double mine = backward_pair_distance(a, b, y);
    const double ref = bwd_ternary(a, b, y);
    worst = std::max(worst, std::abs(mine - ref));
    CHECK(std::abs(mine - ref) < 1e-7);
    CHECK(mine <= ref + 1e-9);  // never above the true minimum
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("point to general segment distance") {
  CHECK(point_segment_dist({0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(1));
  CHECK(point_segment_dist({3, 0}, {-1, 0}, {1, 0}) == doctest::Approx(2));
  CHECK(point_segment_dist({0, 0}, {0, 0}, {0, 0}) == doctest::Approx(0));
}

TEST_CASE("positions canonicalize and order") {
  const Trajectory t = fqtest::make({{0, 0}, {2, 0}, {4, 0}});
  CHECK(point_at(t, {0, 0.5}) == Point{1, 0});
  CHECK(point_at(t, {0, 1.0}) == Point{2, 0});
  CHECK(canonical_pos({0, 1.0}, t.size()).edge == 1);  // rolls onto next edge
  CHECK(canonical_pos({1, 1.0}, t.size()).fraction == 1.0);  // curve end stays
  CHECK(pos_end(t).key() == doctest::Approx(2.0));
  CHECK_THROWS_AS(canonical_pos({5, 0.0}, t.size()), std::invalid_argument);
  CHECK_THROWS_AS(canonical_pos({0, 1.5}, t.size()), std::invalid_argument);

  int vtx = -1;
  CHECK(pos_at_vertex({0, 1.0}, t.size(), vtx));
  CHECK(vtx == 1);
  CHECK_FALSE(pos_at_vertex({0, 0.25}, t.size(), vtx));
}

TEST_SUITE_END();
