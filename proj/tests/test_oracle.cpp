#include <cmath>

#include "doctest.h"
#include "fq/oracle.hpp"
#include "test_util.hpp"

using namespace fq;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("subtrajectory materialization") {
  const Trajectory t = fqtest::make({{0, 0}, {2, 0}, {4, 0}});
  auto s = subtrajectory_vertices(t, {0, 0.5}, {1, 1.0});
  REQUIRE(s.pts.size() == 3);
  CHECK(s.pts[0] == Point{1, 0});
  CHECK(s.pts[1] == Point{2, 0});
  CHECK(s.pts[2] == Point{4, 0});
  CHECK(s.first_vertex == 1);
  CHECK(s.last_vertex == 2);

  s = subtrajectory_vertices(t, {0, 0.5}, {0, 0.5});
  REQUIRE(s.pts.size() == 1);
  CHECK(s.pts[0] == Point{1, 0});
  CHECK(s.first_vertex == -1);

  s = subtrajectory_vertices(t, {0, 0.0}, {1, 1.0});
  CHECK(s.pts.size() == 3);
  CHECK_THROWS_AS(subtrajectory_vertices(t, {1, 0.5}, {0, 0.5}), std::invalid_argument);
}

TEST_CASE("formula scan, fixed cases") {
  {
    const Trajectory t = fqtest::make({{0, 0}, {2, 0}});
    const auto bd = frechet_formula_scan(t, pos_start(t), pos_end(t), {0, 2, 1});
    CHECK(bd.value == doctest::Approx(1).epsilon(1e-12));
    CHECK(bd.attains(Term::UP));
    CHECK(bd.attains(Term::VQ));
    CHECK(bd.attains(Term::HM));
  }
  {
    const Trajectory t = fqtest::make({{0, 0}, {2, 0}, {0, 0}, {2, 0}});
    const auto bd = frechet_formula_scan(t, pos_start(t), pos_end(t), {0, 2, 0});
    CHECK(bd.value == doctest::Approx(1).epsilon(1e-12));
    CHECK(bd.term(Term::BWD) == doctest::Approx(1).epsilon(1e-12));
    bool saw = false;
    for (const auto& w : bd.attaining)
      if (w.term == Term::BWD && w.ia == 1 && w.ib == 2) saw = true;
    CHECK(saw);  // the (2,0) -> (0,0) doubling back
  }
  {
    const Trajectory t = fqtest::make({{0, 0}, {1, 0}});
    const auto bd = frechet_formula_scan(t, pos_start(t), pos_end(t), {0, 1, 0});
    CHECK(bd.value == 0.0);
  }
}

TEST_CASE("free-space oracle agrees on the scan cases") {
  {
    const Trajectory t = fqtest::make({{0, 0}, {2, 0}});
    CHECK(frechet_freespace(t, pos_start(t), pos_end(t), {0, 2, 1}) ==
          doctest::Approx(1).epsilon(1e-9));
  }
  {
    const Trajectory t = fqtest::make({{0, 0}, {2, 0}, {0, 0}, {2, 0}});
    CHECK(frechet_freespace(t, pos_start(t), pos_end(t), {0, 2, 0}) ==
          doctest::Approx(1).epsilon(1e-9));
  }
  {
    const Trajectory t = fqtest::make({{0, 0}, {1, 0}});
    CHECK(frechet_freespace(t, pos_start(t), pos_end(t), {0, 1, 0}) ==
          doctest::Approx(0).epsilon(1e-9));
  }
}

TEST_CASE("free-space oracle, degenerate curves") {
  const Trajectory pt = fqtest::make({{0, 0}});
  CHECK(frechet_freespace(pt, pos_start(pt), pos_end(pt), {1, 1, 0}) ==
        doctest::Approx(1).epsilon(1e-9));
  CHECK(frechet_freespace(pt, pos_start(pt), pos_end(pt), {0, 0, 0}) ==
        doctest::Approx(0).epsilon(1e-9));
}

TEST_CASE("decision procedure brackets the optimum") {
  const Trajectory t = fqtest::make({{0, 1}, {2, 1}, {4, 1}});
  const std::vector<Point> poly = {{0, 1}, {2, 1}, {4, 1}};
  const HorizontalSegment q(0, 4, 0);
  const double opt = frechet_freespace(t, pos_start(t), pos_end(t), q);
  CHECK_FALSE(freespace_decision(poly, q, opt * 0.9));
  CHECK(freespace_decision(poly, q, opt * 1.1));
}

TEST_CASE("formula matches free space on random instances") {
  fqtest::Rand r(37);
  double worst = 0.0;
  for (int i = 0; i < 250; ++i) {
    const Trajectory t = fqtest::random_traj(r, 2 + r.below(11));
    const auto [u, v] = fqtest::random_span(r, t);
    double x0 = r.in(-12, 12), x1 = r.in(-12, 12);
    if (x0 > x1) std::swap(x0, x1);
    const HorizontalSegment q(x0, x1, r.in(-12, 12));
    const double scan = frechet_formula_scan(t, u, v, q).value;
    const double fs = frechet_freespace(t, u, v, q);
    const double err = std::abs(scan - fs);
    worst = std::max(worst, err);
    CHECK(err <= 1e-6 * (1.0 + scan));
  }
  CHECK(worst < 1e-6 * 20);
}

TEST_CASE("vertical oracle, fixed cases") {
  {
    const Trajectory t = fqtest::make({{0, 2}, {2, 2}});
    const auto r = brute_force_vertical_opt(t, pos_start(t), pos_end(t), 0, 2);
    CHECK(r.y_star == doctest::Approx(2).epsilon(1e-6));
    CHECK(r.value == doctest::Approx(0).scale(1).epsilon(1e-8));
  }
  {
    const Trajectory t = fqtest::make({{0, 0}, {2, 4}});
    const auto r = brute_force_vertical_opt(t, pos_start(t), pos_end(t), 0, 2);
    CHECK(r.y_star == doctest::Approx(2).epsilon(1e-6));
    CHECK(r.value == doctest::Approx(2).epsilon(1e-8));
  }
  {
    const Trajectory t = fqtest::make({{0, 0}, {2, 0}, {0, 0}, {2, 0}});
    const auto r = brute_force_vertical_opt(t, pos_start(t), pos_end(t), 0, 2);
    CHECK(std::abs(r.y_star) < 1e-6);
    CHECK(r.value == doctest::Approx(1).epsilon(1e-8));
  }
  const Trajectory t = fqtest::make({{0, 0}, {1, 1}});
  CHECK_THROWS_AS(brute_force_vertical_opt(t, pos_start(t), pos_end(t), 2, 1),
                  std::invalid_argument);
}

TEST_CASE("hausdorff part never shrinks when the subtrajectory grows") {
  fqtest::Rand r(91);
  for (int i = 0; i < 150; ++i) {
    const Trajectory t = fqtest::random_traj(r, 3 + r.below(8));
    auto [u, v] = fqtest::random_span(r, t);
    double x0 = r.in(-12, 12), x1 = r.in(-12, 12);
    if (x0 > x1) std::swap(x0, x1);
    const HorizontalSegment q(x0, x1, r.in(-12, 12));
    const auto h = [&](TrajectoryPos a, TrajectoryPos b) {
      const auto bd = frechet_formula_scan(t, a, b, q);
      return std::max({bd.term(Term::HL), bd.term(Term::HR), bd.term(Term::HM)});
    };
    const double inner = h(u, v);
    CHECK(h(pos_start(t), v) >= inner - 1e-9);
    CHECK(h(u, pos_end(t)) >= inner - 1e-9);
  }
}

TEST_CASE("vertical oracle lands at a local minimum") {
  fqtest::Rand r(17);
  for (int i = 0; i < 60; ++i) {
    const Trajectory t = fqtest::random_traj(r, 2 + r.below(7));
    auto [u, v] = fqtest::random_span(r, t);
    double x1 = r.in(-12, 12), x2 = r.in(-12, 12);
    if (x1 > x2) std::swap(x1, x2);
    const auto res = brute_force_vertical_opt(t, u, v, x1, x2);
    const auto f = [&](double y) {
      return frechet_formula_scan(t, u, v, HorizontalSegment(x1, x2, y)).value;
    };
    const double h = 1e-4 * (1.0 + std::abs(res.y_star));
    CHECK(f(res.y_star + h) >= res.value - 1e-6);
    CHECK(f(res.y_star - h) >= res.value - 1e-6);
  }
}

TEST_CASE("placement oracle, fixed cases") {
  {
    const Trajectory t = fqtest::make({{2, 0}, {5, 0}});
    const auto r = brute_force_placement_opt(t, pos_start(t), pos_end(t), 3);
    CHECK(r.x1_star == doctest::Approx(2).epsilon(1e-5));
    CHECK(std::abs(r.y_star) < 1e-5);
    CHECK(r.value < 1e-7);
  }
  {
    const Trajectory t = fqtest::make({{0, 0}, {3, 0}});
    const auto r = brute_force_placement_opt(t, pos_start(t), pos_end(t), 1);
    CHECK(r.x1_star == doctest::Approx(1).epsilon(1e-4));
    CHECK(std::abs(r.y_star) < 1e-5);
    CHECK(r.value == doctest::Approx(1).epsilon(1e-7));
  }
  {
    const Trajectory t = fqtest::make({{0, 0}, {2, 0}, {0, 0}, {2, 0}});
    const auto r = brute_force_placement_opt(t, pos_start(t), pos_end(t), 2);
    CHECK(std::abs(r.y_star) < 1e-5);
    CHECK(r.value == doctest::Approx(1).epsilon(1e-7));
  }
  const Trajectory t = fqtest::make({{0, 0}, {1, 1}});
  CHECK_THROWS_AS(brute_force_placement_opt(t, pos_start(t), pos_end(t), -1),
                  std::invalid_argument);
}

TEST_SUITE_END();
