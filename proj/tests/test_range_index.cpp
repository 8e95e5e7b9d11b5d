#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "doctest.h"
#include "fq/range_index.hpp"
#include "test_util.hpp"

using namespace fq;

namespace {

IndexConfig brute_cfg() {
  IndexConfig c;
  c.mode = IndexMode::Brute;
  return c;
}

// Plain scans the tree answers are checked against.
double scan_left(const std::vector<Point>& pts, int a, int b, Point p) {
  double best = 0.0;
  for (int i = a; i <= b; ++i)
    if (pts[i].x <= p.x) best = std::max(best, dist(p, pts[i]));
  return best;
}

double scan_right(const std::vector<Point>& pts, int a, int b, Point q) {
  double best = 0.0;
  for (int i = a; i <= b; ++i)
    if (pts[i].x >= q.x) best = std::max(best, dist(q, pts[i]));
  return best;
}

double scan_mid(const std::vector<Point>& pts, int a, int b, double y) {
  double best = 0.0;
  for (int i = a; i <= b; ++i) best = std::max(best, std::abs(y - pts[i].y));
  return best;
}

double scan_backward(const std::vector<Point>& pts, int a, int b, double y) {
  double best = -1.0;
  for (int i = a; i <= b; ++i)
    for (int j = i + 1; j <= b; ++j)
      if (pts[i].x >= pts[j].x)
        best = std::max(best, backward_pair_distance(pts[i], pts[j], y));
  return best;
}

}  // namespace

TEST_SUITE_BEGIN("range-index");

TEST_CASE("build rejects an empty trajectory, accepts a single vertex") {
  CHECK_THROWS_AS(RangeIndex::build(Trajectory{}), std::invalid_argument);

  const auto idx = RangeIndex::build(fqtest::make({{1, 2}}));
  CHECK(idx.size() == 1);
  CHECK(idx.hausdorff_left(0, 0, {1, 2}) == 0.0);
  CHECK(idx.hausdorff_right(0, 0, {1, 2}) == 0.0);
  CHECK(idx.hausdorff_mid(0, 0, 2) == 0.0);
  CHECK(idx.backward_max(0, 0, 0) == -1.0);
}

TEST_CASE("strictly increasing x means no backward pairs") {
  const auto idx = RangeIndex::build(fqtest::make({{0, 0}, {1, 3}, {2, -1}, {3, 5}}));
  CHECK(idx.backward_max(0, 3, 0.0) == -1.0);
  CHECK(idx.backward_max(1, 2, 7.5) == -1.0);
}

TEST_CASE("single doubling-back pair") {
  const auto idx = RangeIndex::build(fqtest::make({{0, 0}, {2, 0}, {1, 0}}));
  CHECK(idx.backward_max(0, 2, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(idx.backward_max(0, 1, 0.0) == -1.0);  // (0,0),(2,0) is forward
}

TEST_CASE("hausdorff_left fixed cases") {
  const auto idx = RangeIndex::build(fqtest::make({{0, 0}, {1, 5}, {2, 1}}));
  CHECK(idx.hausdorff_left(0, 2, {3, 0}) == doctest::Approx(std::sqrt(29.0)).epsilon(1e-12));
  CHECK(idx.hausdorff_left(0, 2, {-1, 0}) == 0.0);
}

TEST_CASE("hausdorff_right fixed cases") {
  const auto idx = RangeIndex::build(fqtest::make({{0, 0}, {-1, 5}, {-2, 1}}));
  CHECK(idx.hausdorff_right(0, 2, {-3, 0}) ==
        doctest::Approx(std::sqrt(29.0)).epsilon(1e-12));
  CHECK(idx.hausdorff_right(0, 2, {1, 0}) == 0.0);
}

TEST_CASE("hausdorff_mid fixed cases") {
  const auto idx = RangeIndex::build(fqtest::make({{0, 0}, {1, 5}, {2, 1}}));
  CHECK(idx.hausdorff_mid(0, 2, 2) == doctest::Approx(3).epsilon(1e-12));
  CHECK(idx.hausdorff_mid(1, 1, 5) == 0.0);
}

TEST_CASE("witness collection reports tied attainers") {
  const Trajectory t = fqtest::make({{0, 1}, {1, -1}, {2, 1}});
  const auto brute = RangeIndex::build(t, brute_cfg());
  TieCollector all(1e-9);
  CHECK(brute.hausdorff_mid(0, 2, 0, &all) == doctest::Approx(1).epsilon(1e-12));
  CHECK(all.witnesses().size() == 3);  // brute offers every vertex

  // The tree offers one witness per y-extreme; both extremes attain here.
  const auto fast = RangeIndex::build(t);
  TieCollector some(1e-9);
  fast.hausdorff_mid(0, 2, 0, &some);
  CHECK(some.witnesses().size() >= 2);
  for (const auto& w : some.witnesses()) CHECK(std::abs(w.a.y) == 1.0);
}

TEST_CASE("fast matches brute on random workloads") {
  for (const bool exhaustive : {true, false}) {
    fqtest::Rand r(exhaustive ? 5 : 6);
    IndexConfig fast;
    fast.exhaustive_cross = exhaustive;
    for (int rep = 0; rep < 12; ++rep) {
      const Trajectory t = fqtest::random_traj(r, 1 + r.below(120));
      const auto fi = RangeIndex::build(t, fast);
      const auto bi = RangeIndex::build(t, brute_cfg());
      const int n = static_cast<int>(t.size());
      for (int k = 0; k < 60; ++k) {
        int a = r.below(n), b = r.below(n);
        if (a > b) std::swap(a, b);
        const Point p{r.in(-12, 12), r.in(-12, 12)};
        const double y = r.in(-12, 12);
        CHECK(std::abs(fi.hausdorff_left(a, b, p) - bi.hausdorff_left(a, b, p)) <= 1e-9);
        CHECK(std::abs(fi.hausdorff_right(a, b, p) - bi.hausdorff_right(a, b, p)) <= 1e-9);
        CHECK(std::abs(fi.hausdorff_mid(a, b, y) - bi.hausdorff_mid(a, b, y)) <= 1e-9);
        CHECK(std::abs(fi.backward_max(a, b, y) - bi.backward_max(a, b, y)) <= 1e-9);
        CHECK(std::abs(fi.backward_with_lead(a, b, p, -1, y) -
                       bi.backward_with_lead(a, b, p, -1, y)) <= 1e-9);
        CHECK(std::abs(fi.backward_with_trail(a, b, p, -2, y) -
                       bi.backward_with_trail(a, b, p, -2, y)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("brute twin matches the plain scans above") {
  fqtest::Rand r(8);
  const Trajectory t = fqtest::random_traj(r, 50);
  const auto idx = RangeIndex::build(t, brute_cfg());
  for (int k = 0; k < 100; ++k) {
    int a = r.below(50), b = r.below(50);
    if (a > b) std::swap(a, b);
    const Point p{r.in(-12, 12), r.in(-12, 12)};
    const double y = r.in(-12, 12);
    CHECK(std::abs(idx.hausdorff_left(a, b, p) - scan_left(t.pts, a, b, p)) <= 1e-12);
    CHECK(std::abs(idx.hausdorff_right(a, b, p) - scan_right(t.pts, a, b, p)) <= 1e-12);
    CHECK(std::abs(idx.hausdorff_mid(a, b, y) - scan_mid(t.pts, a, b, y)) <= 1e-12);
    CHECK(std::abs(idx.backward_max(a, b, y) - scan_backward(t.pts, a, b, y)) <= 1e-9);
  }
}

TEST_CASE("backward_max is convex in the height") {
  fqtest::Rand r(11);
  const Trajectory t = fqtest::random_traj(r, 40);
  const auto idx = RangeIndex::build(t);
  for (int k = 0; k < 200; ++k) {
    int a = r.below(40), b = r.below(40);
    if (a > b) std::swap(a, b);
    if (idx.backward_max(a, b, 0.0) < 0) continue;
    const double y1 = r.in(-15, 15), y2 = r.in(-15, 15);
    const double mid = idx.backward_max(a, b, 0.5 * (y1 + y2));
    const double avg =
        0.5 * (idx.backward_max(a, b, y1) + idx.backward_max(a, b, y2));
    CHECK(mid <= avg + 1e-8);
  }
}

TEST_CASE("hausdorff_left grows with the range") {
  fqtest::Rand r(13);
  const Trajectory t = fqtest::random_traj(r, 30);
  const auto idx = RangeIndex::build(t);
  for (int k = 0; k < 100; ++k) {
    int a = r.below(30), b = r.below(30);
    if (a > b) std::swap(a, b);
    const Point p{r.in(-12, 12), r.in(-12, 12)};
    const double inner = idx.hausdorff_left(a, b, p);
    CHECK(idx.hausdorff_left(0, b, p) >= inner);
    CHECK(idx.hausdorff_left(a, 29, p) >= inner);
  }
}

TEST_CASE("range validation") {
  const auto idx = RangeIndex::build(fqtest::make({{0, 0}, {1, 1}, {2, 2}}));
  CHECK_THROWS_AS(idx.hausdorff_mid(2, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(idx.hausdorff_mid(-1, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(idx.backward_max(0, 3, 0), std::invalid_argument);
}

TEST_CASE("save and load round-trip") {
  fqtest::Rand r(21);
  const Trajectory t = fqtest::random_traj(r, 80);
  const auto idx = RangeIndex::build(t);
  const std::string path = "roundtrip.fqi";
  idx.save(path);
  const auto back = RangeIndex::load(path);
  REQUIRE(back.size() == idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) CHECK(back.vertex(i) == idx.vertex(i));
  for (int k = 0; k < 50; ++k) {
    int a = r.below(80), b = r.below(80);
    if (a > b) std::swap(a, b);
    const double y = r.in(-12, 12);
    CHECK(idx.backward_max(a, b, y) == back.backward_max(a, b, y));
    const Point p{r.in(-12, 12), r.in(-12, 12)};
    CHECK(idx.hausdorff_left(a, b, p) == back.hausdorff_left(a, b, p));
  }
  std::remove(path.c_str());
}

TEST_CASE("load rejects a corrupted file") {
  const auto idx = RangeIndex::build(fqtest::make({{0, 0}, {1, 1}, {2, 0}}));
  const std::string path = "corrupt.fqi";
  idx.save(path);
  std::string bytes;
  {
    std::ifstream f(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  }
  REQUIRE(bytes.size() > 8);
  bytes[bytes.size() / 2] ^= 0x40;  // any flipped bit must trip the checksum
  std::ofstream(path, std::ios::binary) << bytes;
  CHECK_THROWS(RangeIndex::load(path));

  std::ofstream(path, std::ios::binary) << "FQI";  // truncated header
  CHECK_THROWS(RangeIndex::load(path));
  std::remove(path.c_str());
}

TEST_CASE("support-free build still answers backward queries") {
  IndexConfig cfg;
  cfg.build_supports = false;
  fqtest::Rand r(31);
  const Trajectory t = fqtest::random_traj(r, 60);
  const auto plain = RangeIndex::build(t, cfg);
  const auto brute = RangeIndex::build(t, brute_cfg());
  for (int k = 0; k < 80; ++k) {
    int a = r.below(60), b = r.below(60);
    if (a > b) std::swap(a, b);
    const double y = r.in(-40, 40);  // heights beyond the certified window too
    CHECK(std::abs(plain.backward_max(a, b, y) - brute.backward_max(a, b, y)) <= 1e-9);
  }
}

TEST_CASE("stats report a built tree") {
  fqtest::Rand r(41);
  const auto idx = RangeIndex::build(fqtest::random_traj(r, 200));
  const auto s = idx.stats();
  CHECK(s.node_count > 1);
  CHECK(s.window_lo < s.window_hi);
}

TEST_SUITE_END();
