#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "fq/trajectory_io.hpp"
#include "test_util.hpp"

using namespace fq;

namespace {

int run_cli(const std::vector<std::string>& args, std::string* out_s = nullptr,
            std::string* err_s = nullptr) {
  std::vector<const char*> argv = {"fq"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = fq::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_s) *out_s = out.str();
  if (err_s) *err_s = err.str();
  return rc;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

// Everything after the first "wall_ms"-free brace is deterministic; with
// --no-timing the whole document is.
bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE_BEGIN("io-cli");

TEST_CASE("trajectory parsing") {
  {
    const auto t = parse_trajectory_text("0,0\n2,0\n4,0\n");
    REQUIRE(t.size() == 3);
    CHECK(t[2] == Point{4, 0});
  }
  {
    const auto t = parse_trajectory_text("# hdr\n1.5,2.5\n");
    REQUIRE(t.size() == 1);
    CHECK(t[0] == Point{1.5, 2.5});
  }
  {
    // Optional header line plus CRLF endings.
    const auto t = parse_trajectory_text("x,y\r\n1,2\r\n3,4\r\n");
    REQUIRE(t.size() == 2);
    CHECK(t[1] == Point{3, 4});
  }
  {
    try {
      parse_trajectory_text("0,0\na,b\n", "bad.csv");
      FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
      CHECK(contains(e.what(), "bad.csv:2:"));
    }
  }
  CHECK_THROWS_AS(parse_trajectory_text(""), std::runtime_error);
  CHECK_THROWS_AS(parse_trajectory_text("# only comments\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_trajectory_text("1,2\n3,inf\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_trajectory_text("1,2\n3\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_trajectory_text("1,2\n3,4,5\n"), std::runtime_error);
}

TEST_CASE("position grammar") {
  const auto t = parse_trajectory_text("0,0\n2,0\n4,0\n");
  CHECK(parse_position("start", t).key() == 0.0);
  CHECK(parse_position("end", t).key() == 2.0);
  {
    const auto p = parse_position("0:0.5", t);
    CHECK(p.edge == 0);
    CHECK(p.fraction == 0.5);
  }
  {
    const auto p = parse_position("1:1", t);  // canonicalizes to the curve end
    CHECK(p.key() == 2.0);
  }
  {
    const auto p = parse_position("t=0.25", t);  // quarter of total length 4
    CHECK(point_at(t, p) == Point{1, 0});
  }
  CHECK(parse_position("t=0", t).key() == 0.0);
  CHECK(parse_position("t=1", t).key() == 2.0);
  CHECK_THROWS(parse_position("", t));
  CHECK_THROWS(parse_position("0:1.5", t));
  CHECK_THROWS(parse_position("7:0", t));
  CHECK_THROWS(parse_position("t=1.5", t));
  CHECK_THROWS(parse_position("0.5", t));
  CHECK_THROWS(parse_position("one:0.5", t));
}

TEST_CASE("query output and determinism") {
  write_file("cli_tri.csv", "0,1\n2,1\n4,1\n");
  std::string a, b;
  const std::vector<std::string> cmd = {"query",  "cli_tri.csv", "--kind", "frechet",
                                        "--u",    "0:0.5",       "--v",    "end",
                                        "--q",    "0,4,0",       "--no-timing"};
  CHECK(run_cli(cmd, &a) == 0);
  CHECK(run_cli(cmd, &b) == 0);
  CHECK(a == b);
  CHECK(contains(a, "\"schema\":\"fq-1\""));
  CHECK(contains(a, "\"value\":1.4142135623730951"));
  CHECK(contains(a, "\"p_prime\":[2,0]"));
  CHECK(contains(a, "\"q_prime\":[4,0]"));
  CHECK_FALSE(contains(a, "wall_ms"));

  std::string timed;
  CHECK(run_cli({"query", "cli_tri.csv", "--kind", "frechet", "--u", "0:0.5", "--v",
                 "end", "--q", "0,4,0"},
                &timed) == 0);
  CHECK(contains(timed, "wall_ms"));
  std::remove("cli_tri.csv");
}

TEST_CASE("vertical and placement queries through the CLI") {
  write_file("cli_seg.csv", "2,0\n5,0\n");
  std::string out;
  CHECK(run_cli({"query", "cli_seg.csv", "--kind", "vertical", "--q", "0,2",
                 "--no-timing"},
                &out) == 0);
  CHECK(contains(out, "\"kind\":\"vertical\""));
  CHECK(contains(out, "\"y_star\":0"));

  CHECK(run_cli({"query", "cli_seg.csv", "--kind", "place", "--L", "3", "--no-timing"},
                &out) == 0);
  CHECK(contains(out, "\"x1_star\":2"));
  CHECK(contains(out, "\"y_star\":0"));
  CHECK(contains(out, "\"value\":0"));
  std::remove("cli_seg.csv");
}

TEST_CASE("index round-trip matches the direct query") {
  fqtest::Rand r(57);
  std::ostringstream csv;
  for (int i = 0; i < 40; ++i) csv << r.in(-9, 9) << "," << r.in(-9, 9) << "\n";
  write_file("cli_rt.csv", csv.str());

  std::string built;
  CHECK(run_cli({"build-index", "cli_rt.csv", "cli_rt.fqi", "--no-timing"}, &built) == 0);
  CHECK(contains(built, "\"n\":40"));

  for (const std::string kind : {"frechet", "vertical", "place"}) {
    std::vector<std::string> base = {"query", "", "--kind", kind, "--u", "2:0.25",
                                     "--v", "7:0.75", "--no-timing"};
    if (kind == "frechet") {
      base.push_back("--q");
      base.push_back("-3,4,1");
    } else if (kind == "vertical") {
      base.push_back("--q");
      base.push_back("-3,4");
    } else {
      base.push_back("--L");
      base.push_back("2.5");
    }
    std::string from_csv, from_idx;
    base[1] = "cli_rt.csv";
    CHECK(run_cli(base, &from_csv) == 0);
    base[1] = "cli_rt.fqi";
    CHECK(run_cli(base, &from_idx) == 0);
    // Identical apart from the "input" echo, which precedes "n".
    const auto strip = [](std::string s) {
      const auto pos = s.find("\"n\":");
      REQUIRE(pos != std::string::npos);
      return s.substr(pos);
    };
    CHECK(strip(from_csv) == strip(from_idx));
  }
  std::remove("cli_rt.csv");
  std::remove("cli_rt.fqi");
}

TEST_CASE("usage and input errors exit with 2") {
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"query"}) == 2);                      // missing input
  CHECK(run_cli({"frobnicate"}) == 2);                 // unknown subcommand
  CHECK(run_cli({"query", "missing.csv", "--kind", "frechet", "--u", "start", "--v",
                 "end", "--q", "0,1,0"}) == 2);        // unreadable file
  write_file("cli_err.csv", "0,0\n1,0\n");
  CHECK(run_cli({"query", "cli_err.csv", "--kind", "place"}) == 2);  // no --L
  CHECK(run_cli({"query", "cli_err.csv", "--kind", "frechet", "--u", "start", "--v",
                 "end", "--q", "5,1,0"}) == 2);        // x0 > x1
  CHECK(run_cli({"query", "cli_err.csv", "--kind", "frechet", "--u", "end", "--v",
                 "start", "--q", "0,1,0"}) == 2);      // u > v
  CHECK(run_cli({"query", "cli_err.csv", "--kind", "frechet", "--u", "start", "--v",
                 "end", "--q", "nope"}) == 2);
  std::string help;
  CHECK(run_cli({"--help"}, &help) == 0);
  CHECK(contains(help, "build-index"));
  std::remove("cli_err.csv");
}

TEST_CASE("oracle-check passes on a small budget") {
  write_file("cli_ok.csv", "0,1\n2,1\n4,1\n");
  std::string out;
  CHECK(run_cli({"oracle-check", "cli_ok.csv", "--trials", "5", "--seed", "3",
                 "--no-timing"},
                &out) == 0);
  CHECK(contains(out, "\"pass\":true"));
  CHECK(contains(out, "\"trials\":5"));
  std::remove("cli_ok.csv");
}

TEST_CASE("bench verifies fast against brute") {
  fqtest::Rand r(58);
  std::ostringstream csv;
  for (int i = 0; i < 60; ++i) csv << r.in(-9, 9) << "," << r.in(-9, 9) << "\n";
  write_file("cli_bench.csv", csv.str());
  std::string out;
  CHECK(run_cli({"bench", "cli_bench.csv", "--queries", "20", "--seed", "2",
                 "--no-timing"},
                &out) == 0);
  CHECK(contains(out, "\"pass\":true"));
  CHECK(contains(out, "\"queries\":20"));
  std::remove("cli_bench.csv");
}

TEST_SUITE_END();
