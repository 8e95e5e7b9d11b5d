#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "fq/constants.hpp"
#include "fq/oracle.hpp"
#include "fq/query.hpp"
#include "fq/range_index.hpp"
#include "fq/trajectory_io.hpp"
#include "fq/translation.hpp"

namespace fq::cli {
namespace {

int log_level() {
  static const int level = [] {
    const char* e = std::getenv("FQ_LOG");
    return e ? std::atoi(e) : 0;
  }();
  return level;
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Compact JSON with every number at 17 significant digits, so identical
// results serialize to identical bytes.
class Json {
 public:
  explicit Json(std::ostream& os) : os_(os) {}

  Json& obj() { return open('{'); }
  Json& arr() { return open('['); }
  Json& end() {
    os_ << closer_.back();
    closer_.pop_back();
    first_.pop_back();
    return *this;
  }
  Json& key(const char* k) {
    sep();
    quote(k);
    os_ << ':';
    pending_value_ = true;
    return *this;
  }
  Json& str(const std::string& v) {
    sep();
    quote(v);
    return *this;
  }
  Json& num(double v) {
    sep();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os_ << buf;
    return *this;
  }
  Json& num(long long v) {
    sep();
    os_ << v;
    return *this;
  }
  Json& num(int v) { return num(static_cast<long long>(v)); }
  Json& num(std::size_t v) { return num(static_cast<long long>(v)); }
  Json& boolean(bool v) {
    sep();
    os_ << (v ? "true" : "false");
    return *this;
  }
  Json& point(const Point& p) {
    arr();
    num(p.x);
    num(p.y);
    return end();
  }
  void finish() { os_ << '\n'; }

 private:
  Json& open(char c) {
    sep();
    os_ << c;
    closer_.push_back(c == '{' ? '}' : ']');
    first_.push_back(true);
    return *this;
  }
  void sep() {
    if (pending_value_) {
      pending_value_ = false;
      return;
    }
    if (!first_.empty()) {
      if (!first_.back()) os_ << ',';
      first_.back() = false;
    }
  }
  void quote(const std::string& s) {
    os_ << '"';
    for (char c : s) {
      switch (c) {
        case '"': os_ << "\\\""; break;
        case '\\': os_ << "\\\\"; break;
        case '\n': os_ << "\\n"; break;
        case '\t': os_ << "\\t"; break;
        case '\r': os_ << "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            os_ << buf;
          } else {
            os_ << c;
          }
      }
    }
    os_ << '"';
  }

  std::ostream& os_;
  std::vector<char> closer_;
  std::vector<bool> first_;
  bool pending_value_ = false;
};

// Deterministic across platforms (mt19937_64 has a pinned sequence; the
// scaling below involves no library distribution).
struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t seed) : g(seed) {}
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(g() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }
  int below(int n) { return static_cast<int>(g() % static_cast<std::uint64_t>(n)); }
};

std::vector<double> parse_csv_numbers(const std::string& text, std::size_t want,
                                      const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const char* begin = field.c_str();
    char* endp = nullptr;
    const double v = std::strtod(begin, &endp);
    while (*endp == ' ') ++endp;
    if (endp != begin + field.size() || !std::isfinite(v))
      throw std::runtime_error(std::string(what) + ": bad number \"" + field + "\"");
    out.push_back(v);
  }
  if (out.size() != want)
    throw std::runtime_error(std::string(what) + ": expected " + std::to_string(want) +
                             " comma-separated numbers");
  return out;
}

bool is_index_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  return in.gcount() == 4 && magic[0] == 'F' && magic[1] == 'Q' && magic[2] == 'I' &&
         magic[3] == '1';
}

struct LoadedInput {
  Trajectory traj;
  RangeIndex idx;

  LoadedInput(Trajectory t, RangeIndex i) : traj(std::move(t)), idx(std::move(i)) {}
};

// `query` accepts either a prebuilt index or a raw CSV; the index stores the
// vertex list, so the trajectory can be recovered from it.
LoadedInput load_input(const std::string& path, IndexMode mode) {
  if (is_index_file(path)) {
    RangeIndex idx = RangeIndex::load(path);
    Trajectory traj(idx.vertices());
    return LoadedInput(std::move(traj), std::move(idx));
  }
  Trajectory traj = parse_trajectory(path);
  IndexConfig cfg;
  cfg.mode = mode;
  RangeIndex idx = RangeIndex::build(traj, cfg);
  return LoadedInput(std::move(traj), std::move(idx));
}

void emit_breakdown(Json& j, const FrechetBreakdown& bd) {
  j.key("value").num(bd.value);
  j.key("terms").obj();
  for (int t = 0; t < kNumTerms; ++t)
    j.key(term_name(static_cast<Term>(t))).num(bd.term_values[t]);
  j.end();
  j.key("attaining").arr();
  for (const Witness& w : bd.attaining) {
    j.obj();
    j.key("term").str(term_name(w.term));
    j.key("a").point(w.a);
    j.key("ia").num(w.ia);
    if (w.term == Term::BWD) {
      j.key("b").point(w.b);
      j.key("ib").num(w.ib);
    }
    j.end();
  }
  j.end();
}

struct QueryArgs {
  std::string input;
  std::string kind = "frechet";
  std::string u = "start";
  std::string v = "end";
  std::string q;
  double L = 0.0;
  bool l_set = false;
  std::string mode = "exact";
  std::string index_mode = "fast";
  bool no_timing = false;
};

int cmd_query(const QueryArgs& a, std::ostream& out, std::ostream& err) {
  const IndexMode imode = a.index_mode == "brute" ? IndexMode::Brute : IndexMode::Fast;
  const Timer timer;
  LoadedInput li = load_input(a.input, imode);
  const TrajectoryPos u = parse_position(a.u, li.traj);
  const TrajectoryPos v = parse_position(a.v, li.traj);
  if (u.key() > v.key()) throw std::runtime_error("query: u must not come after v");
  if (log_level() >= 1)
    err << "fq query kind=" << a.kind << " n=" << li.traj.size() << " u=" << a.u
        << " v=" << a.v << "\n";

  Json j(out);
  j.obj();
  j.key("schema").str("fq-1");
  j.key("command").str("query");
  j.key("kind").str(a.kind);
  j.key("input").str(a.input);
  j.key("n").num(li.traj.size());
  j.key("index_mode").str(li.idx.mode() == IndexMode::Fast ? "fast" : "brute");
  j.key("u").str(a.u);
  j.key("v").str(a.v);

  if (a.kind == "frechet") {
    const std::vector<double> qn = parse_csv_numbers(a.q, 3, "--q");
    if (!(qn[0] <= qn[1])) throw std::runtime_error("--q: x0 > x1");
    const HorizontalSegment seg(qn[0], qn[1], qn[2]);
    QueryOptions opts;
    opts.mode = a.mode == "bisect" ? SplitMode::Bisection : SplitMode::ExactCandidates;
    const QueryResult r = frechet_query(li.traj, u, v, seg, li.idx, opts);
    j.key("q").arr().num(seg.x0).num(seg.x1).num(seg.y).end();
    j.key("mode").str(a.mode);
    j.key("result").obj();
    emit_breakdown(j, r.breakdown);
    if (r.split) {
      j.key("split").obj();
      j.key("p_prime").point(r.split->p_prime);
      j.key("q_prime").point(r.split->q_prime);
      j.key("f_value").num(r.split->f_value);
      j.end();
    }
    j.key("decision_steps").num(r.decision_steps);
    j.end();
  } else if (a.kind == "vertical") {
    const std::vector<double> qn = parse_csv_numbers(a.q, 2, "--q");
    if (!(qn[0] <= qn[1])) throw std::runtime_error("--q: x1 > x2");
    const VerticalOpt r = optimize_vertical(li.traj, u, v, qn[0], qn[1], li.idx);
    j.key("q").arr().num(qn[0]).num(qn[1]).end();
    j.key("result").obj();
    j.key("y_star").num(r.y_star);
    emit_breakdown(j, r.breakdown);
    j.key("decision_steps").num(r.steps);
    j.end();
  } else if (a.kind == "place") {
    if (!a.l_set) throw std::runtime_error("--kind place needs --L");
    if (a.L < 0.0) throw std::runtime_error("--L must be nonnegative");
    const PlacementOpt r = optimize_placement(li.traj, u, v, a.L, li.idx);
    j.key("L").num(a.L);
    j.key("result").obj();
    j.key("x1_star").num(r.x1_star);
    j.key("y_star").num(r.y_star);
    emit_breakdown(j, r.breakdown);
    j.key("decision_steps").num(r.steps);
    j.end();
  } else {
    throw std::runtime_error("unknown --kind " + a.kind);
  }

  if (!a.no_timing) j.key("wall_ms").num(timer.ms());
  j.end();
  j.finish();
  return 0;
}

struct BuildArgs {
  std::string input;
  std::string output;
  std::string index_mode = "fast";
  int leaf_size = 8;
  bool no_timing = false;
};

int cmd_build_index(const BuildArgs& a, std::ostream& out, std::ostream& err) {
  const Timer timer;
  const Trajectory traj = parse_trajectory(a.input);
  IndexConfig cfg;
  cfg.mode = a.index_mode == "brute" ? IndexMode::Brute : IndexMode::Fast;
  cfg.leaf_size = a.leaf_size;
  const RangeIndex idx = RangeIndex::build(traj, cfg);
  idx.save(a.output);
  std::ifstream f(a.output, std::ios::binary | std::ios::ate);
  const long long bytes = f ? static_cast<long long>(f.tellg()) : -1;
  const RangeIndex::Stats st = idx.stats();
  if (log_level() >= 1)
    err << "fq build-index n=" << traj.size() << " nodes=" << st.node_count << "\n";

  Json j(out);
  j.obj();
  j.key("schema").str("fq-1");
  j.key("command").str("build-index");
  j.key("input").str(a.input);
  j.key("output").str(a.output);
  j.key("n").num(traj.size());
  j.key("index_mode").str(a.index_mode);
  j.key("leaf_size").num(a.leaf_size);
  j.key("nodes").num(st.node_count);
  j.key("support_pairs").num(st.support_pairs);
  j.key("fallback_nodes").num(st.fallback_nodes);
  j.key("bytes").num(bytes);
  if (!a.no_timing) j.key("wall_ms").num(timer.ms());
  j.end();
  j.finish();
  return 0;
}

struct CheckStat {
  long long count = 0;
  double worst = 0.0;
  void add(double err) {
    ++count;
    worst = std::max(worst, err);
  }
};

struct OracleArgs {
  std::string input;
  int trials = 100;
  std::uint64_t seed = 1;
  bool no_timing = false;
};

TrajectoryPos random_pos(Rng& rng, const Trajectory& traj) {
  if (traj.size() <= 1) return pos_start(traj);
  return canonical_pos({rng.below(static_cast<int>(traj.edges())), rng.uniform(0.0, 1.0)},
                       traj.size());
}

int cmd_oracle_check(const OracleArgs& a, std::ostream& out, std::ostream& err) {
  const Timer timer;
  const Trajectory traj = parse_trajectory(a.input);
  const RangeIndex idx = RangeIndex::build(traj, {});
  Rng rng(a.seed);

  double min_x = traj[0].x, max_x = traj[0].x, min_y = traj[0].y, max_y = traj[0].y;
  for (const Point& p : traj.pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double pad = 1.0 + 0.5 * std::max(max_x - min_x, max_y - min_y);

  CheckStat formula_fs, query_scan, modes, vertical, placement;
  bool pass = true;
  auto verify = [&](CheckStat& st, double errv, double tol, const char* what, int trial) {
    st.add(errv);
    if (errv > tol) {
      pass = false;
      err << "oracle-check trial " << trial << ": " << what << " error " << errv
          << " exceeds " << tol << "\n";
    }
  };

  for (int t = 0; t < a.trials; ++t) {
    TrajectoryPos u = random_pos(rng, traj);
    TrajectoryPos v = random_pos(rng, traj);
    if (u.key() > v.key()) std::swap(u, v);
    double x0 = rng.uniform(min_x - pad, max_x + pad);
    double x1 = rng.uniform(min_x - pad, max_x + pad);
    if (x0 > x1) std::swap(x0, x1);
    const HorizontalSegment seg(x0, x1, rng.uniform(min_y - pad, max_y + pad));
    if (log_level() >= 2)
      err << "trial " << t << " u=" << u.key() << " v=" << v.key() << " q=(" << seg.x0
          << "," << seg.x1 << "," << seg.y << ")\n";

    const FrechetBreakdown scan = frechet_formula_scan(traj, u, v, seg);
    const std::size_t m = subtrajectory_vertices(traj, u, v).pts.size();
    if (m <= 80) {
      const double fs = frechet_freespace(traj, u, v, seg);
      verify(formula_fs, std::abs(scan.value - fs), 1e-6 * (1.0 + scan.value),
             "formula vs freespace", t);
    }

    QueryOptions opts;
    const QueryResult exact = frechet_query(traj, u, v, seg, idx, opts);
    verify(query_scan, std::abs(exact.breakdown.value - scan.value),
           1e-8 * (1.0 + scan.value), "query vs scan", t);
    opts.mode = SplitMode::Bisection;
    const QueryResult bis = frechet_query(traj, u, v, seg, idx, opts);
    double mode_err = std::abs(exact.breakdown.value - bis.breakdown.value);
    if (exact.split && bis.split)
      mode_err = std::max(mode_err, std::abs(exact.split->f_value - bis.split->f_value));
    verify(modes, mode_err, 1e-8 * (1.0 + scan.value), "exact vs bisect", t);

    if (t % 10 == 0) {
      const VerticalOpt mine = optimize_vertical(traj, u, v, seg.x0, seg.x1, idx);
      const VerticalOracleResult orc = brute_force_vertical_opt(traj, u, v, seg.x0, seg.x1);
      verify(vertical, std::abs(mine.value - orc.value), 1e-6 * (1.0 + orc.value),
             "vertical vs golden", t);
    }
    if (t % 25 == 0) {
      const double L = rng.uniform(0.0, std::max(1.0, max_x - min_x));
      const PlacementOpt mine = optimize_placement(traj, u, v, L, idx);
      const PlacementOracleResult orc = brute_force_placement_opt(traj, u, v, L);
      verify(placement, std::abs(mine.value - orc.value), 1e-5 * (1.0 + orc.value),
             "placement vs grid", t);
    }
  }

  Json j(out);
  j.obj();
  j.key("schema").str("fq-1");
  j.key("command").str("oracle-check");
  j.key("input").str(a.input);
  j.key("n").num(traj.size());
  j.key("trials").num(a.trials);
  j.key("seed").num(static_cast<long long>(a.seed));
  j.key("checks").obj();
  auto emit = [&](const char* name, const CheckStat& st) {
    j.key(name).obj();
    j.key("count").num(st.count);
    j.key("worst").num(st.worst);
    j.end();
  };
  emit("formula_vs_freespace", formula_fs);
  emit("query_vs_scan", query_scan);
  emit("exact_vs_bisect", modes);
  emit("vertical_vs_golden", vertical);
  emit("placement_vs_grid", placement);
  j.end();
  j.key("pass").boolean(pass);
  if (!a.no_timing) j.key("wall_ms").num(timer.ms());
  j.end();
  j.finish();
  return pass ? 0 : 1;
}

struct BenchArgs {
  std::string input;
  int queries = 1000;
  std::uint64_t seed = 1;
  bool no_timing = false;
};

// Parallel fast path against the serial brute-force twin: index build (the
// fast build fans support construction out across threads) and a batch of
// identical queries, answered once with the fast index across threads and
// once with the brute index on one thread.
int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  const Trajectory traj = parse_trajectory(a.input);

  Timer tb_fast;
  IndexConfig fast_cfg;
  fast_cfg.exhaustive_cross = false;
  const RangeIndex fast = RangeIndex::build(traj, fast_cfg);
  const double fast_build = tb_fast.ms();

  Timer tb_brute;
  IndexConfig brute_cfg;
  brute_cfg.mode = IndexMode::Brute;
  const RangeIndex brute = RangeIndex::build(traj, brute_cfg);
  const double brute_build = tb_brute.ms();

  Rng rng(a.seed);
  double min_x = traj[0].x, max_x = traj[0].x, min_y = traj[0].y, max_y = traj[0].y;
  for (const Point& p : traj.pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double pad = 1.0 + 0.5 * std::max(max_x - min_x, max_y - min_y);

  struct Q {
    TrajectoryPos u, v;
    HorizontalSegment seg;
  };
  std::vector<Q> qs;
  qs.reserve(a.queries);
  for (int i = 0; i < a.queries; ++i) {
    TrajectoryPos u = random_pos(rng, traj);
    TrajectoryPos v = random_pos(rng, traj);
    if (u.key() > v.key()) std::swap(u, v);
    double x0 = rng.uniform(min_x - pad, max_x + pad);
    double x1 = rng.uniform(min_x - pad, max_x + pad);
    if (x0 > x1) std::swap(x0, x1);
    qs.push_back({u, v, HorizontalSegment(x0, x1, rng.uniform(min_y - pad, max_y + pad))});
  }

  QueryOptions opts;
  opts.want_split = false;
  std::vector<double> fast_vals(qs.size()), brute_vals(qs.size());

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  Timer tq_fast;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
  for (std::size_t i = 0; i < qs.size(); ++i)
    fast_vals[i] =
        frechet_query(traj, qs[i].u, qs[i].v, qs[i].seg, fast, opts).breakdown.value;
  const double fast_batch = tq_fast.ms();

  Timer tq_brute;
  for (std::size_t i = 0; i < qs.size(); ++i)
    brute_vals[i] =
        frechet_query(traj, qs[i].u, qs[i].v, qs[i].seg, brute, opts).breakdown.value;
  const double brute_batch = tq_brute.ms();

  double max_diff = 0.0;
  for (std::size_t i = 0; i < qs.size(); ++i)
    max_diff = std::max(max_diff, std::abs(fast_vals[i] - brute_vals[i]));
  const bool pass = max_diff <= 1e-9;
  if (log_level() >= 1)
    err << "fq bench n=" << traj.size() << " queries=" << a.queries
        << " threads=" << threads << " max_diff=" << max_diff << "\n";

  Json j(out);
  j.obj();
  j.key("schema").str("fq-1");
  j.key("command").str("bench");
  j.key("input").str(a.input);
  j.key("n").num(traj.size());
  j.key("queries").num(a.queries);
  j.key("seed").num(static_cast<long long>(a.seed));
  j.key("threads").num(threads);
  if (!a.no_timing) {
    j.key("fast_build_ms").num(fast_build);
    j.key("brute_build_ms").num(brute_build);
    j.key("fast_batch_ms").num(fast_batch);
    j.key("serial_batch_ms").num(brute_batch);
    j.key("speedup").num(fast_batch > 0.0 ? brute_batch / fast_batch : 0.0);
  }
  j.key("max_diff").num(max_diff);
  j.key("pass").boolean(pass);
  j.end();
  j.finish();
  return pass ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trajectory index for exact Frechet-distance queries against "
               "horizontal segments"};
  app.require_subcommand(1);

  BuildArgs ba;
  auto* build = app.add_subcommand("build-index", "Build and save a trajectory index");
  build->add_option("input", ba.input, "trajectory CSV")->required();
  build->add_option("output", ba.output, "index file to write")->required();
  build->add_option("--index-mode", ba.index_mode, "fast|brute")
      ->check(CLI::IsMember({"fast", "brute"}));
  build->add_option("--leaf-size", ba.leaf_size, "segment-tree leaf size")
      ->check(CLI::PositiveNumber);
  build->add_flag("--no-timing", ba.no_timing, "omit wall-time fields");

  QueryArgs qa;
  auto* query = app.add_subcommand("query", "Run one query against a CSV or index");
  query->add_option("input", qa.input, "trajectory CSV or index file")->required();
  query->add_option("--kind", qa.kind, "frechet|vertical|place")
      ->check(CLI::IsMember({"frechet", "vertical", "place"}));
  query->add_option("--u", qa.u, "subtrajectory start position");
  query->add_option("--v", qa.v, "subtrajectory end position");
  query->add_option("--q", qa.q, "frechet: x0,x1,y  vertical: x1,x2");
  auto* lopt = query->add_option("--L", qa.L, "place: segment length");
  query->add_option("--mode", qa.mode, "split-point search mode: exact|bisect")
      ->check(CLI::IsMember({"exact", "bisect"}));
  query->add_option("--index-mode", qa.index_mode, "fast|brute (CSV input only)")
      ->check(CLI::IsMember({"fast", "brute"}));
  query->add_flag("--json", "emit JSON (always on; accepted for compatibility)");
  query->add_flag("--no-timing", qa.no_timing, "omit wall-time fields");

  OracleArgs oa;
  auto* oracle = app.add_subcommand(
      "oracle-check", "Random instances on a CSV, engine vs reference oracles");
  oracle->add_option("input", oa.input, "trajectory CSV")->required();
  oracle->add_option("--trials", oa.trials, "number of random instances")
      ->check(CLI::PositiveNumber);
  oracle->add_option("--seed", oa.seed, "RNG seed");
  oracle->add_flag("--no-timing", oa.no_timing, "omit wall-time fields");

  BenchArgs bna;
  auto* bench = app.add_subcommand("bench", "Fast parallel index vs serial brute twin");
  bench->add_option("input", bna.input, "trajectory CSV")->required();
  bench->add_option("--queries", bna.queries, "batch size")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bna.seed, "RNG seed");
  bench->add_flag("--no-timing", bna.no_timing, "omit wall-time fields");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    qa.l_set = lopt->count() > 0;
    if (build->parsed()) return cmd_build_index(ba, out, err);
    if (query->parsed()) return cmd_query(qa, out, err);
    if (oracle->parsed()) return cmd_oracle_check(oa, out, err);
    if (bench->parsed()) return cmd_bench(bna, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "no subcommand\n";
  return 2;
}

}  // namespace fq::cli
