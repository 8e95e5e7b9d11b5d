#include "fq/trajectory_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fq {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& what) {
  std::ostringstream os;
  os << name << ":" << line << ": " << what;
  throw std::runtime_error(os.str());
}

// Strict double parse of a whole trimmed field.
bool parse_double(const std::string& field, double& out) {
  const std::string t = trim(field);
  if (t.empty()) return false;
  const char* begin = t.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end != begin + t.size()) return false;
  return std::isfinite(out);
}

}  // namespace

Trajectory parse_trajectory_text(const std::string& text, const std::string& name) {
  std::vector<Point> pts;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool seen_data = false;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) fail(name, lineno, "expected \"x,y\"");
    const std::string fx = trim(line.substr(0, comma));
    const std::string fy = trim(line.substr(comma + 1));
    if (!seen_data && fx == "x" && fy == "y") continue;  // header
    double x = 0.0, y = 0.0;
    if (!parse_double(fx, x) || !parse_double(fy, y))
      fail(name, lineno, "malformed coordinate pair \"" + line + "\"");
    pts.push_back(Point{x, y});
    seen_data = true;
  }
  if (pts.empty()) throw std::runtime_error(name + ": no trajectory points");
  return Trajectory(std::move(pts));
}

Trajectory parse_trajectory(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trajectory_text(buf.str(), path);
}

TrajectoryPos parse_position(const std::string& text, const Trajectory& traj) {
  const std::string t = trim(text);
  if (t == "start") return pos_start(traj);
  if (t == "end") return pos_end(traj);
  if (t.rfind("t=", 0) == 0) {
    double f = 0.0;
    if (!parse_double(t.substr(2), f) || f < 0.0 || f > 1.0)
      throw std::runtime_error("position \"" + text + "\": t= needs a fraction in [0,1]");
    if (traj.size() <= 1) return pos_start(traj);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) total += dist(traj[i], traj[i + 1]);
    if (total == 0.0) return pos_start(traj);
    double target = f * total;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
      const double len = dist(traj[i], traj[i + 1]);
      if (target <= len || i + 2 == traj.size()) {
        const double frac = len > 0.0 ? std::min(target / len, 1.0) : 0.0;
        return canonical_pos({static_cast<int>(i), frac}, traj.size());
      }
      target -= len;
    }
    return pos_end(traj);
  }
  const std::size_t colon = t.find(':');
  if (colon == std::string::npos)
    throw std::runtime_error("position \"" + text +
                             "\": expected start, end, edge:fraction or t=fraction");
  double edge = 0.0, frac = 0.0;
  if (!parse_double(t.substr(0, colon), edge) || edge != std::floor(edge))
    throw std::runtime_error("position \"" + text + "\": edge must be an integer");
  if (!parse_double(t.substr(colon + 1), frac))
    throw std::runtime_error("position \"" + text + "\": bad fraction");
  return canonical_pos({static_cast<int>(edge), frac}, traj.size());
}

}  // namespace fq
