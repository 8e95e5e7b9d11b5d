#pragma once

#include <array>
#include <string>
#include <vector>

#include "fq/geometry.hpp"

namespace fq {

// The Frechet distance between a subtrajectory and a horizontal segment pq
// decomposes into six terms:
//   UP   distance from the subtrajectory start to p
//   VQ   distance from the subtrajectory end to q
//   HL   max distance from p to points with x <= x0
//   HR   max distance from q to points with x >= x1
//   HM   max vertical offset |y - p_i.y| over all points
//   BWD  max backward-pair distance at height y
// The value is the maximum of the six.
enum class Term : int { UP = 0, VQ = 1, HL = 2, HR = 3, HM = 4, BWD = 5 };

inline constexpr int kNumTerms = 6;

const char* term_name(Term t);

// Special witness indices for the subtrajectory endpoints when they are not
// vertices of the underlying trajectory.
inline constexpr int kWitnessU = -1;
inline constexpr int kWitnessV = -2;
inline constexpr int kWitnessNone = -3;

// One witness for an attaining term. For UP/VQ/HL/HR/HM, `a` is the
// attaining point and `ia` its vertex index (or kWitnessU / kWitnessV).
// For BWD, (a, b) is the backward pair, indices (ia, ib) with ia <= ib
// in traversal order and a.x >= b.x.
struct Witness {
  Term term = Term::UP;
  Point a{};
  Point b{};
  int ia = kWitnessNone;
  int ib = kWitnessNone;
};

struct FrechetBreakdown {
  double value = 0.0;
  std::array<double, kNumTerms> term_values{};  // indexed by Term
  std::vector<Witness> attaining;               // all terms within kTieTol of value

  double term(Term t) const { return term_values[static_cast<int>(t)]; }
  bool attains(Term t) const {
    for (const auto& w : attaining)
      if (w.term == t) return true;
    return false;
  }
};

// Accumulates tied witnesses for one term: keeps every offered witness whose
// value is within tol of the best seen, capped to a small fixed count.
class TieCollector {
 public:
  explicit TieCollector(double tol, std::size_t cap = 8) : tol_(tol), cap_(cap) {}

  void offer(double value, const Witness& w) {
    if (value > best_ + tol_) {
      best_ = value;
      // Drop entries that fell out of the tie band.
      std::vector<std::pair<double, Witness>> keep;
      for (auto& e : entries_)
        if (e.first >= best_ - tol_) keep.push_back(e);
      entries_ = std::move(keep);
    }
    if (value >= best_ - tol_ && entries_.size() < cap_) entries_.push_back({value, w});
    if (value > best_) best_ = value;
  }

  double best() const { return best_; }
  bool empty() const { return entries_.empty(); }
  std::vector<Witness> witnesses() const {
    std::vector<Witness> out;
    for (const auto& e : entries_)
      if (e.first >= best_ - tol_) out.push_back(e.second);
    return out;
  }

 private:
  double tol_;
  std::size_t cap_;
  double best_ = -1.0;  // distances are nonnegative
  std::vector<std::pair<double, Witness>> entries_;
};

}  // namespace fq
