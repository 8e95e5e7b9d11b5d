#pragma once

// Numeric tolerances used across the library. All comparisons between
// distance-like quantities use absolute tolerances; inputs are expected to
// live in a coordinate range where that is meaningful (|x|, |y| <~ 1e6).

namespace fq {

// General comparison tolerance for distance values.
inline constexpr double kTol = 1e-9;

// A term "attains" the maximum in a breakdown when it is within kTieTol of it.
inline constexpr double kTieTol = 1e-9;

// Relative interval width at which coordinate bisections stop.
// The actual cutoff is kBisectRel * (1 + |bracket width|).
inline constexpr double kBisectRel = 1e-10;

// Golden-section searches in the oracles shrink their bracket below this.
inline constexpr double kGoldenTol = 1e-10;

// Hard cap on bisection steps; generous, only guards against cycling.
inline constexpr int kMaxBisectSteps = 200;

}  // namespace fq
