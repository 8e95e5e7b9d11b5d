#pragma once

#include <string>

#include "fq/geometry.hpp"

namespace fq {

// CSV ingestion: one "x,y" vertex per line. Blank lines and lines starting
// with '#' are ignored; a single "x,y" header line is allowed. Errors
// (malformed pair, non-finite value, no data at all) are reported as
// std::runtime_error citing the file name and 1-based line number.
Trajectory parse_trajectory(const std::string& path);

// Same parser over an in-memory buffer; `name` is used in error messages.
Trajectory parse_trajectory_text(const std::string& text,
                                 const std::string& name = "<memory>");

// Position grammar:
//   start          first point of the curve
//   end            last point of the curve
//   E:F            fraction F in [0,1] along edge E (0-based)
//   t=F            fraction F in [0,1] of total arc length
// Throws std::runtime_error on syntax errors, std::invalid_argument on
// out-of-range positions.
TrajectoryPos parse_position(const std::string& text, const Trajectory& traj);

}  // namespace fq
