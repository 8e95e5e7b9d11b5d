#pragma once

#include <ostream>

namespace fq::cli {

// Full command-line front end; argv[0] is skipped. Returns the process exit
// code: 0 success, 1 verification failure, 2 usage or input error. All JSON
// goes to `out`, diagnostics and FQ_LOG traces to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fq::cli
