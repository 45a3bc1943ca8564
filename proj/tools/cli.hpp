#pragma once

#include <iosfwd>

namespace pathmine::cli {

/// Entry point behind the `pathmine` binary. Exit codes: 0 success, 1 usage
/// error, 2 data error; failures are printed to `err` with an `error:` prefix.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pathmine::cli
