#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fed::cli {

/// Runs the `fed` command line. Returns the process exit status:
/// 0 success, 2 I/O, 3 provider, 4 validation, 5 internal.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fed::cli
