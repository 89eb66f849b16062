#pragma once

#include <ostream>
#include <string>

namespace sobograph::cli {

/// Runs the command line `argv[0] subcommand ...` and returns the process exit
/// code: 0 ok, 1 I/O or parse, 2 validation failure, 3 assumption violation,
/// 4 numeric precondition.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// 12 significant digits, trailing zeros kept ("3.00000000000"); exactly
/// zero prints as "0". Locale independent.
std::string format_distance(double value);

}  // namespace sobograph::cli
