#pragma once

#include <ostream>

namespace hbc::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;    // I/O, malformed input, usage
inline constexpr int exit_no_frames = 2;  // decode found no valid frame

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace hbc::cli
