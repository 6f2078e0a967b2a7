// Command-line front end: keygen, enroll, verify, list, matrix, bench.
//
// Exit codes: 0 success / accept, 1 domain rejection (duplicate id, no
// match), 2 operational error.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fpix::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRejected = 1;
inline constexpr int kExitError = 2;

/// Threshold used by `verify` when no override is given and the store holds
/// fewer than two distinct records to derive one from.
inline constexpr double kExactMatchThreshold = 1e-9;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Distance cell format: "0" for zero, 4 decimals below 1e3, otherwise
/// mantissa with 4 decimals and an unpadded exponent ("6.7311e+3").
std::string format_distance(double value);

}  // namespace fpix::cli
