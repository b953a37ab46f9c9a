#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lpm::cli {

/// Exit codes of run().
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 2;
inline constexpr int kRuntimeError = 3;

/// Entry point of the `lpm` tool. args[0] is the program name. Normal output
/// goes to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lpm::cli
