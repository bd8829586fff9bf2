#pragma once

#include <iosfwd>

namespace hausdorff {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;

/// hausdorff-cli SCENARIO.json [--out DIR] [--seed N] [--samples N] [--verbose]
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hausdorff
