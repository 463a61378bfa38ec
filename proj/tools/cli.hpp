#pragma once

#include <ostream>

namespace deformest::cli {

// Entry point shared by the executable and the tests. Exit codes: 0 success,
// 1 configuration/assumption/domain error, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Environment variable that overrides the default output directory of
// `experiment` (the --out-dir flag still wins).
inline constexpr const char* kOutputDirEnv = "DEFORMEST_OUTPUT_DIR";

}  // namespace deformest::cli
