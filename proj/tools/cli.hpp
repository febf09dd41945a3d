#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fgym::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailures = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kSeedEnvVar = "FORECAST_GYM_SEED";

/// Entry point shared by the fgym binary and the tests. `args` excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fgym::cli
