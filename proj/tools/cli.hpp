#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace opiqsdc::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kConfigEnv = "OPIQSDC_CONFIG";

enum ExitCode : int { kOk = 0, kUsage = 2, kComputation = 3 };

/// Entry point shared by the executable and the tests. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace opiqsdc::cli
