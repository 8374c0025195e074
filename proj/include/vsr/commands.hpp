#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace vsr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<long long> evals;
  std::optional<std::string> out_dir;
};

// Each command prints its diagnostics itself and returns the process exit
// code: 0 success, 2 usage or config problem, 3 runtime failure.
int cmd_evolve(const std::string& config_path, const CliOverrides& overrides);
int cmd_reassess(const std::string& manifest_path,
                 const CliOverrides& overrides);
int cmd_stats(const std::string& glob_a, const std::string& glob_b);
int cmd_replay(const std::string& manifest_path, const std::string& terrain_id,
               const std::string& out_path);

}  // namespace vsr
