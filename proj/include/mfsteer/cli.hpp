#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "mfsteer/config.hpp"

namespace mfsteer::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kConfigError = 2,
  kInstability = 3,
  kCheckFailed = 4,
};

struct CommandOptions {
  std::string config_path;
  std::optional<std::string> control_path;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> snapshot_every;
  std::optional<std::uint64_t> seed_override;
};

/// Loads the configuration and applies command-line overrides.
ProblemConfig load_config(const CommandOptions& options);

int cmd_solve(const CommandOptions& options, std::ostream& log);
int cmd_forward(const CommandOptions& options, std::ostream& log);
int cmd_particles(const CommandOptions& options, std::ostream& log);
int cmd_gradcheck(const CommandOptions& options, std::ostream& log);

/// Entry point: parses argv, dispatches, and maps exceptions to exit codes.
int run(int argc, char** argv);

}  // namespace mfsteer::cli
