#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "blochdyn/acceptance.hpp"

namespace blochdyn {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitPhysics = 3, kExitAcceptance = 4 };

struct CommandOptions {
  std::string command;
  std::optional<std::filesystem::path> scenario;
  std::filesystem::path out_dir = ".";
  int threads = 1;
  std::uint64_t seed = AcceptanceOptions{}.seed;
};

const std::vector<std::string>& command_names();

/// Runs one subcommand. Files go to options.out_dir as <prefix>_<kind>.csv
/// plus a <prefix>_<command>.json report, which is also echoed to `out`.
/// Diagnostics go to `err`. Returns the process exit code.
int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace blochdyn
