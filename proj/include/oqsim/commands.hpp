#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "oqsim/config.hpp"

namespace oqsim {

// CLI overrides applied on top of the config file.
struct CommandOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> time_sign;       // -1 or +1
  std::optional<std::string> out_dir;
  std::optional<bool> exhaustive;
};

Config apply_overrides(Config cfg, const CommandOptions& options);

// Each command materializes the configured scenario, writes its CSV outputs
// plus a manifest.json into the output directory, and logs a short summary.
void cmd_run(const Config& cfg, std::ostream& log);
void cmd_unravel(const Config& cfg, std::ostream& log);
void cmd_wigner(const Config& cfg, std::ostream& log);
void cmd_gaussian(const Config& cfg, std::ostream& log);
void cmd_converge(const Config& cfg, std::ostream& log);

// Acceptance suite; returns the number of failed criteria. When out_dir is
// non-empty a report.csv is written there.
int cmd_verify(const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace oqsim
