#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ocq::app {

enum ExitCode : int { kOk = 0, kPhysicsFailure = 1, kUsageError = 2 };

struct CommandOptions {
    std::string command;
    std::optional<std::filesystem::path> scenario;  // oracle-check runs without one
    std::filesystem::path out_dir = "ocq-out";
    std::optional<std::filesystem::path> cache_dir;  // default SpectrumCache::default_directory()
    bool use_cache = true;
    unsigned threads = 1;
    std::optional<std::uint64_t> seed;
    bool svg = false;
};

[[nodiscard]] const std::vector<std::string>& command_names();

/// Runs one subcommand, writing CSVs and manifest.json into out_dir.
/// Errors are reported on `err` and mapped to the exit code.
[[nodiscard]] int run_command(const CommandOptions& options, std::ostream& log, std::ostream& err);

}  // namespace ocq::app
