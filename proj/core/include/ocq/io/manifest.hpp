#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ocq::io {

/// Version string recorded in manifests and CSV metadata.
[[nodiscard]] const std::string& tool_version();

struct ManifestFile {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

/// What a command produced. Timestamps are the only fields that differ
/// between otherwise identical runs.
struct RunManifest {
    std::string command;
    std::string scenario_hash;
    std::string started;   // UTC, ISO 8601
    std::string finished;
    unsigned threads = 1;
    std::vector<ManifestFile> files;
    std::map<std::string, double> diagnostics;  // e.g. K-doubling deltas, sum-rule residuals

    /// Hashes `path` (inside `out_dir`) and appends it.
    void add_file(const std::filesystem::path& out_dir, const std::filesystem::path& path);
    void write(const std::filesystem::path& path) const;
};

[[nodiscard]] std::string utc_timestamp();

}  // namespace ocq::io
