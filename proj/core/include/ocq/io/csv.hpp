#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ocq::io {

/// Comma-separated table preceded by `# key: value` metadata lines. The
/// scenario hash is always the first metadata line. Numbers use the
/// shortest round-trip form, so equal inputs give byte-equal files.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::string_view scenario_hash,
              std::vector<std::pair<std::string, std::string>> metadata, std::vector<std::string> columns);

    void row(std::initializer_list<double> values);
    void row(const std::vector<double>& values);
    /// Flushes and closes; throws if any write failed.
    void close();

    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

/// Rows of a CSV written by CsvWriter, metadata lines skipped.
struct CsvTable {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

}  // namespace ocq::io
