#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace ocq::io {

/// Lower-case hex SHA-256.
[[nodiscard]] std::string sha256_hex(std::string_view data);
[[nodiscard]] std::string sha256_hex(std::span<const unsigned char> data);
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `value`.
[[nodiscard]] std::string format_double(double value);

}  // namespace ocq::io
