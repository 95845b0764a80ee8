#include "ocq/io/manifest.hpp"

#include <json.hpp>

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>

#include "ocq/error.hpp"
#include "ocq/io/digest.hpp"

namespace ocq::io {

const std::string& tool_version() {
    static const std::string version = "0.3.0";
    return version;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::array<char, 32> buf{};
    const std::size_t n = std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return std::string(buf.data(), n);
}

void RunManifest::add_file(const std::filesystem::path& out_dir, const std::filesystem::path& path) {
    ManifestFile f;
    f.path = std::filesystem::relative(path, out_dir).generic_string();
    f.sha256 = sha256_file(path);
    f.bytes = std::filesystem::file_size(path);
    files.push_back(std::move(f));
}

void RunManifest::write(const std::filesystem::path& path) const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["scenario_hash"] = scenario_hash;
    j["tool_version"] = tool_version();
    j["started"] = started;
    j["finished"] = finished;
    j["threads"] = threads;
    j["files"] = nlohmann::ordered_json::array();
    for (const auto& f : files) j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    j["diagnostics"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : diagnostics) j["diagnostics"][k] = v;
    std::ofstream out(path);
    out << j.dump(2) << '\n';
    if (!out) throw NumericalError("cannot write manifest " + path.string());
}

}  // namespace ocq::io
