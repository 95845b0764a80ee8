#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "ocq/spectrum.hpp"

namespace ocq::io {

/// Bumped whenever a change to the solvers can alter a stored spectrum.
inline constexpr std::string_view kSolverVersion = "ocq-solver-3";

/// Environment variable that overrides the default cache directory.
inline constexpr const char* kCacheEnvVar = "OCQ_CACHE_DIR";

/// Content-addressed store of perturbed spectra. Entries are written to a
/// temporary file and renamed into place, so readers only ever see complete
/// files; a payload digest guards against truncation or corruption, and any
/// mismatch is treated as a miss.
class SpectrumCache {
public:
    explicit SpectrumCache(std::filesystem::path directory);

    /// $OCQ_CACHE_DIR, else $XDG_CACHE_HOME/ocq, else ~/.cache/ocq.
    [[nodiscard]] static std::filesystem::path default_directory();

    [[nodiscard]] static std::string key(const ImpurityPotential& potential, std::size_t modes,
                                         const SolverOptions& options, std::string_view version = kSolverVersion);

    [[nodiscard]] std::optional<PerturbedSpectrum> load(const std::string& key) const;
    void store(const std::string& key, const PerturbedSpectrum& spectrum) const;

    /// Loads the spectrum or computes and stores it. `hit` reports which.
    [[nodiscard]] PerturbedSpectrum get_or_compute(const ImpurityPotential& potential, std::size_t modes,
                                                   const SolverOptions& options = {}, bool* hit = nullptr) const;

    [[nodiscard]] const std::filesystem::path& directory() const noexcept { return dir_; }
    [[nodiscard]] std::filesystem::path entry_path(const std::string& key) const;

private:
    std::filesystem::path dir_;
};

}  // namespace ocq::io
