#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ocq/impurity.hpp"
#include "ocq/quench.hpp"
#include "ocq/spectroscopy.hpp"

namespace ocq::io {

/// Everything a run depends on. Files are flat `key = value` text:
///
///     # comment
///     particles = 20
///     kappa     = 100
///     t_max     = 4*pi
///     dt        = pi/256
///     phases    = 0, pi/2, pi, 3*pi/2
///     sweep     = 5, 10, 20, 40      # or a range: 1..30
///
/// Real fields accept products and quotients of numbers and `pi`.
/// Unknown or repeated keys are errors.
struct Scenario {
    std::size_t particles = 10;
    double kappa = 0.0;
    double position = 0.0;
    double width = 0.0;
    double temperature = 0.0;
    std::size_t modes = 0;  // 0 selects 4096 for a contact, 1024 for a Gaussian impurity
    double t_max = 0.0;     // 0 selects 4 pi
    double dt = 0.0;        // 0 selects pi / 256
    double omega_t = 0.0;
    WindowSpec window;  // width 0 leaves the choice to the command
    std::vector<double> phases;   // empty selects {0, pi/2, pi, 3pi/2}
    std::uint64_t shots = 10'000;
    std::uint64_t seed = 0;
    std::vector<std::size_t> sweep;  // particle numbers for figure sweeps

    /// Fills the defaults listed above. Idempotent.
    void resolve_defaults();
    /// Throws UsageError naming the field and the reason.
    void validate() const;

    [[nodiscard]] ImpurityPotential potential() const { return {kappa, position, width}; }
    [[nodiscard]] TimeGrid time_grid() const { return TimeGrid::covering(t_max, dt); }

    /// One `key=value` line per field in fixed order with shortest round-trip numbers.
    [[nodiscard]] std::string canonical() const;
    [[nodiscard]] std::string hash() const;
};

[[nodiscard]] Scenario parse_scenario(std::string_view text, std::string_view origin = "<scenario>");
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);

/// Parses "2*pi", "pi/256", "3*pi/2", "1e-3". Throws UsageError on anything else.
[[nodiscard]] double parse_real_expression(std::string_view text);

}  // namespace ocq::io
