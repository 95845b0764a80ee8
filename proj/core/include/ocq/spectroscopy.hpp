#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ocq/quench.hpp"
#include "ocq/spectrum.hpp"

namespace ocq {

enum class WindowShape : std::uint8_t { gaussian = 0, rectangular = 1 };

[[nodiscard]] std::string_view to_string(WindowShape shape);

/// Time-domain taper applied before the transform. A Gaussian of width tau
/// has a positive transform, which keeps A(omega) >= 0.
struct WindowSpec {
    WindowShape shape = WindowShape::gaussian;
    double width = 0.0;  // tau; 0 selects t_max / 6

    [[nodiscard]] double resolved_width(double t_max) const noexcept { return width > 0.0 ? width : t_max / 6.0; }
    [[nodiscard]] double weight(double t, double t_max) const noexcept;
};

struct FrequencyGrid {
    double start = 0.0;
    double step = 0.0;
    std::size_t points = 0;

    [[nodiscard]] double at(std::size_t i) const noexcept { return start + step * static_cast<double>(i); }
    [[nodiscard]] double stop() const noexcept { return at(points - 1); }

    [[nodiscard]] static FrequencyGrid spanning(double lo, double hi, std::size_t points);
    /// omega - omega_T in [-5, 5 max(1, kappa sqrt(N) / 100)] on 2048 points.
    [[nodiscard]] static FrequencyGrid standard(double omega_t, double kappa, std::size_t particles);
};

struct SpectralFunction {
    FrequencyGrid grid;
    std::vector<double> values;
    double threshold = 0.0;  // omega_T
    WindowSpec window;       // width already resolved
    /// int A domega / 2pi over the whole band the time step resolves,
    /// [omega_T - pi/dt, omega_T + pi/dt], by a periodic trapezoid rule that
    /// is exact for the sampled transform.
    double sum_rule = 0.0;
    /// The same integral restricted to `grid`.
    double captured_weight = 0.0;

    /// Positivity (Gaussian window only) and the sum rule to 2%.
    void check_invariants() const;
};

/// A(omega) = 2 Re int_0^t_max w(t) e^{i(omega - omega_T)t} nu(t) dt by the
/// trapezoid rule on the stored samples. The one-sided form relies on
/// nu(-t) = conj(nu(t)).
[[nodiscard]] SpectralFunction spectral_function(const TimeGrid& times, std::span<const Complex> nu,
                                                 double omega_t, const WindowSpec& window,
                                                 const FrequencyGrid& omegas, unsigned threads = 1);

[[nodiscard]] inline SpectralFunction spectral_function(const OverlapTrace& trace, double omega_t,
                                                        const WindowSpec& window, const FrequencyGrid& omegas,
                                                        unsigned threads = 1) {
    return spectral_function(trace.grid, trace.values, omega_t, window, omegas, threads);
}

/// Same quantity from the explicit two-sided sum over t in [-t_max, t_max]
/// with nu(-t) := conj(nu(t)). Slower; kept as a consistency reference.
[[nodiscard]] std::vector<double> spectral_function_two_sided(const TimeGrid& times, std::span<const Complex> nu,
                                                              double omega_t, const WindowSpec& window,
                                                              const FrequencyGrid& omegas);

struct PeakStats {
    double position = 0.0;  // parabolic vertex through the three top samples
    double height = 0.0;
    double fwhm = 0.0;
    double area = 0.0;      // int A domega on the grid
    bool multimodal = false;
};

/// Tallest peak of A. Throws NumericalError if it sits on the grid edge or
/// its half-maximum is not crossed inside the grid.
[[nodiscard]] PeakStats peak_stats(const SpectralFunction& sf);

struct PhaseShift {
    double delta = 0.0;
    double alpha = 0.0;  // 2 delta^2 / pi^2
};

/// delta = (pi/2)(E'_j - E_j) for the highest occupied even orbital of an
/// N-particle Fermi sea; the even levels are spaced by 2, so a full spacing
/// corresponds to a phase shift of pi. Centred contact impurities only.
[[nodiscard]] PhaseShift effective_phase_shift(const PerturbedSpectrum& spectrum, std::size_t particles);

}  // namespace ocq
