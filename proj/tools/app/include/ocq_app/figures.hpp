#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "ocq/quench.hpp"
#include "ocq/spectroscopy.hpp"

namespace ocq::app {

/// Impurity entropy at a fixed probe time across particle numbers.
struct EntropyPoint {
    std::size_t particles = 0;
    double entropy = 0.0;
    double coherence = 0.0;
};

[[nodiscard]] std::vector<EntropyPoint> entropy_sweep(const std::shared_ptr<const PerturbedSpectrum>& spectrum,
                                                      std::span<const std::size_t> particles, double probe_time,
                                                      unsigned threads = 1);

/// Gaussian width used for the spectral panels. The default t_max/6 gives a
/// kernel narrower than the even-level spacing of 2, and every peak then has
/// the window's width; 0.4 smooths over the level comb so the envelope's
/// width is what gets measured.
inline constexpr double kSpectralPanelWindow = 0.4;

/// FrequencyGrid::standard widened by four kernel widths on each side. The
/// standard padding of 5 is too tight once a short window spreads each peak
/// over several level spacings.
[[nodiscard]] FrequencyGrid panel_frequency_grid(double omega_t, double kappa, std::size_t largest,
                                                 const WindowSpec& window);

struct SpectralCurve {
    std::size_t particles = 0;
    SpectralFunction spectrum;
    PeakStats peak;
};

[[nodiscard]] std::vector<SpectralCurve> spectral_sweep(const std::shared_ptr<const PerturbedSpectrum>& spectrum,
                                                        std::span<const std::size_t> particles, const TimeGrid& grid,
                                                        double omega_t, const WindowSpec& window,
                                                        const FrequencyGrid& omegas, unsigned threads = 1);

/// Echo dynamics, revivals and their match to level differences.
struct EchoAnalysis {
    ImpurityState state;
    std::vector<Revival> revivals;
    std::vector<double> fourier;      // amplitude at q * resolution, q = 1..
    FrequencyPeak dominant;
    double nearest_difference = 0.0;  // closest E'_n - E'_m among low-lying coupled levels
    double lowest_gap = 0.0;           // E'_1 - E'_0 over coupled levels
};

[[nodiscard]] EchoAnalysis echo_analysis(const std::shared_ptr<const PerturbedSpectrum>& spectrum,
                                         std::size_t particles, const TimeGrid& grid, unsigned threads = 1,
                                         const RevivalOptions& options = {});

}  // namespace ocq::app
