#include "ocq_app/figures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ocq/parallel.hpp"

namespace ocq::app {

std::vector<EntropyPoint> entropy_sweep(const std::shared_ptr<const PerturbedSpectrum>& spectrum,
                                        std::span<const std::size_t> particles, double probe_time, unsigned threads) {
    std::vector<EntropyPoint> out(particles.size());
    const double times[] = {probe_time};
    parallel_for(particles.size(), threads, [&](std::size_t i) {
        const QuenchScenario sc{particles[i], spectrum};
        const Complex nu = nu_zero_temperature_at(sc, times).front();
        out[i] = EntropyPoint{particles[i], impurity_entropy(std::abs(nu)), std::abs(nu)};
    });
    return out;
}

FrequencyGrid panel_frequency_grid(double omega_t, double kappa, std::size_t largest, const WindowSpec& window) {
    const auto base = FrequencyGrid::standard(omega_t, kappa, largest);
    const double pad = window.shape == WindowShape::gaussian && window.width > 0.0 ? 4.0 / window.width : 0.0;
    return FrequencyGrid::spanning(base.start - pad, base.stop() + pad, base.points);
}

std::vector<SpectralCurve> spectral_sweep(const std::shared_ptr<const PerturbedSpectrum>& spectrum,
                                          std::span<const std::size_t> particles, const TimeGrid& grid, double omega_t,
                                          const WindowSpec& window, const FrequencyGrid& omegas, unsigned threads) {
    std::vector<SpectralCurve> out;
    out.reserve(particles.size());
    for (std::size_t n : particles) {
        const auto trace = nu_zero_temperature(QuenchScenario{n, spectrum}, grid, threads);
        trace.check_invariants();
        SpectralCurve curve;
        curve.particles = n;
        curve.spectrum = spectral_function(trace, omega_t, window, omegas, threads);
        curve.peak = peak_stats(curve.spectrum);
        out.push_back(std::move(curve));
    }
    return out;
}

EchoAnalysis echo_analysis(const std::shared_ptr<const PerturbedSpectrum>& spectrum, std::size_t particles,
                           const TimeGrid& grid, unsigned threads, const RevivalOptions& options) {
    const auto trace = nu_zero_temperature(QuenchScenario{particles, spectrum}, grid, threads);
    trace.check_invariants();
    EchoAnalysis out;
    out.state = impurity_observables(trace);
    out.revivals = revival_times(out.state, *spectrum, options);
    out.fourier = echo_fourier_amplitudes(out.state);
    out.dominant = dominant_echo_frequency(out.state);

    std::vector<double> levels = spectrum->coupled_energies();
    if (levels.size() > options.levels) levels.resize(options.levels);
    if (levels.size() >= 2) out.lowest_gap = levels[1] - levels[0];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < levels.size(); ++a) {
        for (std::size_t b = a + 1; b < levels.size(); ++b) {
            const double gap = levels[b] - levels[a];
            if (std::abs(gap - out.dominant.frequency) < std::abs(best - out.dominant.frequency)) best = gap;
        }
    }
    out.nearest_difference = best;
    return out;
}

}  // namespace ocq::app
