#include "ocq/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ocq/error.hpp"
#include "ocq/parallel.hpp"

namespace ocq {

std::string_view to_string(WindowShape shape) {
    switch (shape) {
        case WindowShape::gaussian: return "gaussian";
        case WindowShape::rectangular: return "rectangular";
    }
    return "unknown";
}

double WindowSpec::weight(double t, double t_max) const noexcept {
    if (shape == WindowShape::rectangular) return 1.0;
    const double tau = resolved_width(t_max);
    return std::exp(-0.5 * (t * t) / (tau * tau));
}

FrequencyGrid FrequencyGrid::spanning(double lo, double hi, std::size_t points) {
    if (points < 2 || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw UsageError("frequency grid: need finite lo < hi and at least two points");
    }
    return FrequencyGrid{lo, (hi - lo) / static_cast<double>(points - 1), points};
}

FrequencyGrid FrequencyGrid::standard(double omega_t, double kappa, std::size_t particles) {
    const double upper = 5.0 * std::max(1.0, kappa * std::sqrt(static_cast<double>(particles)) / 100.0);
    return spanning(omega_t - 5.0, omega_t + upper, 2048);
}

namespace {

struct Kernel {
    std::vector<Complex> weighted;  // c_j w(t_j) nu_j dt
    std::vector<double> times;

    [[nodiscard]] double evaluate(double detuning) const {
        // sum_j weighted_j e^{i detuning t_j}, phases advanced by rotation
        // and refreshed every 64 samples to bound drift
        Complex acc(0.0, 0.0);
        const std::size_t n = times.size();
        const double dt = n > 1 ? times[1] - times[0] : 0.0;
        const Complex rotation = std::polar(1.0, detuning * dt);
        Complex phase(1.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j % 64 == 0) phase = std::polar(1.0, detuning * times[j]);
            acc += weighted[j] * phase;
            phase *= rotation;
        }
        return 2.0 * acc.real();
    }
};

Kernel make_kernel(const TimeGrid& times, std::span<const Complex> nu, const WindowSpec& window) {
    const std::size_t n = times.samples;
    if (nu.size() != n || n < 2) throw UsageError("spectral_function: trace length does not match its time grid");
    const double t_max = times.t_max();
    if (window.shape == WindowShape::gaussian && window.width > t_max / 3.0) {
        std::ostringstream msg;
        msg << "spectral_function: window width " << window.width << " exceeds t_max/3 = " << t_max / 3.0;
        throw UsageError(msg.str());
    }
    if (!(window.width >= 0.0)) throw UsageError("spectral_function: window width must be non-negative");
    Kernel k;
    k.weighted.resize(n);
    k.times.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = times.time(j);
        const double c = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
        k.times[j] = t;
        k.weighted[j] = c * window.weight(t, t_max) * times.step * nu[j];
    }
    return k;
}

}  // namespace

SpectralFunction spectral_function(const TimeGrid& times, std::span<const Complex> nu, double omega_t,
                                   const WindowSpec& window, const FrequencyGrid& omegas, unsigned threads) {
    if (omegas.points < 2) throw UsageError("spectral_function: frequency grid needs at least two points");
    const Kernel kernel = make_kernel(times, nu, window);
    const double nyquist = std::numbers::pi / times.step;
    if (std::max(std::abs(omegas.start - omega_t), std::abs(omegas.stop() - omega_t)) > nyquist) {
        std::ostringstream msg;
        msg << "spectral_function: frequencies up to " << std::max(std::abs(omegas.start - omega_t), std::abs(omegas.stop() - omega_t))
            << " from omega_T exceed the Nyquist limit pi/dt = " << nyquist;
        throw UsageError(msg.str());
    }

    SpectralFunction sf;
    sf.grid = omegas;
    sf.threshold = omega_t;
    sf.window = window;
    if (sf.window.shape == WindowShape::gaussian) sf.window.width = window.resolved_width(times.t_max());
    sf.values.resize(omegas.points);
    parallel_for(omegas.points, threads, [&](std::size_t i) { sf.values[i] = kernel.evaluate(omegas.at(i) - omega_t); });

    double captured = 0.0;
    for (std::size_t i = 0; i < omegas.points; ++i) {
        const double c = (i == 0 || i + 1 == omegas.points) ? 0.5 : 1.0;
        captured += c * sf.values[i];
    }
    sf.captured_weight = captured * omegas.step / (2.0 * std::numbers::pi);

    // A is a trigonometric polynomial of period 2 pi / dt with frequencies
    // below n dt, so 2n equispaced samples integrate it exactly
    const std::size_t band_points = 2 * times.samples;
    const double band_step = 2.0 * nyquist / static_cast<double>(band_points);
    std::vector<double> band(band_points);
    parallel_for(band_points, threads, [&](std::size_t q) {
        band[q] = kernel.evaluate(-nyquist + band_step * static_cast<double>(q));
    });
    double total = 0.0;
    for (double a : band) total += a;
    sf.sum_rule = total * band_step / (2.0 * std::numbers::pi);
    return sf;
}

std::vector<double> spectral_function_two_sided(const TimeGrid& times, std::span<const Complex> nu, double omega_t,
                                                const WindowSpec& window, const FrequencyGrid& omegas) {
    const Kernel kernel = make_kernel(times, nu, window);
    const std::size_t n = times.samples;
    std::vector<double> out(omegas.points);
    for (std::size_t i = 0; i < omegas.points; ++i) {
        const double detuning = omegas.at(i) - omega_t;
        Complex acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double t = times.time(j);
            acc += kernel.weighted[j] * std::polar(1.0, detuning * t);
            // mirrored sample at -t carries conj(nu); the j = 0 sample is
            // shared between both halves and already has weight 1/2
            acc += std::conj(kernel.weighted[j]) * std::polar(1.0, -detuning * t);
        }
        out[i] = acc.real();
    }
    return out;
}

void SpectralFunction::check_invariants() const {
    if (values.empty()) throw NumericalError("spectral function is empty");
    const double peak = *std::max_element(values.begin(), values.end());
    const double low = *std::min_element(values.begin(), values.end());
    if (window.shape == WindowShape::gaussian && low < -1e-6 * peak) {
        std::ostringstream msg;
        msg << "spectral function: min A = " << low << " violates positivity (max A = " << peak << ")";
        throw NumericalError(msg.str());
    }
    if (std::abs(sum_rule - 1.0) > 0.02) {
        std::ostringstream msg;
        msg << "spectral function: sum rule " << sum_rule << " deviates from 1 by more than 2%";
        throw NumericalError(msg.str());
    }
}

PeakStats peak_stats(const SpectralFunction& sf) {
    const std::vector<double>& a = sf.values;
    const std::size_t n = a.size();
    if (n < 3) throw UsageError("peak_stats: need at least three samples");
    const auto top = static_cast<std::size_t>(std::max_element(a.begin(), a.end()) - a.begin());
    if (top == 0 || top + 1 == n) {
        throw NumericalError("peak_stats: maximum sits on the frequency-grid edge (window too narrow)");
    }
    PeakStats stats;
    const double h = sf.grid.step;
    const double y0 = a[top - 1], y1 = a[top], y2 = a[top + 1];
    const double curvature = y0 - 2.0 * y1 + y2;
    const double shift = curvature < 0.0 ? 0.5 * (y0 - y2) / curvature : 0.0;
    stats.position = sf.grid.at(top) + shift * h;
    stats.height = y1 - 0.25 * (y0 - y2) * shift;

    const double half = 0.5 * stats.height;
    std::size_t l = top;
    while (l > 0 && a[l] >= half) --l;
    std::size_t r = top;
    while (r + 1 < n && a[r] >= half) ++r;
    if (a[l] >= half || a[r] >= half) {
        throw NumericalError("peak_stats: half maximum is not reached inside the frequency grid");
    }
    const double left = sf.grid.at(l) + h * (half - a[l]) / (a[l + 1] - a[l]);
    const double right = sf.grid.at(r - 1) + h * (a[r - 1] - half) / (a[r - 1] - a[r]);
    stats.fwhm = right - left;

    for (std::size_t i = 0; i < n; ++i) stats.area += ((i == 0 || i + 1 == n) ? 0.5 : 1.0) * a[i];
    stats.area *= h;

    // another local maximum of at least half the top height, separated from
    // it by a dip below that height, makes the report ambiguous
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (i == top || !(a[i] > a[i - 1] && a[i] >= a[i + 1]) || a[i] < half) continue;
        const auto [lo, hi] = std::minmax(i, top);
        const double dip = *std::min_element(a.begin() + static_cast<std::ptrdiff_t>(lo),
                                             a.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
        if (dip < 0.9 * a[i]) {
            stats.multimodal = true;
            break;
        }
    }
    return stats;
}

PhaseShift effective_phase_shift(const PerturbedSpectrum& spectrum, std::size_t particles) {
    if (!spectrum.potential.is_point() || !spectrum.potential.is_centered()) {
        throw UsageError("effective_phase_shift: defined only for a contact impurity at the trap centre");
    }
    if (particles == 0) throw UsageError("effective_phase_shift: need at least one particle");
    const std::size_t j = (particles - 1) / 2;  // highest occupied even orbital is 2j
    const std::vector<double> even = spectrum.coupled_energies();
    PhaseShift out;
    if (spectrum.potential.strength == 0.0) return out;
    if (j + 1 >= even.size()) throw UsageError("effective_phase_shift: Fermi level lies outside the truncated basis");
    // truncation can overshoot the pi/2 asymptote by ~1e-5 at huge kappa
    out.delta = std::clamp(0.5 * std::numbers::pi * (even[j] - (2.0 * static_cast<double>(j) + 0.5)),
                           -0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
    out.alpha = 2.0 * out.delta * out.delta / (std::numbers::pi * std::numbers::pi);
    return out;
}

}  // namespace ocq
