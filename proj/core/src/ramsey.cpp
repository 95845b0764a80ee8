#include "ocq/ramsey.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ocq/error.hpp"
#include "ocq/parallel.hpp"

namespace ocq {

double ramsey_probability(Complex nu, double phi) {
    if (!(std::abs(nu) <= 1.0 + 1e-9)) {
        std::ostringstream msg;
        msg << "ramsey_probability: |nu| = " << std::abs(nu) << " exceeds 1";
        throw UsageError(msg.str());
    }
    const double p = 0.5 * (1.0 + std::cos(phi) * nu.real() - std::sin(phi) * nu.imag());
    return std::clamp(p, 0.0, 1.0);
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void check_phase_set(std::span<const double> phases, double t) {
    for (std::size_t a = 0; a < phases.size(); ++a) {
        for (std::size_t b = a + 1; b < phases.size(); ++b) {
            if (std::abs(std::sin(phases[a] - phases[b])) > 1e-9) return;
        }
    }
    std::ostringstream msg;
    msg << "ramsey: phases {";
    for (std::size_t a = 0; a < phases.size(); ++a) msg << (a ? ", " : "") << phases[a];
    msg << "} at t = " << t << " cannot separate Re nu from Im nu (singular design)";
    throw UsageError(msg.str());
}

struct Fit {
    double real, imag, var_real, var_imag, cov;
};

// Two-parameter weighted least squares. Solved in closed form; the design
// check above guarantees a positive determinant up to round-off.
Fit fit_phase_scan(std::span<const double> phases, std::span<const double> fractions,
                   std::span<const std::uint64_t> shots, double t) {
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        const double p = fractions[i];
        const double n = static_cast<double>(shots[i]);
        const double var_p = std::max(p * (1.0 - p), 0.25 / n) / n;
        const double w = 1.0 / (4.0 * var_p);  // y = 2p - 1
        const double x1 = std::cos(phases[i]);
        const double x2 = -std::sin(phases[i]);
        const double y = 2.0 * p - 1.0;
        a11 += w * x1 * x1;
        a12 += w * x1 * x2;
        a22 += w * x2 * x2;
        b1 += w * x1 * y;
        b2 += w * x2 * y;
    }
    const double det = a11 * a22 - a12 * a12;
    if (!(det > 1e-12 * std::max(a11 * a22, 1e-300))) check_phase_set({}, t);
    return Fit{(a22 * b1 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det, a22 / det, a11 / det, -a12 / det};
}

NuEstimate allocate_estimate(const TimeGrid& grid) {
    NuEstimate est;
    est.grid = grid;
    est.real.resize(grid.samples);
    est.imag.resize(grid.samples);
    est.se_real.resize(grid.samples);
    est.se_imag.resize(grid.samples);
    est.covariance.resize(grid.samples);
    return est;
}

void store(NuEstimate& est, std::size_t j, const Fit& f) {
    est.real[j] = f.real;
    est.imag[j] = f.imag;
    est.se_real[j] = std::sqrt(f.var_real);
    est.se_imag[j] = std::sqrt(f.var_imag);
    est.covariance[j] = f.cov;
}

}  // namespace

std::uint64_t record_stream_seed(std::uint64_t seed, std::size_t time_index, std::size_t phase_index) {
    std::uint64_t z = splitmix64(seed);
    z = splitmix64(z ^ static_cast<std::uint64_t>(time_index));
    return splitmix64(z ^ (static_cast<std::uint64_t>(phase_index) << 48));
}

void RamseyDataset::validate() const {
    const std::size_t nphi = phases.size();
    if (nphi == 0) throw UsageError("ramsey dataset: empty phase set");
    if (records.size() != grid.samples * nphi) throw UsageError("ramsey dataset: record count does not match grid x phases");
    for (const RamseyRecord& r : records) {
        if (r.shots == 0 || r.successes > r.shots) {
            std::ostringstream msg;
            msg << "ramsey dataset: record at t = " << r.t << ", phi = " << r.phi << " has " << r.successes
                << " successes out of " << r.shots << " shots";
            throw UsageError(msg.str());
        }
    }
    check_phase_set(phases, grid.time(0));
}

RamseyDataset simulate_measurement(const OverlapTrace& trace, std::span<const double> phases, std::uint64_t shots,
                                   std::uint64_t seed, unsigned threads, std::string source) {
    if (phases.empty()) throw UsageError("simulate_measurement: empty phase set");
    if (shots == 0) throw UsageError("simulate_measurement: shots must be positive");
    if (trace.values.size() != trace.grid.samples) throw UsageError("simulate_measurement: malformed trace");
    RamseyDataset ds;
    ds.grid = trace.grid;
    ds.phases.assign(phases.begin(), phases.end());
    ds.seed = seed;
    ds.source = std::move(source);
    const std::size_t nphi = phases.size();
    ds.records.resize(trace.grid.samples * nphi);
    parallel_for(ds.records.size(), threads, [&](std::size_t r) {
        const std::size_t j = r / nphi;
        const std::size_t k = r % nphi;
        const double p = ramsey_probability(trace.values[j], phases[k]);
        std::mt19937_64 gen(record_stream_seed(seed, j, k));
        std::binomial_distribution<std::uint64_t> draw(shots, p);
        ds.records[r] = RamseyRecord{j, trace.grid.time(j), phases[k], shots, draw(gen)};
    });
    return ds;
}

NuEstimate estimate_nu(const RamseyDataset& dataset) {
    dataset.validate();
    const std::size_t nphi = dataset.phases.size();
    NuEstimate est = allocate_estimate(dataset.grid);
    std::vector<double> fractions(nphi);
    std::vector<std::uint64_t> shots(nphi);
    for (std::size_t j = 0; j < dataset.grid.samples; ++j) {
        for (std::size_t k = 0; k < nphi; ++k) {
            const RamseyRecord& r = dataset.records[j * nphi + k];
            fractions[k] = static_cast<double>(r.successes) / static_cast<double>(r.shots);
            shots[k] = r.shots;
        }
        store(est, j, fit_phase_scan(dataset.phases, fractions, shots, dataset.grid.time(j)));
    }
    return est;
}

NuEstimate estimate_nu(const TimeGrid& grid, std::span<const double> phases, std::span<const double> probabilities,
                       std::uint64_t shots) {
    const std::size_t nphi = phases.size();
    if (nphi == 0 || probabilities.size() != grid.samples * nphi) {
        throw UsageError("estimate_nu: probability table does not match grid x phases");
    }
    if (shots == 0) throw UsageError("estimate_nu: shots must be positive");
    check_phase_set(phases, grid.time(0));
    NuEstimate est = allocate_estimate(grid);
    const std::vector<std::uint64_t> shot_counts(nphi, shots);
    for (std::size_t j = 0; j < grid.samples; ++j) {
        store(est, j, fit_phase_scan(phases, probabilities.subspan(j * nphi, nphi), shot_counts, grid.time(j)));
    }
    return est;
}

std::vector<Complex> NuEstimate::values() const {
    std::vector<Complex> out(real.size());
    for (std::size_t j = 0; j < real.size(); ++j) out[j] = Complex(real[j], imag[j]);
    return out;
}

ReconstructedSpectrum reconstruct_spectrum(const NuEstimate& estimate, double omega_t, const WindowSpec& window,
                                           const FrequencyGrid& omegas, unsigned threads) {
    const std::vector<Complex> nu = estimate.values();
    ReconstructedSpectrum out;
    out.spectrum = spectral_function(estimate.grid, nu, omega_t, window, omegas, threads);

    // A = sum_j 2 Re(a_j nu_j), a_j = c_j w_j dt e^{i(omega - omega_T) t_j}
    const TimeGrid& g = estimate.grid;
    const std::size_t n = g.samples;
    const double t_max = g.t_max();
    out.sigma.resize(omegas.points);
    parallel_for(omegas.points, threads, [&](std::size_t i) {
        const double detuning = omegas.at(i) - omega_t;
        double var = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double t = g.time(j);
            const double c = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
            const double scale = 2.0 * c * window.weight(t, t_max) * g.step;
            const double ar = scale * std::cos(detuning * t);
            const double ai = scale * std::sin(detuning * t);
            const double sr = estimate.se_real[j], si = estimate.se_imag[j];
            var += ar * ar * sr * sr + ai * ai * si * si - 2.0 * ar * ai * estimate.covariance[j];
        }
        out.sigma[i] = std::sqrt(std::max(var, 0.0));
    });
    return out;
}

}  // namespace ocq
