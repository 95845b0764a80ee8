#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ocq/quench.hpp"
#include "ocq/spectroscopy.hpp"

namespace ocq {

/// P_g(t, phi) = [1 + cos(phi) Re nu - sin(phi) Im nu] / 2. Rejects |nu| > 1.
[[nodiscard]] double ramsey_probability(Complex nu, double phi);

struct RamseyRecord {
    std::size_t time_index = 0;
    double t = 0.0;
    double phi = 0.0;
    std::uint64_t shots = 0;
    std::uint64_t successes = 0;
};

/// Records are stored time-major, phase-minor.
struct RamseyDataset {
    TimeGrid grid;
    std::vector<double> phases;
    std::vector<RamseyRecord> records;
    std::uint64_t seed = 0;
    std::string source;  // scenario hash of the trace that was measured

    /// successes <= shots, and every time has two phases with sin(phi_a - phi_b) != 0.
    void validate() const;
};

/// Seed of the generator used for record (t_index, phase_index). Depends
/// only on its arguments, so scheduling never changes the draws.
[[nodiscard]] std::uint64_t record_stream_seed(std::uint64_t seed, std::size_t time_index, std::size_t phase_index);

/// Binomial(shots, P_g) successes for every (t, phi) of the trace.
[[nodiscard]] RamseyDataset simulate_measurement(const OverlapTrace& trace, std::span<const double> phases,
                                                 std::uint64_t shots, std::uint64_t seed, unsigned threads = 1,
                                                 std::string source = {});

struct NuEstimate {
    TimeGrid grid;
    std::vector<double> real;
    std::vector<double> imag;
    std::vector<double> se_real;
    std::vector<double> se_imag;
    std::vector<double> covariance;  // cov(real, imag)

    [[nodiscard]] std::vector<Complex> values() const;
};

/// Weighted least squares per time on 2P - 1 = cos(phi) nu_R - sin(phi) nu_I
/// with variance max(p(1-p), 1/(4 shots)) / shots per record.
[[nodiscard]] NuEstimate estimate_nu(const RamseyDataset& dataset);

/// Same fit from exact probabilities laid out time-major over `phases`;
/// `shots` only sets the weights.
[[nodiscard]] NuEstimate estimate_nu(const TimeGrid& grid, std::span<const double> phases,
                                     std::span<const double> probabilities, std::uint64_t shots);

struct ReconstructedSpectrum {
    SpectralFunction spectrum;
    std::vector<double> sigma;  // 1-sigma band from the estimate's standard errors
};

/// Spectral function of nu-hat, with an uncertainty band propagated
/// linearly through the transform.
[[nodiscard]] ReconstructedSpectrum reconstruct_spectrum(const NuEstimate& estimate, double omega_t,
                                                         const WindowSpec& window, const FrequencyGrid& omegas,
                                                         unsigned threads = 1);

}  // namespace ocq
