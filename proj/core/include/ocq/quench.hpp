#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ocq/spectrum.hpp"

namespace ocq {

using Complex = std::complex<double>;

/// Uniform grid t_j = j * step, j = 0 .. samples-1.
struct TimeGrid {
    double step = 0.0;
    std::size_t samples = 0;

    [[nodiscard]] double time(std::size_t j) const noexcept { return step * static_cast<double>(j); }
    [[nodiscard]] double t_max() const noexcept { return time(samples - 1); }

    /// Grid covering [0, t_max]; t_max must be an integer multiple of step.
    [[nodiscard]] static TimeGrid covering(double t_max, double step);
};

enum class Ensemble : std::uint8_t { zero_temperature, grand_canonical, canonical_oracle };

/// Initial state of the gas together with the perturbed spectrum it is
/// quenched into.
struct QuenchScenario {
    std::size_t particles = 1;
    std::shared_ptr<const PerturbedSpectrum> spectrum;
    double temperature = 0.0;
    Ensemble ensemble = Ensemble::zero_temperature;
    /// K - N >= 16 and K >= 8N. Oracle comparisons on tiny bases switch this off.
    bool enforce_buffer = true;

    void validate() const;
};

/// nu(t) = <Psi| e^{iHt} e^{-i(H+H_I)t} |Psi> on a time grid.
struct OverlapTrace {
    TimeGrid grid;
    std::vector<Complex> values;
    std::size_t particles = 0;
    double temperature = 0.0;
    ImpurityPotential potential;
    std::size_t modes = 0;

    /// |nu| <= 1 + 1e-9 everywhere and nu(0) = 1 within 1e-9.
    void check_invariants() const;
};

/// Builds M_ij(t) = e^{iE_i t} sum_k S_ik S_jk e^{-iE'_k t} over the N lowest
/// unperturbed orbitals and returns det M(t) by pivoted LU. Orbitals that
/// share no perturbed level are factored into independent blocks (for a
/// centred contact impurity the odd orbitals drop out exactly).
[[nodiscard]] OverlapTrace nu_zero_temperature(const QuenchScenario& scenario, const TimeGrid& grid,
                                               unsigned threads = 1);

/// Same determinant at arbitrary (also negative) times.
[[nodiscard]] std::vector<Complex> nu_zero_temperature_at(const QuenchScenario& scenario,
                                                          std::span<const double> times, unsigned threads = 1);

/// Grand-canonical thermal overlap det[1 - n + n e^{iht} e^{-ih't}] with
/// Fermi-Dirac occupations n fixed by sum_n f(E_n) = N.
[[nodiscard]] OverlapTrace nu_thermal(const QuenchScenario& scenario, const TimeGrid& grid, unsigned threads = 1);

/// Chemical potential with sum_n 1/(exp((E_n - mu)/T) + 1) = particles,
/// bisected to 1e-10.
[[nodiscard]] double solve_chemical_potential(std::span<const double> energies, double particles,
                                              double temperature);

/// Reduced two-level state of the impurity along a trace.
struct ImpurityState {
    TimeGrid grid;
    std::vector<double> coherence;  // |nu(t)|
    std::vector<double> entropy;    // von Neumann, base 2
    std::vector<double> echo;       // Loschmidt echo |nu|^2
};

/// rho_s has eigenvalues (1 +- |nu|)/2.
[[nodiscard]] ImpurityState impurity_observables(const OverlapTrace& trace);

/// Base-2 entropy of the impurity for a given coherence magnitude.
[[nodiscard]] double impurity_entropy(double coherence);

struct Revival {
    double time = 0.0;
    double echo = 0.0;
    double resonance = 0.0;  // matched level difference E'_n - E'_m
    int multiple = 1;        // time ~ 2 pi multiple / resonance
    double residual = 0.0;   // |time - matched| / matched
};

struct RevivalOptions {
    std::size_t levels = 12;         // lowest coupled levels entering the match
    int max_multiple = 4;
    double min_prominence = 0.25;    // fraction of the echo's range
};

/// Prominent local maxima of L(t), each matched to 2 pi q / (E'_n - E'_m)
/// over low-lying coupled levels.
[[nodiscard]] std::vector<Revival> revival_times(const ImpurityState& state, const PerturbedSpectrum& spectrum,
                                                 const RevivalOptions& options = {});

struct FrequencyPeak {
    double frequency = 0.0;
    double amplitude = 0.0;
    double resolution = 0.0;  // Fourier grid step 2 pi / t_max
};

/// |int (L(t) - mean L) e^{i omega_q t} dt| on omega_q = q 2 pi / t_max,
/// q = 1 .. samples/2 (entry q-1).
[[nodiscard]] std::vector<double> echo_fourier_amplitudes(const ImpurityState& state);

/// Largest nonzero-frequency component of L(t) - mean(L) on the Fourier grid.
[[nodiscard]] FrequencyPeak dominant_echo_frequency(const ImpurityState& state);

}  // namespace ocq
