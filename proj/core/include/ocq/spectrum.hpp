#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "ocq/impurity.hpp"
#include "ocq/oscillator_basis.hpp"

namespace ocq {

enum class SolverMethod : std::uint8_t { rank_one = 0, dense_gaussian = 1 };

/// How the contact coupling enters the truncated Hamiltonian.
///
/// `bare` uses diag(E) + kappa v v^T literally. Its low levels converge only
/// like K^(-1/2) because the omitted modes contribute
/// tail = sum_{n>=K} phi_n(d)^2 / E_n to the secular function.
/// `renormalized` folds that tail into the coupling,
/// 1/kappa_K = 1/kappa + tail, which makes low-lying levels converge like
/// K^(-3/2). Only the contact (width == 0) path is affected.
enum class CouplingScheme : std::uint8_t { bare = 0, renormalized = 1 };

[[nodiscard]] std::string_view to_string(SolverMethod method);
[[nodiscard]] std::string_view to_string(CouplingScheme scheme);

struct SolverOptions {
    CouplingScheme coupling = CouplingScheme::renormalized;
    std::size_t min_modes = 16;            // lowered only by oracle comparisons
    std::size_t gaussian_mode_cap = 1024;
    std::size_t quadrature_factor = 4;     // Gauss-Hermite nodes per mode
};

/// Eigenbasis of the trap plus impurity in a truncated oscillator basis.
struct PerturbedSpectrum {
    Eigen::VectorXd energies;        // E'_k ascending
    Eigen::MatrixXd overlaps;        // S(n, k) = <phi_n | chi_k>
    std::vector<std::uint8_t> coupled;  // 0 when chi_k is an untouched phi_n
    SolverMethod method = SolverMethod::rank_one;
    CouplingScheme coupling = CouplingScheme::bare;
    ImpurityPotential potential;
    double effective_strength = 0.0;  // coupling used in the truncated H'

    [[nodiscard]] std::size_t modes() const noexcept { return static_cast<std::size_t>(energies.size()); }
    [[nodiscard]] Eigen::VectorXd unperturbed_energies() const;
    /// Ascending energies of the levels the impurity actually couples to.
    [[nodiscard]] std::vector<double> coupled_energies() const;
    /// max |S^T S - I|.
    [[nodiscard]] double orthogonality_defect() const;
};

/// sum_{n >= modes} phi_n(position)^2 / (n + 1/2), the part of the contact
/// Green's function at E = 0 that a truncated basis misses.
[[nodiscard]] double truncated_green_tail(std::size_t modes, double position);

/// Diagonalizes H' = H_trap + V_impurity in `basis`.
///
/// Contact impurities use the rank-one secular solver. Gaussian impurities
/// build V_mn = kappa (2 pi sigma^2)^(-1/2) int phi_m phi_n exp(-(x-d)^2/(2 sigma^2))
/// by a Gauss-Hermite rule centred on the product Gaussian (exact for the
/// polynomial part) and diagonalize densely.
[[nodiscard]] PerturbedSpectrum diagonalize_perturbed(const OscillatorBasis& basis,
                                                      const ImpurityPotential& potential,
                                                      const SolverOptions& options = {});

/// Lowest `count` even-parity energies of -psi''/2 + x^2 psi/2 + kappa delta(x) psi,
/// from the exact condition kappa = -2 Gamma(3/4 - E/2) / Gamma(1/4 - E/2).
///
/// Derivation: the decaying solution is the parabolic cylinder function
/// D_nu(sqrt(2)|x|) with E = nu + 1/2. Integrating across the delta gives
/// psi'(0+) = kappa psi(0) for even states, and the boundary values
/// D_nu(0) = 2^(nu/2) sqrt(pi) / Gamma((1-nu)/2),
/// D_nu'(0) = -2^((nu+1)/2) sqrt(pi) / Gamma(-nu/2)
/// turn that into the ratio above. Each root is bracketed in its
/// interlacing interval and solved on the log-Gamma form.
[[nodiscard]] std::vector<double> solve_even_energies_exact(double kappa, std::size_t count);

}  // namespace ocq
