#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ocq/quench.hpp"
#include "ocq/spectrum.hpp"

namespace ocq {

/// Every N-particle occupation of the modes of a small spectrum, in
/// lexicographic order, with the many-body energies of both Hamiltonians.
class ManyBodyBasis {
public:
    static constexpr std::size_t kDefaultLimit = 100'000;

    ManyBodyBasis(const PerturbedSpectrum& spectrum, std::size_t particles, std::size_t limit = kDefaultLimit);

    [[nodiscard]] std::size_t modes() const noexcept { return modes_; }
    [[nodiscard]] std::size_t particles() const noexcept { return particles_; }
    [[nodiscard]] std::size_t size() const noexcept { return unperturbed_.size(); }

    /// Occupied mode indices of configuration c, ascending.
    [[nodiscard]] std::span<const std::uint32_t> configuration(std::size_t c) const;
    [[nodiscard]] double unperturbed_energy(std::size_t c) const { return unperturbed_[c]; }
    [[nodiscard]] double perturbed_energy(std::size_t c) const { return perturbed_[c]; }

private:
    std::size_t modes_;
    std::size_t particles_;
    std::vector<std::uint32_t> occupations_;  // size() x particles()
    std::vector<double> unperturbed_;
    std::vector<double> perturbed_;
};

/// Binomial coefficient, saturating at SIZE_MAX.
[[nodiscard]] std::size_t binomial(std::size_t n, std::size_t k);

/// <Psi'_m | Psi_l> = det S[l-modes, m-modes].
[[nodiscard]] double many_body_overlap(const ManyBodyBasis& basis, const PerturbedSpectrum& spectrum,
                                       std::size_t perturbed_config, std::size_t unperturbed_config);

/// nu(t) = sum_m |Lambda_{m,0}|^2 e^{-i(E'_m - E_0)t}. Throws if the weights
/// miss completeness by more than 1e-9.
[[nodiscard]] OverlapTrace nu_slater_sum(const ManyBodyBasis& basis, const PerturbedSpectrum& spectrum,
                                         const TimeGrid& grid);

/// Fixed-N thermal overlap
///   nu(t) = sum_{l,m} C_l |Lambda_{m,l}|^2 e^{-i(E'_m - E_l)t},  C_l = e^{-E_l/T}/Z.
/// The trace only pairs each thermal state with itself.
[[nodiscard]] OverlapTrace nu_canonical(const ManyBodyBasis& basis, const PerturbedSpectrum& spectrum,
                                        double temperature, const TimeGrid& grid);

/// Canonical sums over every sector N' = 0..K weighted by e^{(mu N' - E)/T}/Xi,
/// with mu fixed so that the mean particle number is `particles`.
[[nodiscard]] OverlapTrace nu_grand_canonical_sectors(const PerturbedSpectrum& spectrum, std::size_t particles,
                                                      double temperature, const TimeGrid& grid);

enum class BoxOverlapForm : std::uint8_t {
    /// A_nm = (-1)^(n-m) sin(delta) / ((n-m) pi + delta): the term of the sine
    /// product integral that stays finite near the Fermi surface. Unitary on
    /// the infinite index range.
    resonant = 0,
    /// The complete product integral of normalized sin(k_n r) and sin(k'_m r)
    /// on [0, R]. The perturbed family is not orthogonal on a finite box.
    full_integral = 1,
};

[[nodiscard]] std::string_view to_string(BoxOverlapForm form);

/// Hard-wall s-wave box with a constant phase shift, k_n = n pi / R,
/// k'_m = (m pi - delta) / R.
struct BoxModel {
    double radius = 1.0;
    double phase_shift = 0.0;
    std::size_t max_particles = 1;

    void validate() const;
};

/// Static overlap det A over the lowest N orbitals.
[[nodiscard]] double box_overlap(const BoxModel& model, std::size_t particles,
                                 BoxOverlapForm form = BoxOverlapForm::resonant);

struct ExponentFit {
    double alpha = 0.0;  // -2 x slope of log|nu| against log N
    double slope = 0.0;
    double intercept = 0.0;
    bool sign_flipped = false;  // some nu <= 0 entered as |nu|
};

/// Least-squares power law nu ~ N^(-alpha/2). Needs >= 8 points spanning a
/// decade in N.
[[nodiscard]] ExponentFit fit_oc_exponent(std::span<const double> particles, std::span<const double> overlaps);

}  // namespace ocq
