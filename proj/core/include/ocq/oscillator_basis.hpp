#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <memory>
#include <span>

#include "ocq/hermite.hpp"

namespace ocq {

/// Truncated single-particle eigenbasis of the bare harmonic trap,
/// E_n = n + 1/2 for n = 0 .. modes()-1, with an optional Gauss-Hermite
/// table for integrals of basis-function products.
class OscillatorBasis {
public:
    explicit OscillatorBasis(std::size_t modes, std::size_t quadrature_nodes = 0);

    [[nodiscard]] std::size_t modes() const noexcept { return modes_; }
    [[nodiscard]] static constexpr double energy(std::size_t n) noexcept {
        return static_cast<double>(n) + 0.5;
    }
    [[nodiscard]] Eigen::VectorXd energies() const;

    [[nodiscard]] bool has_quadrature() const noexcept { return rule_ != nullptr; }
    [[nodiscard]] const GaussHermiteRule& quadrature() const;

    /// modes() x points table of phi_n(x_j).
    [[nodiscard]] Eigen::MatrixXd orbital_table(std::span<const double> points) const;

    /// max_{m,n} |<phi_m|phi_n>_quad - delta_mn| using the stored rule.
    [[nodiscard]] double gram_deviation() const;

private:
    std::size_t modes_;
    std::shared_ptr<const GaussHermiteRule> rule_;
};

}  // namespace ocq
