#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace ocq {

/// Eigenvalue of a diagonal-plus-rank-one matrix stored relative to the
/// pole it is closest to: value = poles[origin] + offset. Differences to
/// any pole are then formed without cancellation.
struct SecularRoot {
    std::size_t origin = 0;
    double offset = 0.0;
};

/// Full eigensystem of diag(poles) + rho * z z^T.
struct RankOneEigensystem {
    std::vector<SecularRoot> roots;   // ascending eigenvalues
    Eigen::VectorXd values;           // poles[origin] + offset
    Eigen::MatrixXd vectors;          // column j is the eigenvector of values[j]
};

/// Solves the secular equation 1 + rho * sum_j z_j^2 / (poles_j - lambda) = 0,
/// one root per interlacing interval, then rebuilds z from the computed roots
/// (Gu-Eisenstat) so that the eigenvectors are orthogonal to working
/// precision. Requires strictly ascending poles, z_j != 0 and rho != 0;
/// deflation of vanishing components is the caller's job.
[[nodiscard]] RankOneEigensystem solve_rank_one(std::span<const double> poles,
                                                std::span<const double> z, double rho);

}  // namespace ocq
