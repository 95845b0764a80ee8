#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ocq/error.hpp"
#include "ocq/secular.hpp"
#include "ocq/spectrum.hpp"

namespace {

using ocq::CouplingScheme;
using ocq::ImpurityPotential;
using ocq::OscillatorBasis;
using ocq::SolverOptions;

std::vector<double> even_levels(const ocq::PerturbedSpectrum& s, std::size_t count) {
    std::vector<double> out = s.coupled_energies();
    out.resize(std::min(out.size(), count));
    return out;
}

TEST(SecularSolver, MatchesDenseEigensolver) {
    const std::vector<double> poles{0.1, 0.7, 1.3, 2.0, 4.5};
    const std::vector<double> z{0.3, -0.8, 0.5, 0.2, 1.1};
    for (double rho : {2.5, -1.7}) {
        const auto sys = ocq::solve_rank_one(poles, z, rho);
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(5, 5);
        Eigen::VectorXd zv = Eigen::Map<const Eigen::VectorXd>(z.data(), 5);
        h.diagonal() = Eigen::Map<const Eigen::VectorXd>(poles.data(), 5);
        h += rho * zv * zv.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(h);
        for (int k = 0; k < 5; ++k) EXPECT_NEAR(sys.values[k], dense.eigenvalues()[k], 1e-13);
        const Eigen::MatrixXd gram = sys.vectors.transpose() * sys.vectors;
        EXPECT_LE((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-14);
        const Eigen::MatrixXd residual = h * sys.vectors - sys.vectors * sys.values.asDiagonal();
        EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(SecularSolver, RootsStrictlyInterlace) {
    std::vector<double> poles, z;
    for (int n = 0; n < 300; ++n) {
        poles.push_back(n + 0.5);
        z.push_back(1.0 / std::pow(n + 1.0, 0.25));
    }
    const auto sys = ocq::solve_rank_one(poles, z, 50.0);
    for (std::size_t k = 0; k < poles.size(); ++k) {
        EXPECT_GT(sys.values[static_cast<Eigen::Index>(k)], poles[k]);
        if (k + 1 < poles.size()) EXPECT_LT(sys.values[static_cast<Eigen::Index>(k)], poles[k + 1]);
    }
}

TEST(EvenEnergiesExact, UnperturbedAndLimits) {
    const auto free = ocq::solve_even_energies_exact(0.0, 5);
    for (std::size_t n = 0; n < 5; ++n) EXPECT_EQ(free[n], 2.0 * n + 0.5);
    const auto hard = ocq::solve_even_energies_exact(1e8, 5);
    for (std::size_t n = 0; n < 5; ++n) EXPECT_NEAR(hard[n], 2.0 * n + 1.5, 1e-6);
}

TEST(EvenEnergiesExact, SatisfiesGammaCondition) {
    for (double kappa : {-3.0, -0.5, 1.0, 50.0}) {
        const auto e = ocq::solve_even_energies_exact(kappa, 6);
        for (double en : e) {
            const double lhs = -2.0 * std::tgamma(0.75 - 0.5 * en) / std::tgamma(0.25 - 0.5 * en);
            EXPECT_NEAR(lhs, kappa, 1e-9 * std::max(1.0, std::abs(kappa)));
        }
    }
}

TEST(EvenEnergiesExact, DeeplyBoundAttractiveState) {
    const auto e = ocq::solve_even_energies_exact(-20.0, 3);
    // bound state of a bare delta well: E ~ -kappa^2/2
    EXPECT_LT(e[0], -150.0);
    EXPECT_GT(e[1], 1.5);
    EXPECT_LT(e[1], 2.5);
}

TEST(EvenEnergiesExact, RejectsBadInput) {
    EXPECT_THROW((void)ocq::solve_even_energies_exact(std::nan(""), 3), ocq::UsageError);
    EXPECT_THROW((void)ocq::solve_even_energies_exact(1.0, 0), ocq::UsageError);
}

TEST(DiagonalizePerturbed, ZeroCouplingIsIdentity) {
    const OscillatorBasis basis(64);
    const auto s = ocq::diagonalize_perturbed(basis, ImpurityPotential{0.0, 0.0, 0.0});
    for (Eigen::Index k = 0; k < 64; ++k) EXPECT_EQ(s.energies[k], static_cast<double>(k) + 0.5);
    EXPECT_TRUE(s.overlaps.isIdentity(0.0));
}

TEST(DiagonalizePerturbed, CrossValidatesGammaSolverAtLargeK) {
    const OscillatorBasis basis(4096);
    for (double kappa : {1.0, 200.0}) {
        const auto s = ocq::diagonalize_perturbed(basis, ImpurityPotential{kappa, 0.0, 0.0});
        const auto exact = ocq::solve_even_energies_exact(kappa, 10);
        const auto even = even_levels(s, 10);
        for (std::size_t n = 0; n < 10; ++n) EXPECT_NEAR(even[n], exact[n], 1e-3) << "kappa " << kappa;
    }
}

TEST(DiagonalizePerturbed, OddSectorUntouchedAtCentre) {
    const OscillatorBasis basis(256);
    const auto s = ocq::diagonalize_perturbed(basis, ImpurityPotential{200.0, 0.0, 0.0});
    for (Eigen::Index n = 1; n < 256; n += 2) {
        Eigen::Index k = 0;
        s.overlaps.row(n).cwiseAbs().maxCoeff(&k);
        EXPECT_EQ(std::abs(s.overlaps(n, k)), 1.0);
        EXPECT_EQ(s.overlaps.row(n).cwiseAbs().sum(), 1.0);
        EXPECT_EQ(s.energies[k], static_cast<double>(n) + 0.5);
        EXPECT_EQ(s.coupled[static_cast<std::size_t>(k)], 0);
    }
}

TEST(DiagonalizePerturbed, EvenLevelsInterlace) {
    const OscillatorBasis basis(512);
    const auto s = ocq::diagonalize_perturbed(basis, ImpurityPotential{100.0, 0.0, 0.0});
    const auto even = s.coupled_energies();
    // the topmost root sits above the last pole of the truncated problem
    for (std::size_t j = 0; j + 1 < even.size(); ++j) {
        EXPECT_GT(even[j], 2.0 * j + 0.5);
        EXPECT_LT(even[j], 2.0 * j + 2.5);
    }
}

TEST(DiagonalizePerturbed, OverlapMatrixIsOrthogonal) {
    for (double d : {0.0, 0.37}) {
        const OscillatorBasis basis(1024);
        const auto s = ocq::diagonalize_perturbed(basis, ImpurityPotential{200.0, d, 0.0});
        EXPECT_LE(s.orthogonality_defect(), 1e-9);
        const Eigen::MatrixXd sst = s.overlaps * s.overlaps.transpose();
        EXPECT_LE((sst - Eigen::MatrixXd::Identity(1024, 1024)).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(DiagonalizePerturbed, OffCentreCouplesBothParities) {
    const OscillatorBasis basis(64);
    const auto s = ocq::diagonalize_perturbed(basis, ImpurityPotential{5.0, 0.8, 0.0});
    EXPECT_GT(std::abs(s.overlaps(1, 0)), 1e-3);
    EXPECT_TRUE(std::is_sorted(s.energies.begin(), s.energies.end()));
}

TEST(DiagonalizePerturbed, BareCouplingIsVariationalInK) {
    SolverOptions bare;
    bare.coupling = CouplingScheme::bare;
    const auto exact = ocq::solve_even_energies_exact(50.0, 10);
    std::vector<double> previous;
    for (std::size_t K : {256, 512, 1024, 2048, 4096}) {
        const auto s = ocq::diagonalize_perturbed(OscillatorBasis(K), ImpurityPotential{50.0, 0.0, 0.0}, bare);
        for (Eigen::Index k = 0; k < 20; ++k) EXPECT_GE(s.energies[k], 0.0);
        const auto even = even_levels(s, 10);
        for (std::size_t n = 0; n < 10; ++n) {
            EXPECT_GT(even[n], exact[n] - 1e-9);
            if (!previous.empty()) EXPECT_LE(even[n], previous[n] + 1e-12);
        }
        previous = even;
    }
}

TEST(DiagonalizePerturbed, RenormalizedCouplingConvergesUnderDoubling) {
    const auto exact = ocq::solve_even_energies_exact(100.0, 10);
    double previous = 1.0;
    for (std::size_t K : {512, 1024, 2048, 4096}) {
        const auto s = ocq::diagonalize_perturbed(OscillatorBasis(K), ImpurityPotential{100.0, 0.0, 0.0});
        const auto even = even_levels(s, 10);
        double err = 0.0;
        for (std::size_t n = 0; n < 10; ++n) err = std::max(err, std::abs(even[n] - exact[n]));
        EXPECT_LT(err, previous);
        previous = err;
    }
    EXPECT_LT(previous, 1e-4);
}

TEST(DiagonalizePerturbed, GaussianParityIsExact) {
    const OscillatorBasis basis(128);
    const auto s = ocq::diagonalize_perturbed(basis, ImpurityPotential{20.0, 0.0, 0.1});
    for (Eigen::Index n = 0; n < 128; ++n) {
        for (Eigen::Index k = 0; k < 128; ++k) {
            // chi_k has a definite parity; it overlaps only phi_n of the same parity
            double even_weight = 0.0;
            for (Eigen::Index m = 0; m < 128; m += 2) even_weight += s.overlaps(m, k) * s.overlaps(m, k);
            const Eigen::Index parity_k = even_weight > 0.5 ? 0 : 1;
            if (n % 2 != parity_k) EXPECT_LE(std::abs(s.overlaps(n, k)), 1e-12);
        }
    }
    EXPECT_LE(s.orthogonality_defect(), 1e-9);
}

TEST(DiagonalizePerturbed, GaussianApproachesContactLimit) {
    SolverOptions bare;
    bare.coupling = CouplingScheme::bare;
    const std::size_t K = 256;
    const OscillatorBasis basis(K);
    const auto contact = ocq::diagonalize_perturbed(basis, ImpurityPotential{100.0, 0.0, 0.0}, bare);
    double previous = 1e300;
    for (double sigma : {0.1, 0.05, 0.025, 0.0125}) {
        const auto g = ocq::diagonalize_perturbed(basis, ImpurityPotential{100.0, 0.0, sigma}, bare);
        double gap = 0.0;
        for (Eigen::Index k = 0; k < 20; ++k) gap = std::max(gap, std::abs(g.energies[k] - contact.energies[k]));
        EXPECT_LT(gap, previous) << "sigma " << sigma;
        previous = gap;
    }
}

TEST(DiagonalizePerturbed, NarrowGaussianAtK1024) {
    SolverOptions bare;
    bare.coupling = CouplingScheme::bare;
    const OscillatorBasis basis(1024);
    const auto contact = ocq::diagonalize_perturbed(basis, ImpurityPotential{100.0, 0.0, 0.0}, bare);
    const auto g = ocq::diagonalize_perturbed(basis, ImpurityPotential{100.0, 0.0, 0.01}, bare);
    // compare the level continuously connected to phi_0; a finite width also
    // lifts the odd states, which can reorder the bottom of the spectrum
    auto ground = [](const ocq::PerturbedSpectrum& s) {
        Eigen::Index k = 0;
        s.overlaps.row(0).cwiseAbs().maxCoeff(&k);
        return s.energies[k];
    };
    EXPECT_NEAR(ground(g), ground(contact), 5e-3);
}

TEST(DiagonalizePerturbed, RejectsBadRequests) {
    EXPECT_THROW((void)ocq::diagonalize_perturbed(OscillatorBasis(8), ImpurityPotential{1.0, 0.0, 0.0}),
                 ocq::UsageError);
    EXPECT_THROW((void)ocq::diagonalize_perturbed(OscillatorBasis(2048), ImpurityPotential{1.0, 0.0, 0.1}),
                 ocq::UsageError);
    EXPECT_THROW((void)ocq::diagonalize_perturbed(OscillatorBasis(64), ImpurityPotential{1.0, 0.0, -0.1}),
                 ocq::UsageError);
}

}  // namespace
