#include <gtest/gtest.h>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ocq/error.hpp"
#include "ocq/oracle.hpp"

namespace {

using ocq::BoxModel;
using ocq::BoxOverlapForm;
using ocq::Complex;
using ocq::TimeGrid;

std::shared_ptr<const ocq::PerturbedSpectrum> small_spectrum(double kappa, std::size_t K, double d = 0.0) {
    ocq::SolverOptions opts;
    opts.min_modes = K;
    return std::make_shared<const ocq::PerturbedSpectrum>(
        ocq::diagonalize_perturbed(ocq::OscillatorBasis(K), ocq::ImpurityPotential{kappa, d, 0.0}, opts));
}

ocq::QuenchScenario unchecked(std::size_t N, std::shared_ptr<const ocq::PerturbedSpectrum> s, double T = 0.0,
                              ocq::Ensemble e = ocq::Ensemble::zero_temperature) {
    return ocq::QuenchScenario{N, std::move(s), T, e, false};
}

const TimeGrid kGrid = TimeGrid::covering(2.0 * std::numbers::pi, 2.0 * std::numbers::pi / 511.0);

double max_gap(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double worst = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
    return worst;
}

TEST(ManyBodyBasis, EnumeratesLexicographically) {
    const auto spec = small_spectrum(1.0, 6);
    const ocq::ManyBodyBasis basis(*spec, 3);
    EXPECT_EQ(basis.size(), 20u);
    EXPECT_EQ(ocq::binomial(6, 3), 20u);
    const auto first = basis.configuration(0);
    EXPECT_EQ(std::vector<std::uint32_t>(first.begin(), first.end()), (std::vector<std::uint32_t>{0, 1, 2}));
    const auto last = basis.configuration(19);
    EXPECT_EQ(std::vector<std::uint32_t>(last.begin(), last.end()), (std::vector<std::uint32_t>{3, 4, 5}));
    for (std::size_t c = 1; c < basis.size(); ++c) {
        const auto a = basis.configuration(c - 1), b = basis.configuration(c);
        EXPECT_TRUE(std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()));
    }
    EXPECT_DOUBLE_EQ(basis.unperturbed_energy(0), 0.5 + 1.5 + 2.5);
    EXPECT_THROW(ocq::ManyBodyBasis(*spec, 3, 10), ocq::UsageError);
}

TEST(SlaterSum, FreeGasAndCompleteness) {
    const auto free = small_spectrum(0.0, 8);
    const auto trace = ocq::nu_slater_sum(ocq::ManyBodyBasis(*free, 3), *free, kGrid);
    for (const auto& v : trace.values) EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-15);
    const auto spec = small_spectrum(200.0, 8);
    const ocq::ManyBodyBasis basis(*spec, 2);
    double total = 0.0;
    for (std::size_t m = 0; m < basis.size(); ++m) total += std::pow(ocq::many_body_overlap(basis, *spec, m, 0), 2);
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_NEAR(std::abs(ocq::nu_slater_sum(basis, *spec, kGrid).values[0] - 1.0), 0.0, 1e-9);
}

TEST(SlaterSum, MatchesDeterminantEngine) {
    for (double d : {0.0, 0.4}) {
        const auto spec = small_spectrum(200.0, 8, d);
        const auto oracle = ocq::nu_slater_sum(ocq::ManyBodyBasis(*spec, 2), *spec, kGrid);
        const auto engine = ocq::nu_zero_temperature(unchecked(2, spec), kGrid);
        EXPECT_LE(max_gap(oracle.values, engine.values), 1e-8) << "d = " << d;
    }
    // all pairs (N, K) with a small configuration count
    for (std::size_t K : {6, 9, 12}) {
        const auto spec = small_spectrum(37.0, K, 0.2);
        for (std::size_t N = 1; N < K && ocq::binomial(K, N) <= 10'000; ++N) {
            const auto oracle = ocq::nu_slater_sum(ocq::ManyBodyBasis(*spec, N), *spec, kGrid);
            const auto engine = ocq::nu_zero_temperature(unchecked(N, spec), kGrid);
            EXPECT_LE(max_gap(oracle.values, engine.values), 1e-8) << "K " << K << " N " << N;
        }
    }
}

TEST(ManyBodyOverlap, PermutationFlipsSignOnly) {
    const auto spec = small_spectrum(50.0, 10, 0.3);
    const ocq::ManyBodyBasis basis(*spec, 4);
    std::mt19937 gen(17);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = gen() % basis.size();
        const auto cfg = basis.configuration(m);
        std::vector<std::uint32_t> perm(cfg.begin(), cfg.end());
        std::shuffle(perm.begin(), perm.end(), gen);
        // parity of the shuffle
        int inversions = 0;
        for (std::size_t a = 0; a < perm.size(); ++a)
            for (std::size_t b = a + 1; b < perm.size(); ++b) inversions += perm[a] > perm[b];
        Eigen::Matrix4d mat;
        const auto rows = basis.configuration(0);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) mat(a, b) = spec->overlaps(rows[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
        const double lambda = ocq::many_body_overlap(basis, *spec, m, 0);
        EXPECT_NEAR(mat.determinant(), (inversions % 2 ? -1.0 : 1.0) * lambda, 1e-13);
        EXPECT_NEAR(mat.determinant() * mat.determinant(), lambda * lambda, 1e-13);
    }
}

TEST(Canonical, FreeGasIsOne) {
    const auto spec = small_spectrum(0.0, 6);
    const auto trace = ocq::nu_canonical(ocq::ManyBodyBasis(*spec, 2), *spec, 0.7, kGrid);
    for (const auto& v : trace.values) EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-13);
}

TEST(Canonical, ColdLimitMatchesSlaterSum) {
    const auto spec = small_spectrum(50.0, 6);
    const ocq::ManyBodyBasis basis(*spec, 2);
    const auto cold = ocq::nu_canonical(basis, *spec, 0.01, kGrid);
    const auto zero = ocq::nu_slater_sum(basis, *spec, kGrid);
    EXPECT_NEAR(std::abs(cold.values[0] - 1.0), 0.0, 1e-9);
    EXPECT_LE(max_gap(cold.values, zero.values), 1e-3);
}

TEST(GrandCanonicalSectors, MatchesThermalDeterminant) {
    const auto spec = small_spectrum(50.0, 6);
    const auto oracle = ocq::nu_grand_canonical_sectors(*spec, 2, 0.5, kGrid);
    const auto engine = ocq::nu_thermal(unchecked(2, spec, 0.5, ocq::Ensemble::grand_canonical), kGrid);
    EXPECT_NEAR(std::abs(oracle.values[0] - 1.0), 0.0, 1e-9);
    EXPECT_LE(max_gap(oracle.values, engine.values), 1e-8);
}

TEST(BoxOverlap, IdentityWithoutPhaseShift) {
    const BoxModel model{1.0, 0.0, 500};
    for (std::size_t N : {1, 10, 500}) EXPECT_EQ(ocq::box_overlap(model, N), 1.0);
}

TEST(BoxOverlap, SingleParticleSecondOrder) {
    for (double delta : {0.01, 0.05, 0.1}) {
        const double v = ocq::box_overlap(BoxModel{1.0, delta, 1}, 1);
        EXPECT_NEAR(v, std::sin(delta) / delta, 1e-15);
        EXPECT_GE(v, 1.0 - delta * delta);
        EXPECT_LE(v, 1.0);
    }
}

TEST(BoxOverlap, ResonantKernelMatchesCauchyDeterminant) {
    // A_nm = (-1)^(n-m) sin(delta) / (x_n - y_m), x_n = n pi + delta, y_m = m pi
    const double delta = 0.6;
    const std::size_t N = 60;
    double log_det = static_cast<double>(N) * std::log(std::sin(delta));
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            const double x_i = static_cast<double>(i) * std::numbers::pi + delta;
            const double y_j = static_cast<double>(j) * std::numbers::pi;
            if (i < j) {
                const double x_j = static_cast<double>(j) * std::numbers::pi + delta;
                log_det += std::log(std::abs(x_j - x_i)) + std::log(std::abs(y_j - static_cast<double>(i) * std::numbers::pi));
            }
            log_det -= std::log(std::abs(x_i - y_j));
        }
    }
    EXPECT_NEAR(std::log(ocq::box_overlap(BoxModel{1.0, delta, N}, N)), log_det, 1e-10);
}

TEST(BoxOverlap, HalfPiScaling) {
    const BoxModel model{1.0, 0.5 * std::numbers::pi, 400};
    const double ratio = ocq::box_overlap(model, 400) / ocq::box_overlap(model, 100);
    EXPECT_NEAR(ratio, std::pow(0.25, 0.25), 0.1 * std::pow(0.25, 0.25));
}

TEST(BoxOverlap, FullIntegralFormIsAvailable) {
    const BoxModel model{2.0, 0.3, 50};
    const double resonant = ocq::box_overlap(model, 50);
    const double full = ocq::box_overlap(model, 50, BoxOverlapForm::full_integral);
    EXPECT_GT(full, 0.0);
    EXPECT_LT(full, 1.0);
    EXPECT_NE(full, resonant);
}

TEST(BoxOverlap, RejectsBadModels) {
    EXPECT_THROW((void)ocq::box_overlap(BoxModel{1.0, 2.0, 10}, 5), ocq::UsageError);
    EXPECT_THROW((void)ocq::box_overlap(BoxModel{-1.0, 0.2, 10}, 5), ocq::UsageError);
    EXPECT_THROW((void)ocq::box_overlap(BoxModel{1.0, 0.2, 10}, 11), ocq::UsageError);
}

TEST(FitExponent, ExactPowerLaw) {
    std::vector<double> n, v;
    for (double N = 10; N <= 2000; N *= 1.7) {
        n.push_back(N);
        v.push_back(std::pow(N, -0.25));
    }
    const auto fit = ocq::fit_oc_exponent(n, v);
    EXPECT_NEAR(fit.alpha, 0.5, 1e-10);
    EXPECT_FALSE(fit.sign_flipped);
}

TEST(FitExponent, FlagsSignFlipsAndRejectsShortInput) {
    std::vector<double> n{10, 20, 40, 80, 160, 320, 640, 1280};
    std::vector<double> v;
    for (double N : n) v.push_back(std::pow(N, -0.1));
    v[3] = -v[3];
    const auto fit = ocq::fit_oc_exponent(n, v);
    EXPECT_TRUE(fit.sign_flipped);
    EXPECT_NEAR(fit.alpha, 0.2, 1e-10);
    EXPECT_THROW((void)ocq::fit_oc_exponent(std::span(n).first(7), std::span(v).first(7)), ocq::UsageError);
    std::vector<double> narrow{10, 11, 12, 13, 14, 15, 16, 17};
    EXPECT_THROW((void)ocq::fit_oc_exponent(narrow, std::span(v).first(8)), ocq::UsageError);
}

TEST(FitExponent, AndersonExponentFromBox) {
    for (double delta : {0.3, 0.6}) {
        const BoxModel model{1.0, delta, 2000};
        std::vector<double> n, v;
        for (double N : {100, 150, 220, 330, 500, 750, 1100, 1600, 2000}) {
            n.push_back(N);
            v.push_back(ocq::box_overlap(model, static_cast<std::size_t>(N)));
        }
        const double expected = 2.0 * delta * delta / (std::numbers::pi * std::numbers::pi);
        EXPECT_NEAR(ocq::fit_oc_exponent(n, v).alpha, expected, 0.1 * expected);
    }
}

}  // namespace

TEST(SlaterSum, TwoParticlesInSixtyFourModes) {
    const auto spec = small_spectrum(200.0, 64);
    const auto oracle = ocq::nu_slater_sum(ocq::ManyBodyBasis(*spec, 2), *spec, kGrid);
    const auto engine = ocq::nu_zero_temperature(ocq::QuenchScenario{2, spec}, kGrid);
    EXPECT_LE(max_gap(oracle.values, engine.values), 1e-8);
}
