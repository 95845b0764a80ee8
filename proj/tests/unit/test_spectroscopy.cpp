#include <gtest/gtest.h>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "ocq/error.hpp"
#include "ocq/spectroscopy.hpp"

namespace {

using ocq::Complex;
using ocq::FrequencyGrid;
using ocq::TimeGrid;
using ocq::WindowSpec;

const TimeGrid kGrid = TimeGrid::covering(4.0 * std::numbers::pi, std::numbers::pi / 256.0);

std::vector<Complex> synthetic(const std::function<Complex(double)>& f, const TimeGrid& g = kGrid) {
    std::vector<Complex> out(g.samples);
    for (std::size_t j = 0; j < g.samples; ++j) out[j] = f(g.time(j));
    return out;
}

std::shared_ptr<const ocq::PerturbedSpectrum> contact(double kappa, std::size_t K) {
    return std::make_shared<const ocq::PerturbedSpectrum>(
        ocq::diagonalize_perturbed(ocq::OscillatorBasis(K), ocq::ImpurityPotential{kappa, 0.0, 0.0}));
}

TEST(SpectralFunction, FreeGasGivesWindowKernelAtThreshold) {
    const double omega_t = 0.7;
    const auto nu = synthetic([](double) { return Complex(1.0, 0.0); });
    const auto grid = FrequencyGrid::standard(omega_t, 0.0, 10);
    const auto sf = ocq::spectral_function(kGrid, nu, omega_t, WindowSpec{}, grid);
    const auto stats = ocq::peak_stats(sf);
    EXPECT_LE(std::abs(stats.position - omega_t), grid.step);
    EXPECT_FALSE(stats.multimodal);
    EXPECT_NEAR(stats.area, 2.0 * std::numbers::pi, 0.02 * 2.0 * std::numbers::pi);
    EXPECT_NEAR(sf.sum_rule, 1.0, 1e-12);
    EXPECT_NO_THROW(sf.check_invariants());
    // away from threshold only the Gaussian kernel's tail leaks through
    const double tau = sf.window.width;
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double w = grid.at(i) - omega_t;
        const double kernel = std::sqrt(2.0 * std::numbers::pi) * tau * std::exp(-0.5 * w * w * tau * tau);
        EXPECT_LE(std::abs(sf.values[i] - kernel), 1e-6);
    }
}

TEST(SpectralFunction, SingleFrequencyShift) {
    const auto nu = synthetic([](double t) { return std::polar(1.0, -1.3 * t); });
    const auto grid = FrequencyGrid::spanning(-5.0, 5.0, 2001);
    const auto stats = ocq::peak_stats(ocq::spectral_function(kGrid, nu, 0.0, WindowSpec{}, grid));
    EXPECT_NEAR(stats.position, 1.3, grid.step);
}

TEST(SpectralFunction, TwoLinesAreFlagged) {
    const auto nu = synthetic([](double t) { return 0.5 * (1.0 + std::polar(1.0, -2.0 * t)); });
    const auto grid = FrequencyGrid::spanning(-4.0, 6.0, 2001);
    const auto stats = ocq::peak_stats(ocq::spectral_function(kGrid, nu, 0.0, WindowSpec{}, grid));
    EXPECT_TRUE(stats.multimodal);
    EXPECT_TRUE(std::abs(stats.position) < 2.0 * grid.step || std::abs(stats.position - 2.0) < 2.0 * grid.step);
}

TEST(SpectralFunction, OneSidedMatchesTwoSided) {
    const auto spec = contact(100.0, 1024);
    const auto trace = ocq::nu_zero_temperature(ocq::QuenchScenario{10, spec}, kGrid);
    const auto grid = FrequencyGrid::standard(0.0, 100.0, 10);
    const auto sf = ocq::spectral_function(trace, 0.0, WindowSpec{}, grid);
    const auto ref = ocq::spectral_function_two_sided(trace.grid, trace.values, 0.0, WindowSpec{}, grid);
    for (std::size_t i = 0; i < grid.points; ++i) EXPECT_NEAR(sf.values[i], ref[i], 1e-12);
}

TEST(SpectralFunction, IsLinearInTheTrace) {
    const auto a = synthetic([](double t) { return std::polar(std::exp(-0.1 * t), -0.8 * t); });
    const auto b = synthetic([](double t) { return std::polar(1.0 / (1.0 + t), -2.1 * t); });
    std::vector<Complex> mix(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) mix[j] = 0.3 * a[j] + 0.7 * b[j];
    const auto grid = FrequencyGrid::spanning(-5.0, 8.0, 512);
    const auto fa = ocq::spectral_function(kGrid, a, 0.0, WindowSpec{}, grid);
    const auto fb = ocq::spectral_function(kGrid, b, 0.0, WindowSpec{}, grid);
    const auto fm = ocq::spectral_function(kGrid, mix, 0.0, WindowSpec{}, grid);
    for (std::size_t i = 0; i < grid.points; ++i) EXPECT_NEAR(fm.values[i], 0.3 * fa.values[i] + 0.7 * fb.values[i], 1e-12);
}

TEST(SpectralFunction, PositiveAndNormalizedForPhysicalTraces) {
    for (std::size_t N : {5, 20}) {
        const auto trace = ocq::nu_zero_temperature(ocq::QuenchScenario{N, contact(100.0, 1024)}, kGrid);
        const auto sf = ocq::spectral_function(trace, 0.0, WindowSpec{}, FrequencyGrid::standard(0.0, 100.0, N));
        EXPECT_NO_THROW(sf.check_invariants());
        EXPECT_NEAR(sf.sum_rule, 1.0, 1e-9);
        EXPECT_LE(sf.captured_weight, 1.0 + 1e-9);
    }
}

TEST(SpectralFunction, ParallelMatchesSerial) {
    const auto nu = synthetic([](double t) { return std::polar(std::exp(-0.05 * t), -1.1 * t); });
    const auto grid = FrequencyGrid::spanning(-5.0, 5.0, 777);
    const auto a = ocq::spectral_function(kGrid, nu, 0.0, WindowSpec{}, grid, 1);
    const auto b = ocq::spectral_function(kGrid, nu, 0.0, WindowSpec{}, grid, 5);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.sum_rule, b.sum_rule);
}

TEST(SpectralFunction, RejectsBadRequests) {
    const auto nu = synthetic([](double) { return Complex(1.0, 0.0); });
    EXPECT_THROW((void)ocq::spectral_function(kGrid, nu, 0.0, WindowSpec{}, FrequencyGrid::spanning(-300.0, 5.0, 64)),
                 ocq::UsageError);
    EXPECT_THROW((void)ocq::spectral_function(kGrid, nu, 0.0, WindowSpec{ocq::WindowShape::gaussian, 10.0},
                                              FrequencyGrid::spanning(-5.0, 5.0, 64)),
                 ocq::UsageError);
    const std::vector<Complex> short_trace(3);
    EXPECT_THROW((void)ocq::spectral_function(kGrid, short_trace, 0.0, WindowSpec{}, FrequencyGrid::spanning(-5.0, 5.0, 64)),
                 ocq::UsageError);
}

TEST(PeakStats, EdgePeakIsAnError) {
    const auto nu = synthetic([](double t) { return std::polar(1.0, -4.0 * t); });
    const auto sf = ocq::spectral_function(kGrid, nu, 0.0, WindowSpec{}, FrequencyGrid::spanning(-2.0, 2.0, 128));
    EXPECT_THROW((void)ocq::peak_stats(sf), ocq::NumericalError);
}

TEST(PeakStats, BlueShiftAndBroadeningWithN) {
    // the Gaussian kernel must be wider than the even-level spacing of 2, or
    // the width only measures the window
    const WindowSpec window{ocq::WindowShape::gaussian, 0.4};
    const auto spec = contact(100.0, 1024);
    const auto small = ocq::peak_stats(ocq::spectral_function(ocq::nu_zero_temperature(ocq::QuenchScenario{5, spec}, kGrid), 0.0,
                                                              window, FrequencyGrid::spanning(-15.0, 40.0, 2048)));
    const auto large = ocq::peak_stats(ocq::spectral_function(ocq::nu_zero_temperature(ocq::QuenchScenario{40, spec}, kGrid), 0.0,
                                                              window, FrequencyGrid::spanning(-15.0, 40.0, 2048)));
    EXPECT_GT(large.position, small.position);
    EXPECT_GT(large.fwhm, small.fwhm);
}

TEST(EffectivePhaseShift, Limits) {
    const auto free = ocq::effective_phase_shift(*contact(0.0, 256), 10);
    EXPECT_EQ(free.delta, 0.0);
    EXPECT_EQ(free.alpha, 0.0);
    const auto hard = ocq::effective_phase_shift(*contact(1e6, 4096), 10);
    EXPECT_NEAR(hard.delta, std::numbers::pi / 2.0, 2e-2);
    EXPECT_NEAR(hard.alpha, 0.5, 1e-2);
    EXPECT_LE(hard.alpha, 0.5);
    const auto mid = ocq::effective_phase_shift(*contact(100.0, 4096), 40);
    EXPECT_GT(mid.delta, 0.0);
    EXPECT_LT(mid.delta, std::numbers::pi / 2.0);
}

TEST(EffectivePhaseShift, BracketsTrapOverlapExponent) {
    // only the even channel is scattered and delta drifts with N, so the
    // static-overlap exponent in the trap sits below 2 delta^2 / pi^2
    const auto spec = contact(100.0, 4096);
    const auto shift = ocq::effective_phase_shift(*spec, 40);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int N : {10, 14, 20, 28, 40, 56, 80, 113, 160}) {
        const double v = std::abs(spec->overlaps.topLeftCorner(N, N).fullPivLu().determinant());
        const double x = std::log(N), y = std::log(v);
        sx += x, sy += y, sxx += x * x, sxy += x * y, ++m;
    }
    const double alpha_fit = -2.0 * (m * sxy - sx * sy) / (m * sxx - sx * sx);
    EXPECT_LT(alpha_fit, shift.alpha);
    EXPECT_GT(alpha_fit, shift.alpha / 4.0);
}

TEST(EffectivePhaseShift, RejectsNonCentralImpurity) {
    const auto off = ocq::diagonalize_perturbed(ocq::OscillatorBasis(64), ocq::ImpurityPotential{1.0, 0.5, 0.0});
    EXPECT_THROW((void)ocq::effective_phase_shift(off, 4), ocq::UsageError);
    const auto wide = ocq::diagonalize_perturbed(ocq::OscillatorBasis(64), ocq::ImpurityPotential{1.0, 0.0, 0.2});
    EXPECT_THROW((void)ocq::effective_phase_shift(wide, 4), ocq::UsageError);
}

}  // namespace
