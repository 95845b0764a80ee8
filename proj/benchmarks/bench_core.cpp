#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "ocq/oracle.hpp"
#include "ocq/quench.hpp"
#include "ocq/secular.hpp"
#include "ocq/spectroscopy.hpp"
#include "ocq/spectrum.hpp"

namespace {

constexpr double pi = std::numbers::pi;

std::shared_ptr<const ocq::PerturbedSpectrum> contact(double kappa, std::size_t modes) {
    return std::make_shared<const ocq::PerturbedSpectrum>(
        ocq::diagonalize_perturbed(ocq::OscillatorBasis(modes), ocq::ImpurityPotential{kappa, 0.0, 0.0}));
}

// Only the even half of the trap couples to a centred contact.
void BM_RankOneSolve(benchmark::State& state) {
    const auto K = static_cast<std::size_t>(state.range(0));
    std::vector<double> poles(K), z(K);
    for (std::size_t n = 0; n < K; ++n) {
        poles[n] = 2.0 * static_cast<double>(n) + 0.5;
        z[n] = std::pow(static_cast<double>(n) + 1.0, -0.25);
    }
    for (auto _ : state) {
        auto sys = ocq::solve_rank_one(poles, z, 100.0);
        benchmark::DoNotOptimize(sys.values.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RankOneSolve)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond)->Complexity();

void BM_GammaSolver(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(ocq::solve_even_energies_exact(100.0, 10));
}
BENCHMARK(BM_GammaSolver)->Unit(benchmark::kMicrosecond);

void BM_NuPerTime(benchmark::State& state) {
    const auto N = static_cast<std::size_t>(state.range(0));
    const auto spectrum = contact(100.0, 4096);
    const ocq::QuenchScenario sc{N, spectrum};
    const std::vector<double> times{0.37 * pi};
    for (auto _ : state) benchmark::DoNotOptimize(ocq::nu_zero_temperature_at(sc, times));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NuPerTime)->Arg(10)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond)->Complexity();

void BM_NuThermalPerTime(benchmark::State& state) {
    const auto spectrum = contact(20.0, 512);
    const ocq::QuenchScenario sc{20, spectrum, 1.0, ocq::Ensemble::grand_canonical};
    const auto grid = ocq::TimeGrid::covering(pi / 16.0, pi / 256.0);
    for (auto _ : state) benchmark::DoNotOptimize(ocq::nu_thermal(sc, grid).values.data());
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * grid.samples));
}
BENCHMARK(BM_NuThermalPerTime)->Unit(benchmark::kMillisecond);

void BM_SpectralTransform(benchmark::State& state) {
    const auto spectrum = contact(100.0, 1024);
    const auto trace = ocq::nu_zero_temperature(ocq::QuenchScenario{20, spectrum},
                                                ocq::TimeGrid::covering(4.0 * pi, pi / 256.0));
    const auto omegas = ocq::FrequencyGrid::spanning(-10.0, 30.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto sf = ocq::spectral_function(trace, 0.0, ocq::WindowSpec{}, omegas);
        benchmark::DoNotOptimize(sf.values.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_SpectralTransform)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_BoxOverlap(benchmark::State& state) {
    const auto N = static_cast<std::size_t>(state.range(0));
    const ocq::BoxModel model{1.0, 0.6, N};
    for (auto _ : state) benchmark::DoNotOptimize(ocq::box_overlap(model, N));
}
BENCHMARK(BM_BoxOverlap)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
