#include <benchmark/benchmark.h>

#include "specreg/operators.hpp"
#include "specreg/rng.hpp"
#include "specreg/singular_system.hpp"
#include "specreg/stochastics.hpp"

using namespace specreg;

static void BM_PhiloxGaussian(benchmark::State& state) {
    CounterRng rng(7, Stream::noise, 0);
    for (auto _ : state) benchmark::DoNotOptimize(rng.gaussian());
}
BENCHMARK(BM_PhiloxGaussian);

static void BM_SampleNoise(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const SingularSystem sys = compute_svd(build_operator(DiagonalSpec{1.0, n}));
    const NoiseModel model{SpectrumProfile::power_law(0.1, 0.5, n), NoiseSide::y_side, std::nullopt};
    std::uint64_t index = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_noise(model, sys, 3, index++));
}
BENCHMARK(BM_SampleNoise)->Arg(64)->Arg(256);

static void BM_Phantom(benchmark::State& state) {
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(generate_phantom(32, seed++));
}
BENCHMARK(BM_Phantom);
