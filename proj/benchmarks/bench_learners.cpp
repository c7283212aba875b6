#include <benchmark/benchmark.h>

#include <vector>

#include "specreg/diagnostics.hpp"
#include "specreg/learners.hpp"
#include "specreg/oracles.hpp"

using namespace specreg;

static std::vector<double> harmonic(std::size_t n) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = 1.0 / double(i + 1);
    return s;
}

static void BM_FitParadigm(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(1));
    const auto sigma = harmonic(n);
    const auto pi = SpectrumProfile::decay(2.0, n);
    const auto delta = SpectrumProfile::white(0.01, n);
    const Paradigm kinds[] = {Paradigm::mse(), Paradigm::post(), Paradigm::adv(), Paradigm::sc()};
    const Paradigm p = kinds[state.range(0)];
    for (auto _ : state) benchmark::DoNotOptimize(fit_filter(p, sigma, delta, pi));
    state.SetLabel(p.name());
}
BENCHMARK(BM_FitParadigm)->ArgsProduct({{0, 1, 2, 3}, {64, 4096}});

static void BM_GoldenSection(benchmark::State& state) {
    ScalarObjective obj{ObjectiveKind::adv, 0.375, 0.1, 0.01, 0.2};
    const auto interval = adv_interval(obj.beta);
    for (auto _ : state) benchmark::DoNotOptimize(scalar_objective_oracle(obj, interval));
}
BENCHMARK(BM_GoldenSection);

static void BM_ConditionCheck(benchmark::State& state) {
    const std::size_t n = 1024;
    const auto sigma = harmonic(n);
    const auto pi = SpectrumProfile::decay(2.0, n);
    const auto mu = SpectrumProfile::white(0.01, n);
    const auto nu = SpectrumProfile::white(1e-4, n);
    ConditionInputs in;
    in.sigma = sigma;
    in.pi = &pi;
    in.training = &mu;
    in.test = &nu;
    for (auto _ : state) benchmark::DoNotOptimize(check_condition(Paradigm::adv(), ConditionId::convergence, in));
}
BENCHMARK(BM_ConditionCheck);
