#include <benchmark/benchmark.h>

#include "specreg/operators.hpp"
#include "specreg/rng.hpp"
#include "specreg/singular_system.hpp"

using namespace specreg;

static DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols) {
    CounterRng rng(1, Stream::user, 0);
    DenseMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) a(i, j) = rng.gaussian();
    return a;
}

static void BM_SvdGaussian(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const DenseMatrix a = gaussian_matrix(n, n);
    for (auto _ : state) benchmark::DoNotOptimize(compute_svd(a));
}
BENCHMARK(BM_SvdGaussian)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_SvdRadon(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const DenseMatrix a = build_operator(RadonSpec{side, 24, 0});
    for (auto _ : state) benchmark::DoNotOptimize(compute_svd(a));
}
BENCHMARK(BM_SvdRadon)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_SystemRoundTrip(benchmark::State& state) {
    const SingularSystem sys = compute_svd(gaussian_matrix(64, 48));
    for (auto _ : state) benchmark::DoNotOptimize(decode_system(encode_system(sys)));
}
BENCHMARK(BM_SystemRoundTrip);
