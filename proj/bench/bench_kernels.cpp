// Serial vs OpenMP core kernels on shapes typical of the scheme's operators.

#include <random>

#include <benchmark/benchmark.h>

#include "fsqtt/kernels.hpp"

using namespace fsqtt;

namespace {

Core random_core(Index l, Index n, Index r, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    Core c(l, n, r);
    for (double& v : c.data) v = nd(gen);
    return c;
}

Interface random_interface(Index p, Index a, Index q, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    Interface f(p, a, q);
    for (double& v : f.data) v = nd(gen);
    return f;
}

void BM_MatvecSerial(benchmark::State& st) {
    const Index ra = Index(st.range(0)), rx = Index(st.range(1));
    const Core a = random_core(ra, 4, ra, 1), x = random_core(rx, 2, rx, 2);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::matvec_core_serial(a, 2, 2, x));
}

void BM_MatvecParallel(benchmark::State& st) {
    const Index ra = Index(st.range(0)), rx = Index(st.range(1));
    const Core a = random_core(ra, 4, ra, 1), x = random_core(rx, 2, rx, 2);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::matvec_core_parallel(a, 2, 2, x));
}

void BM_MatmatSerial(benchmark::State& st) {
    const Index r = Index(st.range(0));
    const Core a = random_core(r, 4, r, 3), b = random_core(r, 4, r, 4);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::matmat_core_serial(a, 2, 2, b, 2));
}

void BM_MatmatParallel(benchmark::State& st) {
    const Index r = Index(st.range(0));
    const Core a = random_core(r, 4, r, 3), b = random_core(r, 4, r, 4);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::matmat_core_parallel(a, 2, 2, b, 2));
}

void BM_LocalOperatorSerial(benchmark::State& st) {
    const Index ra = Index(st.range(0)), rx = Index(st.range(1));
    const Core a = random_core(ra, 4, ra, 5);
    const Interface l = random_interface(rx, ra, rx, 6), r = random_interface(rx, ra, rx, 7);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::local_operator_serial(l, a, 2, r));
}

void BM_LocalOperatorParallel(benchmark::State& st) {
    const Index ra = Index(st.range(0)), rx = Index(st.range(1));
    const Core a = random_core(ra, 4, ra, 5);
    const Interface l = random_interface(rx, ra, rx, 6), r = random_interface(rx, ra, rx, 7);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::local_operator_parallel(l, a, 2, r));
}

}  // namespace

BENCHMARK(BM_MatvecSerial)->Args({16, 16})->Args({48, 32});
BENCHMARK(BM_MatvecParallel)->Args({16, 16})->Args({48, 32});
BENCHMARK(BM_MatmatSerial)->Arg(16)->Arg(48);
BENCHMARK(BM_MatmatParallel)->Arg(16)->Arg(48);
BENCHMARK(BM_LocalOperatorSerial)->Args({16, 8})->Args({40, 16});
BENCHMARK(BM_LocalOperatorParallel)->Args({16, 8})->Args({40, 16});

BENCHMARK_MAIN();
