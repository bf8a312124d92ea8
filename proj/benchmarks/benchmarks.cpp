// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "cdjcs/harness.hpp"
#include "cdjcs/ofdm.hpp"
#include "cdjcs/radar_estimator.hpp"
#include "cdjcs/spreading.hpp"

using namespace cdjcs;

namespace {

CVector random_vector(std::size_t n, std::uint64_t seed) {
    Rng rng = make_stream(seed, {n});
    CVector v(n);
    for (auto& x : v) x = complex_gaussian(rng, 1.0);
    return v;
}

void BM_Fwht(benchmark::State& state) {
    auto v = random_vector(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        fwht(v);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Fwht)->Arg(64)->Arg(1024)->Arg(4096);

void BM_Spread(benchmark::State& state) {
    const auto book = CodeBook::hadamard(1024, static_cast<std::size_t>(state.range(0)));
    const auto d = random_vector(book.channels(), 2);
    CVector out(book.subcarriers());
    for (auto _ : state) {
        book.spread(d, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_Spread)->Arg(1)->Arg(255)->Arg(511)->Arg(1024);

void BM_Despread(benchmark::State& state) {
    const auto book = CodeBook::hadamard(1024, static_cast<std::size_t>(state.range(0)));
    const auto y = random_vector(book.subcarriers(), 3);
    CVector out(book.channels());
    for (auto _ : state) {
        book.despread(y, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_Despread)->Arg(1)->Arg(255)->Arg(511)->Arg(1024);

void BM_OfdmModulate(benchmark::State& state) {
    OfdmParams p;
    const auto x = random_vector(p.subcarriers, 4);
    for (auto _ : state) benchmark::DoNotOptimize(modulate(x, p));
}
BENCHMARK(BM_OfdmModulate);

void BM_Periodogram(benchmark::State& state) {
    const std::size_t ms = static_cast<std::size_t>(state.range(0));
    CMatrix div(1024, ms);
    Rng rng = make_stream(5, {ms});
    for (std::size_t i = 0; i < ms; ++i) {
        for (auto& x : div.col(i)) x = complex_gaussian(rng, 1.0);
    }
    for (auto _ : state) benchmark::DoNotOptimize(periodogram(div));
}
BENCHMARK(BM_Periodogram)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_ZeroSearch(benchmark::State& state) {
    const auto book = CodeBook::hadamard(1024, 511);
    const QamConstellation qam(static_cast<unsigned>(state.range(0)));
    Rng rng = make_stream(6, {});
    for (auto _ : state) {
        benchmark::DoNotOptimize(check_zero_free(book, qam, ZeroSearchMode::randomized, 1000, &rng));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_ZeroSearch)->Arg(4)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Block(benchmark::State& state) {
    SimConfig c;
    c.nc2 = static_cast<std::size_t>(state.range(0));
    c.ofdm.symbols_per_block = 64;
    const BlockSimulator sim(c, Scheme::cd_ofdm);
    BlockOptions opt;
    opt.radar = true;
    std::uint64_t trial = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sim.run(10.0, 0, trial++, opt));
}
BENCHMARK(BM_Block)->Arg(1)->Arg(511)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
