#include <benchmark/benchmark.h>

#include "qwalk/accelerated.hpp"
#include "qwalk/entangle.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/oracles.hpp"

using namespace qwalk;

namespace {

struct Draw {
    Rng& rng;
    int operator()(double p_plus, double p_zero) const {
        const double w = rng.uniform();
        return w < p_plus ? 1 : (w < p_plus + p_zero ? 0 : -1);
    }
};

void BM_full_model_two_slit(benchmark::State& state) {
    const auto ens = two_slit(1.0, 0.5);
    const Engine<double, 1> engine;
    const FreeEnvironment<double, 1> env;
    const std::int64_t t = state.range(0);
    for (auto _ : state) {
        LatticeStore<double, 1> lattice;
        for (std::uint64_t k = 0; k < 200; ++k) {
            Rng rng(derive_seed(1, 1, k));
            const auto d = ens.sample(rng);
            auto p = make_particle<double>(std::llround(d.x0[0]), d.v0[0], d.eps);
            benchmark::DoNotOptimize(run_emission(engine, p, lattice, env, t, Draw{rng}));
        }
    }
    state.SetItemsProcessed(state.iterations() * 200 * t);
}
BENCHMARK(BM_full_model_two_slit)->Arg(100)->Arg(500);

void BM_trained_two_slit(benchmark::State& state) {
    const PairKernel kernel(two_slit(1.0, 0.1));
    Rng rng(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_trained(kernel, ForceField{}, TrainedOptions{}, 0, rng.uniform(-1.0, 1.0), 500, rng));
    }
}
BENCHMARK(BM_trained_two_slit);

void BM_solve_vq_comb(benchmark::State& state) {
    const PairKernel kernel(comb(static_cast<int>(state.range(0)), 2.0));
    Rng rng(5);
    for (auto _ : state) benchmark::DoNotOptimize(solve_vq(rng.uniform(-1.0, 1.0), kernel));
}
BENCHMARK(BM_solve_vq_comb)->Arg(2)->Arg(8)->Arg(32);

void BM_free_pdf(benchmark::State& state) {
    const auto ens = comb(static_cast<int>(state.range(0)), 2.0);
    double x = -400.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pdf_free(x, 500.0, ens));
        x = x > 400.0 ? -400.0 : x + 0.37;
    }
}
BENCHMARK(BM_free_pdf)->Arg(2)->Arg(16);

void BM_coincidences(benchmark::State& state) {
    ChshConfig cfg;
    cfg.np = 20000;
    cfg.t = 100;
    cfg.window = 2;
    for (auto _ : state) benchmark::DoNotOptimize(run_coincidences(cfg, 0.25, 0.0, 11));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.np));
}
BENCHMARK(BM_coincidences)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
