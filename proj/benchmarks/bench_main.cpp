#include <benchmark/benchmark.h>

#include <vector>

#include "dacfl/consensus.hpp"
#include "dacfl/data.hpp"
#include "dacfl/fedsim.hpp"
#include "dacfl/matrix.hpp"
#include "dacfl/model.hpp"
#include "dacfl/rng.hpp"

namespace {

void bm_build_dense(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dacfl::build_random_doubly_stochastic(n, seed++));
    }
}
BENCHMARK(bm_build_dense)->Arg(10)->Arg(20);

void bm_build_sparse(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dacfl::build_sparse_doubly_stochastic(n, 0.5, seed++));
    }
}
BENCHMARK(bm_build_sparse)->Arg(10)->Arg(20);

void bm_fodac_step(benchmark::State& state) {
    const int n = 10;
    const int dim = static_cast<int>(state.range(0));
    dacfl::MixingMatrix w = dacfl::build_random_doubly_stochastic(n, 1);
    dacfl::Rng rng(7);
    std::vector<dacfl::Payload> est(n, dacfl::Payload(dim));
    std::vector<dacfl::Payload> deltas(n, dacfl::Payload(dim));
    for (auto& v : est)
        for (double& x : v) x = rng.normal();
    for (auto& v : deltas)
        for (double& x : v) x = 0.01 * rng.normal();
    for (auto _ : state) {
        benchmark::DoNotOptimize(dacfl::fodac_step(est, deltas, w));
    }
}
BENCHMARK(bm_fodac_step)->Arg(100)->Arg(1000);

void bm_loss_and_grad(benchmark::State& state) {
    dacfl::Dataset ds = dacfl::gen_synthetic(10, 16, 50, 6.0, 1);
    dacfl::ModelShape shape{ds.dim, 0, ds.num_classes};
    dacfl::Rng rng(3);
    dacfl::ParamVector params = dacfl::init_params(shape, rng);
    std::vector<int> batch(20);
    for (int i = 0; i < 20; ++i) batch[static_cast<std::size_t>(i)] = i;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dacfl::loss_and_grad(params, shape, ds, batch));
    }
}
BENCHMARK(bm_loss_and_grad);

void bm_train_round(benchmark::State& state) {
    dacfl::SyntheticSplit split = dacfl::gen_synthetic_split(10, 16, 50, 6.0, 1);
    dacfl::ExperimentConfig cfg;
    cfg.per_class = 50;
    cfg.rounds = 1;
    for (auto _ : state) {
        state.PauseTiming();
        dacfl::Trainer tr(cfg, split.train, split.test);
        state.ResumeTiming();
        benchmark::DoNotOptimize(tr.step_round());
    }
}
BENCHMARK(bm_train_round);

}  // namespace

BENCHMARK_MAIN();
