// Serial reference kernels against their blocked / OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "bstac/kernels.hpp"
#include "helpers.hpp"

using namespace bstac;

namespace {

const LabeledDataset& bench_data(std::size_t n) {
    static std::vector<std::pair<std::size_t, LabeledDataset>> cache;
    for (auto& [size, d] : cache)
        if (size == n) return d;
    RngStream rng(17, n);
    cache.emplace_back(n, testutil::random_dataset(rng, n, 8, 2));
    return cache.back().second;
}

std::vector<ProgramTree> bench_population(std::size_t size, std::size_t grows) {
    RngStream rng(23, grows);
    std::vector<ProgramTree> pop;
    for (std::size_t i = 0; i < size; ++i) {
        auto t = init_stump(8, rng);
        for (std::size_t g = 0; g < grows; ++g) t = grow_clone(t, 8, rng);
        pop.push_back(t);
    }
    return pop;
}

void BM_EvalPerRecord(benchmark::State& state) {
    const auto& data = bench_data(static_cast<std::size_t>(state.range(0)));
    const auto tree = bench_population(1, 20).front();
    std::vector<double> out(data.rows());
    for (auto _ : state) {
        eval_batch_serial(tree, data, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.rows()));
}

void BM_EvalBlocked(benchmark::State& state) {
    const auto& data = bench_data(static_cast<std::size_t>(state.range(0)));
    const auto tree = bench_population(1, 20).front();
    std::vector<double> out(data.rows());
    for (auto _ : state) {
        eval_batch(tree, data, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.rows()));
}

void score_bench(benchmark::State& state, IntervalGeometry geometry, int workers) {
    const auto& data = bench_data(static_cast<std::size_t>(state.range(0)));
    const auto pop = bench_population(30, 6);
    const ScoringParams params{geometry, {0.75, 0.4}};
    for (auto _ : state) {
        auto scores = workers == 0 ? score_population_serial(pop, data, params)
                                   : score_population(pop, data, params, workers);
        benchmark::DoNotOptimize(scores.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.rows() * pop.size()));
}

void BM_ScoreSerialFixed(benchmark::State& s) { score_bench(s, IntervalGeometry::fixed(2), 0); }
void BM_ScoreOmpFixed(benchmark::State& s) { score_bench(s, IntervalGeometry::fixed(2), -1); }
void BM_ScoreSerialFloat(benchmark::State& s) { score_bench(s, IntervalGeometry::float_resolution(), 0); }
void BM_ScoreOmpFloat(benchmark::State& s) { score_bench(s, IntervalGeometry::float_resolution(), -1); }

}  // namespace

BENCHMARK(BM_EvalPerRecord)->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK(BM_EvalBlocked)->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK(BM_ScoreSerialFixed)->Arg(1 << 12)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreOmpFixed)->Arg(1 << 12)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreSerialFloat)->Arg(1 << 12)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreOmpFloat)->Arg(1 << 12)->Arg(1 << 18)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
