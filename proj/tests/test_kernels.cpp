#include <vector>

#include "bstac/kernels.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bstac;

namespace {

ProgramTree grown(RngStream& rng, std::size_t d, std::size_t steps) {
    auto t = init_stump(d, rng);
    for (std::size_t i = 0; i < steps; ++i) t = mutate_params(grow_clone(t, d, rng), d, rng);
    return t;
}

}  // namespace

TEST_CASE("eval_batch equals per-record eval, blocked and serial") {
    RngStream rng(51, 0);
    for (int trial = 0; trial < 60; ++trial) {
        // Sizes straddle the block length.
        const std::size_t n = 1 + rng.below(trial % 3 == 0 ? 1200 : 40);
        const auto data = testutil::random_dataset(rng, n, 1 + rng.below(5));
        const auto tree = grown(rng, data.cols(), rng.below(25));
        std::vector<double> batch(n), serial(n);
        eval_batch(tree, data, batch);
        eval_batch_serial(tree, data, serial);
        for (std::size_t r = 0; r < n; ++r) {
            const double ref = eval(tree, data.record(r));
            CHECK(std::bit_cast<std::uint64_t>(batch[r]) == std::bit_cast<std::uint64_t>(ref));
            CHECK(std::bit_cast<std::uint64_t>(serial[r]) == std::bit_cast<std::uint64_t>(ref));
        }
    }
}

TEST_CASE("score_population: every worker count equals the serial reference") {
    RngStream rng(52, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto data = testutil::random_dataset(rng, 50 + rng.below(300), 3);
        std::vector<ProgramTree> pop;
        for (int i = 0; i < 40; ++i) pop.push_back(grown(rng, 3, rng.below(12)));
        for (const auto& params : {ScoringParams{IntervalGeometry::fixed(2), {0.99, 0.0}},
                                   ScoringParams{IntervalGeometry::float_resolution(), {0.6, 0.4}}}) {
            const auto ref = score_population_serial(pop, data, params);
            for (int workers : {1, 2, 4, 0}) CHECK(score_population(pop, data, params, workers) == ref);
            for (std::size_t i = 0; i < pop.size(); ++i) {
                const auto h = fit_histogram(pop[i], data, params.geometry);
                CHECK(ref[i].fitness == gini_fitness(h, data.class_counts(), params.fitness.alpha));
                CHECK(ref[i].used_bins == h.used_bins());
                CHECK(ref[i].pure_bins == count_pure_bins(h, params.fitness.beta));
            }
        }
    }
}
