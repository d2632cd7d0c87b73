#include <bit>
#include <cmath>
#include <vector>

#include "bstac/error.hpp"
#include "bstac/evaluator.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"

using namespace bstac;

namespace {

BinKey fkey(float v) { return std::bit_cast<BinKey>(v); }

ChampionEntry fixed_entry(ProgramTree tree, double lo, double hi, std::vector<PureBin> pure, std::vector<BinKey> amb) {
    ChampionEntry e;
    e.tree = std::move(tree);
    e.geometry = IntervalGeometry::fixed(2);
    e.geometry.lo = lo;
    e.geometry.hi = hi;
    e.beta = 0.99;
    e.pure_bins = std::move(pure);
    e.ambiguous_bins = std::move(amb);
    return e;
}

EnsembleStack stack_of(std::vector<ChampionEntry> entries, ClassId fallback = 0) {
    EnsembleStack s;
    s.entries = std::move(entries);
    s.class_names = {"A", "B"};
    s.attribute_names = {"x0"};
    s.fallback_class = fallback;
    return s;
}

}  // namespace

TEST_CASE("predict_record: fixed-mode examples") {
    // Level 1: bin 0 of [0, 1] is pure A, bin 1 ambiguous.
    const auto l1 = fixed_entry(ProgramTree({Node::attr(0)}), 0.0, 1.0, {{0, 0.25, 0, 10, 10}}, {1});
    // Level 2: negated input, bin 0 of [-1, 0] (x > 0.5) is pure B.
    const auto l2 = fixed_entry(ProgramTree({Node::oper(Op::Sub), Node::constant(0), Node::attr(0)}), -1.0, 0.0,
                                {{0, -0.75, 1, 5, 5}}, {});
    const std::vector<double> a{0.2}, b{0.9}, mid{0.5};

    const auto one = stack_of({l1}, 1);
    const auto ta = predict_record(one, a, 1);
    CHECK(ta.label == 0);
    CHECK(ta.level == 1);
    const auto tb = predict_record(one, b, 1);
    CHECK(tb.fallback());
    CHECK(tb.label == 1);

    const auto two = stack_of({l1, l2}, 0);
    const auto t2 = predict_record(two, b, 2);
    CHECK(t2.label == 1);
    CHECK(t2.level == 2);
    // Level-2 bin 1 is not pure: both decline.
    CHECK(predict_record(two, mid, 2).fallback());
    CHECK(predict_record(two, b, 1).fallback());

    CHECK_THROWS_AS(predict_record(two, a, 0), ConfigError);
    CHECK_THROWS_AS(predict_record(two, a, 3), ConfigError);
    CHECK_THROWS_AS(predict_record(stack_of({}), a, 1), ConfigError);
}

TEST_CASE("predict_record: float-resolution nearest pure bin and ambiguous pass") {
    ChampionEntry f;
    f.tree = ProgramTree({Node::attr(0)});
    f.geometry = IntervalGeometry::float_resolution();
    f.beta = 0.6;
    f.pure_bins = {{fkey(1.0f), 1.0, 0, 3, 3}, {fkey(4.0f), 4.0, 1, 3, 3}};
    f.ambiguous_bins = {fkey(2.0f)};
    const auto s = stack_of({f}, 1);
    CHECK(predict_record(s, std::vector<double>{1.0}, 1).label == 0);
    CHECK(predict_record(s, std::vector<double>{1.4}, 1).label == 0);
    CHECK(predict_record(s, std::vector<double>{1.4}, 1).level == 1);
    CHECK(predict_record(s, std::vector<double>{2.5}, 1).label == 0);
    CHECK(predict_record(s, std::vector<double>{3.0}, 1).label == 1);
    CHECK(predict_record(s, std::vector<double>{2.0}, 1).fallback());
}

TEST_CASE("evaluate: counters, shares and reports") {
    const auto l1 = fixed_entry(ProgramTree({Node::attr(0)}), 0.0, 1.0, {{0, 0.25, 0, 10, 10}}, {1});
    const auto s = stack_of({l1}, 1);
    const auto data = testutil::make_dataset({{0.1}, {0.2}, {0.3}, {0.8}, {0.9}}, {0, 1, 0, 1, 0});
    const auto r = evaluate(s, data);
    CHECK(r.records == 5);
    CHECK(r.correct == 2);
    CHECK(r.error == 1);
    CHECK(r.fallback == 2);
    CHECK(r.fallback_correct == 1);
    CHECK(r.correct + r.error + r.fallback == r.records);
    CHECK(r.accuracy_strict() == doctest::Approx(0.4));
    CHECK(r.accuracy_with_fallback() == doctest::Approx(0.6));
    CHECK(r.per_level_counts == std::vector<std::size_t>{3});
    CHECK(r.per_level_nodes == std::vector<std::size_t>{1});

    const auto u = stack_usage_report(r);
    CHECK(u.level_shares == std::vector<double>{0.6});
    CHECK(u.fallback_share == doctest::Approx(0.4));

    const auto j = nlohmann::json::parse(r.to_json());
    for (const char* key : {"accuracy_strict", "accuracy_with_fallback", "correct", "error", "fallback",
                            "per_level_counts", "per_level_nodes", "seconds"})
        CHECK(j.contains(key));
    CHECK(r.to_text().find("accuracy_strict=0.4") != std::string::npos);

    CHECK_THROWS_AS(evaluate(s, data, 0), ConfigError);
    CHECK_THROWS_AS(evaluate(s, data, 2), ConfigError);
    const auto wide = testutil::make_dataset({{0.1, 1.0}}, {0});
    CHECK_THROWS_AS(evaluate(s, wide), DataError);
}

TEST_CASE("evaluate: class table is matched by name") {
    const auto l1 = fixed_entry(ProgramTree({Node::attr(0)}), 0.0, 1.0, {{0, 0.25, 0, 10, 10}}, {});
    const auto s = stack_of({l1}, 1);
    // Labels listed in the opposite order: "B" first.
    const auto data = testutil::make_dataset({{0.9}, {0.1}}, {0, 1}, {"B", "A"});
    const auto r = evaluate(s, data);
    CHECK(r.correct == 1);
    CHECK(r.fallback_correct == 1);
}

TEST_CASE("evaluate: separable toy set answers fully at level 1") {
    const auto data = testutil::make_dataset({{-2}, {-1}, {1}, {2}}, {0, 0, 1, 1});
    auto cfg = TrainerConfig::preset("small-fast");
    const auto s = train(data, cfg);
    const auto r = evaluate(s, data);
    CHECK(r.accuracy_strict() == 1.0);
    const auto u = stack_usage_report(r);
    CHECK(u.level_shares == std::vector<double>{1.0});
    CHECK(u.fallback_share == 0.0);
}

TEST_CASE("evaluate: prefix property and parallel equivalence on trained models") {
    RngStream rng(71, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto data = testutil::random_dataset(rng, 60 + rng.below(100), 3, 2);
        auto cfg = TrainerConfig::preset(trial % 2 ? "large-slow" : "small-fast");
        cfg.max_boost_epoch = std::min<std::size_t>(cfg.max_boost_epoch, 40);
        cfg.seed = static_cast<std::uint64_t>(trial);
        const auto s = train(data, cfg);
        if (s.entries.empty()) continue;
        const auto full = s.entries.size();
        for (std::size_t r = 0; r < data.rows(); ++r) {
            const auto ref = predict_record(s, data.record(r), full);
            for (std::size_t k = 1; k < full; ++k) {
                const auto t = predict_record(s, data.record(r), k);
                if (ref.level != 0 && ref.level <= k) {
                    CHECK(t.level == ref.level);
                    CHECK(t.label == ref.label);
                } else {
                    CHECK(t.fallback());
                }
            }
        }
        for (std::size_t k = 1; k <= full; ++k) {
            const auto a = evaluate_serial(s, data, k);
            for (int w : {1, 3, 0}) {
                const auto b = evaluate(s, data, k, w);
                CHECK(a.correct == b.correct);
                CHECK(a.error == b.error);
                CHECK(a.fallback == b.fallback);
                CHECK(a.fallback_correct == b.fallback_correct);
                CHECK(a.per_level_counts == b.per_level_counts);
            }
        }
    }
}
