#include "bstac/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "bstac/evaluator.hpp"
#include "bstac/text.hpp"
#include "json.hpp"

namespace bstac {

TrialResult run_trial(const LabeledDataset& data, const TrialPlan& plan, std::size_t index) {
    TrialResult t;
    t.index = index;
    t.seed = plan.trainer.seed + index;

    LabeledDataset train_set;
    std::optional<LabeledDataset> test_set;
    if (plan.train_fraction < 1.0) {
        auto split = stratified_split(data, {plan.train_fraction, true, t.seed});
        train_set = std::move(split.train);
        test_set = std::move(split.test);
    } else {
        train_set = data;
    }

    auto cfg = plan.trainer;
    cfg.seed = t.seed;
    t.model = train(train_set, cfg);
    t.seconds = t.model.log.seconds;
    t.trees = t.model.entries.size();
    t.nodes = t.model.total_nodes();
    t.mean_depth = t.model.mean_depth();
    t.stalled = t.model.log.stalled;
    if (t.model.entries.empty()) return t;

    const auto tr = evaluate(t.model, train_set, std::nullopt, cfg.workers);
    t.train_accuracy = tr.accuracy_with_fallback();
    t.train_accuracy_strict = tr.accuracy_strict();
    if (test_set && !test_set->empty()) {
        const auto te = evaluate(t.model, *test_set, std::nullopt, cfg.workers);
        t.test_accuracy = te.accuracy_with_fallback();
        t.test_accuracy_strict = te.accuracy_strict();
    }
    return t;
}

std::vector<TrialResult> run_trials(const LabeledDataset& data, const TrialPlan& plan) {
    std::vector<TrialResult> out(plan.trials);
    const auto count = static_cast<std::ptrdiff_t>(plan.trials);
    if (plan.parallel) {
        auto serial_plan = plan;
        serial_plan.trainer.workers = 1;
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < count; ++i)
            out[static_cast<std::size_t>(i)] = run_trial(data, serial_plan, static_cast<std::size_t>(i));
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i)
            out[static_cast<std::size_t>(i)] = run_trial(data, plan, static_cast<std::size_t>(i));
    }
    return out;
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    if (values.empty()) return s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

namespace {

struct Columns {
    std::vector<double> train, test, train_strict, test_strict, nodes, trees, depth, seconds;
};

Columns collect(const std::vector<TrialResult>& trials) {
    Columns c;
    for (const auto& t : trials) {
        c.train.push_back(t.train_accuracy);
        c.train_strict.push_back(t.train_accuracy_strict);
        if (t.test_accuracy) c.test.push_back(*t.test_accuracy);
        if (t.test_accuracy_strict) c.test_strict.push_back(*t.test_accuracy_strict);
        c.nodes.push_back(static_cast<double>(t.nodes));
        c.trees.push_back(static_cast<double>(t.trees));
        c.depth.push_back(t.mean_depth);
        c.seconds.push_back(t.seconds);
    }
    return c;
}

std::string pm(const std::vector<double>& v, int precision) {
    const auto s = summarize(v);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.*f +/- %.*f", precision, s.mean, precision, s.stddev);
    return buf;
}

}  // namespace

std::string aggregate_text(const std::vector<TrialResult>& trials) {
    const auto c = collect(trials);
    std::ostringstream out;
    out << "trials=" << trials.size() << '\n';
    out << "train_accuracy=" << pm(c.train, 3) << '\n';
    if (!c.test.empty()) out << "test_accuracy=" << pm(c.test, 3) << '\n';
    out << "train_accuracy_strict=" << pm(c.train_strict, 3) << '\n';
    if (!c.test_strict.empty()) out << "test_accuracy_strict=" << pm(c.test_strict, 3) << '\n';
    out << "nodes=" << pm(c.nodes, 2) << '\n';
    out << "trees=" << pm(c.trees, 2) << '\n';
    out << "avg_tree_depth=" << pm(c.depth, 2) << '\n';
    out << "seconds=" << pm(c.seconds, 3) << '\n';
    return out.str();
}

std::string aggregate_json(const std::vector<TrialResult>& trials) {
    const auto c = collect(trials);
    nlohmann::ordered_json j;
    j["trials"] = trials.size();
    auto stat = [](const std::vector<double>& v) {
        const auto s = summarize(v);
        return nlohmann::ordered_json{{"mean", s.mean}, {"std", s.stddev}};
    };
    j["train_accuracy"] = stat(c.train);
    if (!c.test.empty()) j["test_accuracy"] = stat(c.test);
    j["train_accuracy_strict"] = stat(c.train_strict);
    if (!c.test_strict.empty()) j["test_accuracy_strict"] = stat(c.test_strict);
    j["nodes"] = stat(c.nodes);
    j["trees"] = stat(c.trees);
    j["avg_tree_depth"] = stat(c.depth);
    j["seconds"] = stat(c.seconds);
    auto rows = nlohmann::ordered_json::array();
    for (const auto& t : trials) {
        nlohmann::ordered_json r;
        r["index"] = t.index;
        r["seed"] = t.seed;
        r["train_accuracy"] = t.train_accuracy;
        r["test_accuracy"] = t.test_accuracy ? nlohmann::ordered_json(*t.test_accuracy) : nullptr;
        r["train_accuracy_strict"] = t.train_accuracy_strict;
        r["test_accuracy_strict"] = t.test_accuracy_strict ? nlohmann::ordered_json(*t.test_accuracy_strict) : nullptr;
        r["trees"] = t.trees;
        r["nodes"] = t.nodes;
        r["avg_tree_depth"] = t.mean_depth;
        r["stalled"] = t.stalled;
        r["seconds"] = t.seconds;
        rows.push_back(std::move(r));
    }
    j["per_trial"] = std::move(rows);
    return j.dump(2);
}

std::string trial_model_path(const std::string& base, std::size_t index, std::size_t count) {
    if (count <= 1) return base;
    const std::filesystem::path p(base);
    char tag[32];
    std::snprintf(tag, sizeof tag, ".trial%02zu", index);
    return (p.parent_path() / (p.stem().string() + tag + p.extension().string())).string();
}

}  // namespace bstac
