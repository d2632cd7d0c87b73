#include "bstac/evaluator.hpp"

#include <chrono>
#include "json.hpp"
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bstac/error.hpp"
#include "bstac/kernels.hpp"
#include "bstac/text.hpp"

namespace bstac {

PredictionTrace predict_record(const EnsembleStack& stack, std::span<const double> record, std::size_t stack_depth) {
    if (stack.entries.empty()) throw ConfigError("cannot predict with an empty stack");
    if (stack_depth == 0 || stack_depth > stack.entries.size())
        throw ConfigError("stack depth must lie in [1, " + std::to_string(stack.entries.size()) + "]");

    for (std::size_t lvl = 0; lvl < stack_depth; ++lvl) {
        const auto& e = stack.entries[lvl];
        const double y = eval(e.tree, record);
        const BinKey key = e.geometry.key_of(y);
        if (const auto* p = e.find_pure(key)) return {p->label, lvl + 1, std::nullopt};
        if (e.geometry.mode != BinMode::FloatResolution || e.is_ambiguous(key)) continue;
        if (const auto near = nearest_pure_bin(e.pure_bins, y)) return {near->label, lvl + 1, std::nullopt};
    }
    return {stack.fallback_class, 0, std::nullopt};
}

double EvalReport::accuracy_strict() const {
    return records ? static_cast<double>(correct) / static_cast<double>(records) : 0.0;
}

double EvalReport::accuracy_with_fallback() const {
    return records ? static_cast<double>(correct + fallback_correct) / static_cast<double>(records) : 0.0;
}

std::string EvalReport::to_text() const {
    std::ostringstream out;
    out << "records=" << records << '\n'
        << "accuracy_strict=" << format_real(accuracy_strict()) << '\n'
        << "accuracy_with_fallback=" << format_real(accuracy_with_fallback()) << '\n'
        << "correct=" << correct << '\n'
        << "error=" << error << '\n'
        << "fallback=" << fallback << '\n'
        << "fallback_correct=" << fallback_correct << '\n';
    out << "per_level_counts=";
    for (std::size_t i = 0; i < per_level_counts.size(); ++i) out << (i ? "," : "") << per_level_counts[i];
    out << "\nper_level_nodes=";
    for (std::size_t i = 0; i < per_level_nodes.size(); ++i) out << (i ? "," : "") << per_level_nodes[i];
    out << "\nseconds=" << format_real(seconds) << '\n';
    return out.str();
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["records"] = records;
    j["accuracy_strict"] = accuracy_strict();
    j["accuracy_with_fallback"] = accuracy_with_fallback();
    j["correct"] = correct;
    j["error"] = error;
    j["fallback"] = fallback;
    j["fallback_correct"] = fallback_correct;
    j["per_level_counts"] = per_level_counts;
    j["per_level_nodes"] = per_level_nodes;
    j["seconds"] = seconds;
    return j.dump(2);
}

namespace {

struct Counters {
    std::size_t correct = 0, error = 0, fallback = 0, fallback_correct = 0;
    std::vector<std::size_t> levels;

    void merge(const Counters& o) {
        correct += o.correct;
        error += o.error;
        fallback += o.fallback;
        fallback_correct += o.fallback_correct;
        for (std::size_t i = 0; i < levels.size(); ++i) levels[i] += o.levels[i];
    }
};

void tally(Counters& c, const PredictionTrace& t, ClassId truth) {
    const bool ok = t.label == truth;
    if (t.fallback()) {
        ++c.fallback;
        c.fallback_correct += ok ? 1 : 0;
        return;
    }
    ++c.levels[t.level - 1];
    ++(ok ? c.correct : c.error);
}

std::size_t checked_depth(const EnsembleStack& stack, const LabeledDataset& data,
                          std::optional<std::size_t> stack_depth) {
    if (data.cols() != stack.num_attributes())
        throw DataError("model expects " + std::to_string(stack.num_attributes()) + " attributes, data has " +
                        std::to_string(data.cols()));
    if (stack.entries.empty()) throw ConfigError("cannot evaluate an empty stack");
    const std::size_t depth = stack_depth.value_or(stack.entries.size());
    if (depth == 0) throw ConfigError("stack depth must be at least 1");
    if (depth > stack.entries.size())
        throw ConfigError("stack depth " + std::to_string(depth) + " exceeds stack size " +
                          std::to_string(stack.entries.size()));
    return depth;
}

EvalReport finish(const EnsembleStack& stack, std::size_t depth, std::size_t n, const Counters& c, double seconds) {
    EvalReport r;
    r.records = n;
    r.correct = c.correct;
    r.error = c.error;
    r.fallback = c.fallback;
    r.fallback_correct = c.fallback_correct;
    r.per_level_counts = c.levels;
    for (std::size_t i = 0; i < depth; ++i) r.per_level_nodes.push_back(stack.entries[i].tree.node_count());
    r.seconds = seconds;
    return r;
}

LabeledDataset aligned(const EnsembleStack& stack, const LabeledDataset& data) {
    return data.class_names() == stack.class_names ? data : data.with_class_table(stack.class_names);
}

}  // namespace

EvalReport evaluate_serial(const EnsembleStack& stack, const LabeledDataset& data,
                           std::optional<std::size_t> stack_depth) {
    const auto depth = checked_depth(stack, data, stack_depth);
    const auto start = std::chrono::steady_clock::now();
    const auto d = aligned(stack, data);
    Counters c;
    c.levels.assign(depth, 0);
    for (std::size_t r = 0; r < d.rows(); ++r) tally(c, predict_record(stack, d.record(r), depth), d.label(r));
    return finish(stack, depth, d.rows(), c,
                  std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

EvalReport evaluate(const EnsembleStack& stack, const LabeledDataset& data, std::optional<std::size_t> stack_depth,
                    int workers) {
    const auto depth = checked_depth(stack, data, stack_depth);
    const auto start = std::chrono::steady_clock::now();
    const auto d = aligned(stack, data);
    const int threads = resolve_workers(workers);

    // Per-thread counters merged in thread order; integer sums are exact.
    std::vector<Counters> partial(static_cast<std::size_t>(threads));
    for (auto& p : partial) p.levels.assign(depth, 0);
    const auto rows = static_cast<std::ptrdiff_t>(d.rows());
#pragma omp parallel num_threads(threads)
    {
#ifdef _OPENMP
        auto& mine = partial[static_cast<std::size_t>(omp_get_thread_num())];
#else
        auto& mine = partial[0];
#endif
#pragma omp for schedule(static)
        for (std::ptrdiff_t r = 0; r < rows; ++r) {
            const auto row = static_cast<std::size_t>(r);
            tally(mine, predict_record(stack, d.record(row), depth), d.label(row));
        }
    }
    Counters total;
    total.levels.assign(depth, 0);
    for (const auto& p : partial) total.merge(p);
    return finish(stack, depth, d.rows(), total,
                  std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

StackUsage stack_usage_report(const EvalReport& report) {
    StackUsage u;
    if (report.records == 0) return u;
    const double n = static_cast<double>(report.records);
    for (auto c : report.per_level_counts) u.level_shares.push_back(static_cast<double>(c) / n);
    u.fallback_share = static_cast<double>(report.fallback) / n;
    return u;
}

}  // namespace bstac
