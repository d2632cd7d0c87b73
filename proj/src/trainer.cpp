#include "bstac/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "bstac/error.hpp"

namespace bstac {

namespace {

// RNG stream purposes.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kOffspringStream = 2;

bool value_less(BinMode mode, BinKey a, BinKey b) {
    return mode == BinMode::FloatResolution ? float_order(a) < float_order(b) : a < b;
}

}  // namespace

std::string_view best_fit_policy_name(BestFitPolicy p) {
    switch (p) {
        case BestFitPolicy::Persist: return "persist";
        case BestFitPolicy::Reset: return "reset";
        case BestFitPolicy::Fixed: return "fixed";
    }
    return "?";
}

BestFitPolicy parse_best_fit_policy(std::string_view name) {
    for (auto p : {BestFitPolicy::Persist, BestFitPolicy::Reset, BestFitPolicy::Fixed})
        if (best_fit_policy_name(p) == name) return p;
    throw ConfigError("unknown best-fit policy '" + std::string(name) + "'");
}

std::string_view stall_policy_name(StallPolicy p) {
    return p == StallPolicy::Retry ? "retry" : "stop";
}

StallPolicy parse_stall_policy(std::string_view name) {
    for (auto p : {StallPolicy::Stop, StallPolicy::Retry})
        if (stall_policy_name(p) == name) return p;
    throw ConfigError("unknown stall policy '" + std::string(name) + "'");
}

void TrainerConfig::validate() const {
    if (new_pop_size < 2) throw ConfigError("population size must be at least 2");
    if (gap == 0 || gap >= new_pop_size) throw ConfigError("gap must satisfy 0 < gap < population size");
    if (mode == BinMode::Fixed && num_bin < 2) throw ConfigError("num_bin must be at least 2");
    if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in (0, 1]");
    if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
}

const std::vector<std::string>& TrainerConfig::preset_names() {
    static const std::vector<std::string> names{"small-fast", "small-slow", "large-fast", "large-slow"};
    return names;
}

TrainerConfig TrainerConfig::preset(std::string_view name) {
    TrainerConfig c;
    if (name == "small-fast" || name == "small-slow") {
        c.max_boost_epoch = 1000;
        c.max_gp_epoch = 30;
        c.new_pop_size = name == "small-fast" ? 30 : 1000;
        c.gap = name == "small-fast" ? 10 : 300;
        c.mode = BinMode::Fixed;
        c.num_bin = 2;
        c.beta = 0.99;
        c.alpha = 0.0;
    } else if (name == "large-fast" || name == "large-slow") {
        c.max_boost_epoch = 10;
        c.max_gp_epoch = name == "large-fast" ? 3 : 6;
        c.new_pop_size = 30;
        c.gap = 10;
        c.mode = BinMode::FloatResolution;
        c.num_bin = 0;
        c.beta = name == "large-fast" ? 0.6 : 0.75;
        c.alpha = 0.4;
    } else {
        throw ConfigError("unknown preset '" + std::string(name) + "'");
    }
    return c;
}

const PureBin* ChampionEntry::find_pure(BinKey key) const {
    const auto mode = geometry.mode;
    const auto it = std::lower_bound(pure_bins.begin(), pure_bins.end(), key,
                                     [mode](const PureBin& p, BinKey k) { return value_less(mode, p.key, k); });
    return (it != pure_bins.end() && it->key == key) ? &*it : nullptr;
}

bool ChampionEntry::is_ambiguous(BinKey key) const {
    const auto mode = geometry.mode;
    const auto it = std::lower_bound(ambiguous_bins.begin(), ambiguous_bins.end(), key,
                                     [mode](BinKey a, BinKey b) { return value_less(mode, a, b); });
    return it != ambiguous_bins.end() && *it == key;
}

std::size_t EnsembleStack::total_nodes() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.tree.node_count();
    return n;
}

double EnsembleStack::mean_depth() const {
    if (entries.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& e : entries) sum += static_cast<double>(e.tree.depth());
    return sum / static_cast<double>(entries.size());
}

std::vector<ProgramTree> init_population(std::size_t num_attributes, const TrainerConfig& cfg,
                                         std::size_t boost_epoch) {
    std::vector<ProgramTree> pop;
    pop.reserve(cfg.new_pop_size);
    for (std::size_t i = 0; i < cfg.new_pop_size; ++i) {
        RngStream rng(cfg.seed, RngStream::stream_id({kInitStream, boost_epoch, i}));
        pop.push_back(init_stump(num_attributes, rng, cfg.variation));
    }
    return pop;
}

GenerationResult evolve_generation(std::span<const ProgramTree> pop, const LabeledDataset& data,
                                   const TrainerConfig& cfg, std::size_t boost_epoch, std::size_t gp_epoch) {
    if (pop.empty()) throw ConfigError("cannot evolve an empty population");
    const auto scores = score_population(pop, data, cfg.scoring(), cfg.workers);

    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a].fitness > scores[b].fitness; });

    GenerationResult out;
    const std::size_t keep = std::min(cfg.gap, pop.size());
    for (std::size_t r = 0; r < keep; ++r) {
        out.parent_pool.push_back(pop[order[r]]);
        out.parent_scores.push_back(scores[order[r]]);
    }

    out.next = out.parent_pool;
    const std::size_t target = std::max(cfg.new_pop_size, pop.size());
    for (std::size_t slot = 0; out.next.size() < target; ++slot) {
        RngStream rng(cfg.seed, RngStream::stream_id({kOffspringStream, boost_epoch, gp_epoch, slot}));
        const auto& parent = out.parent_pool[rng.below(out.parent_pool.size())];
        auto child = grow_clone(parent, data.cols(), rng, cfg.variation);
        out.next.push_back(mutate_params(child, data.cols(), rng, cfg.variation));
    }
    return out;
}

std::optional<std::size_t> find_champion_index(std::span<const ProgramScore> ranked_scores, double best_fit) {
    for (std::size_t r = 0; r < ranked_scores.size(); ++r)
        if (ranked_scores[r].pure_bins > 0 && ranked_scores[r].fitness > best_fit) return r;
    return std::nullopt;
}

std::optional<ChampionEntry> find_champion(std::span<const ProgramTree> ranked_pop,
                                           std::span<const ProgramScore> ranked_scores, const LabeledDataset& data,
                                           const TrainerConfig& cfg, double& best_fit) {
    const auto idx = find_champion_index(ranked_scores, best_fit);
    if (!idx) return std::nullopt;

    const auto hist = fit_histogram(ranked_pop[*idx], data, cfg.geometry());
    ChampionEntry e;
    e.tree = ranked_pop[*idx];
    e.geometry = hist.geometry();
    e.beta = cfg.beta;
    e.pure_bins = pure_bin_table(hist, cfg.beta);
    for (std::size_t b = 0; b < hist.used_bins(); ++b)
        if (classify_bin(hist.stats(b), cfg.beta) == BinType::Ambiguous) e.ambiguous_bins.push_back(hist.key(b));
    e.fitness = ranked_scores[*idx].fitness;
    best_fit = e.fitness;
    return e;
}

Residual extract_residual(ChampionEntry& champion, const LabeledDataset& data) {
    Residual out;
    if (!data.empty()) {
        std::vector<double> outputs(data.rows());
        eval_batch(champion.tree, data, outputs);
        for (std::size_t r = 0; r < data.rows(); ++r)
            if (champion.find_pure(champion.geometry.key_of(outputs[r]))) out.claimed.push_back(r);
    }
    champion.records_claimed = out.claimed.size();
    out.residual = remove_records(data, out.claimed);
    return out;
}

EnsembleStack train(const LabeledDataset& data, const TrainerConfig& cfg) {
    cfg.validate();
    if (data.empty()) throw DataError("cannot train on an empty dataset");
    const auto present = std::count_if(data.class_counts().begin(), data.class_counts().end(),
                                       [](std::size_t c) { return c > 0; });
    if (present < 2) throw DataError("training data needs at least two classes");

    const auto start = std::chrono::steady_clock::now();
    EnsembleStack stack;
    stack.class_names = data.class_names();
    stack.attribute_names = data.attribute_names();
    stack.fallback_class = data.majority_class();
    stack.config = cfg;

    LabeledDataset residual = data;
    std::vector<std::size_t> origin(data.rows());
    std::iota(origin.begin(), origin.end(), std::size_t{0});
    stack.log.residual_sizes.push_back(residual.rows());

    double best_fit = 0.0;
    for (std::size_t epoch = 1; epoch <= cfg.max_boost_epoch; ++epoch) {
        if (cfg.best_fit == BestFitPolicy::Reset) best_fit = 0.0;
        auto pop = init_population(data.cols(), cfg, epoch);
        std::optional<ChampionEntry> champion;
        for (std::size_t gen = 1; gen <= cfg.max_gp_epoch && !champion; ++gen) {
            auto result = evolve_generation(pop, residual, cfg, epoch, gen);
            ++stack.log.generations;
            champion = find_champion(result.parent_pool, result.parent_scores, residual, cfg, best_fit);
            if (cfg.best_fit == BestFitPolicy::Fixed) best_fit = 0.0;
            pop = std::move(result.next);
        }
        if (!champion) {
            stack.log.stalled = true;
            if (cfg.on_stall == StallPolicy::Retry) continue;
            break;
        }
        champion->boost_epoch = epoch;
        auto res = extract_residual(*champion, residual);

        std::vector<std::size_t> claimed_src;
        claimed_src.reserve(res.claimed.size());
        std::vector<char> drop(origin.size(), 0);
        for (std::size_t r : res.claimed) {
            claimed_src.push_back(origin[r]);
            drop[r] = 1;
        }
        std::vector<std::size_t> kept;
        kept.reserve(origin.size() - res.claimed.size());
        for (std::size_t r = 0; r < origin.size(); ++r)
            if (!drop[r]) kept.push_back(origin[r]);
        origin = std::move(kept);

        stack.log.claimed_rows.push_back(std::move(claimed_src));
        stack.entries.push_back(std::move(*champion));
        residual = std::move(res.residual);
        stack.log.residual_sizes.push_back(residual.rows());
        if (residual.empty()) break;
    }
    stack.log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return stack;
}

}  // namespace bstac
