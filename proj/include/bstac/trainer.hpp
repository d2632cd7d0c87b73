#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bstac/binning.hpp"
#include "bstac/dataset.hpp"
#include "bstac/kernels.hpp"
#include "bstac/program.hpp"

namespace bstac {

// How the champion fitness bar moves between boosting epochs.
enum class BestFitPolicy : std::uint8_t {
    Persist,  // raised to each champion's fitness and kept across epochs
    Reset,    // raised within an epoch, back to 0 at the start of the next
    Fixed     // stays 0: any parent with a pure bin and positive fitness qualifies
};

std::string_view best_fit_policy_name(BestFitPolicy p);
BestFitPolicy parse_best_fit_policy(std::string_view name);

// What happens when a boosting epoch runs out of generations without a champion.
enum class StallPolicy : std::uint8_t {
    Stop,   // return the stack built so far
    Retry   // move on to the next epoch with a fresh population
};

std::string_view stall_policy_name(StallPolicy p);
StallPolicy parse_stall_policy(std::string_view name);

struct TrainerConfig {
    std::size_t max_boost_epoch = 1000;
    std::size_t max_gp_epoch = 30;
    std::size_t new_pop_size = 30;
    std::size_t gap = 10;  // parent pool size
    BinMode mode = BinMode::Fixed;
    std::uint32_t num_bin = 2;
    double beta = 0.99;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    BestFitPolicy best_fit = BestFitPolicy::Persist;
    StallPolicy on_stall = StallPolicy::Retry;
    // Threads for population scoring; never affects results.
    int workers = 1;
    VariationParams variation;

    IntervalGeometry geometry() const {
        return mode == BinMode::FloatResolution ? IntervalGeometry::float_resolution() : IntervalGeometry::fixed(num_bin);
    }
    ScoringParams scoring() const { return {geometry(), {beta, alpha}}; }
    void validate() const;

    // small-fast, small-slow, large-fast, large-slow.
    static TrainerConfig preset(std::string_view name);
    static const std::vector<std::string>& preset_names();
};

// One stack level, frozen at the moment the champion was found.
struct ChampionEntry {
    ProgramTree tree;
    IntervalGeometry geometry;
    double beta = 0.0;
    std::vector<PureBin> pure_bins;       // ascending by value
    std::vector<BinKey> ambiguous_bins;   // ascending by value
    double fitness = 0.0;
    std::size_t boost_epoch = 0;          // 1-based
    std::size_t records_claimed = 0;

    // Pure-bin lookup by exact key.
    const PureBin* find_pure(BinKey key) const;
    bool is_ambiguous(BinKey key) const;

    friend bool operator==(const ChampionEntry&, const ChampionEntry&) = default;
};

struct TrainingLog {
    // Residual size before the first epoch, then after every pushed champion.
    std::vector<std::size_t> residual_sizes;
    // True when any epoch exhausted its generations without a champion.
    bool stalled = false;
    std::size_t generations = 0;
    // Not serialized: wall clock and the source rows each level claimed.
    double seconds = 0.0;
    std::vector<std::vector<std::size_t>> claimed_rows;
};

struct EnsembleStack {
    std::vector<ChampionEntry> entries;
    std::vector<std::string> class_names;
    std::vector<std::string> attribute_names;
    ClassId fallback_class = 0;
    TrainerConfig config;
    TrainingLog log;

    std::size_t num_attributes() const { return attribute_names.size(); }
    std::size_t total_nodes() const;
    double mean_depth() const;
};

struct GenerationResult {
    std::vector<ProgramTree> parent_pool;     // ranked, best first
    std::vector<ProgramScore> parent_scores;  // aligned with parent_pool
    std::vector<ProgramTree> next;            // parent pool followed by offspring
};

// Fresh stump population for a boosting epoch.
std::vector<ProgramTree> init_population(std::size_t num_attributes, const TrainerConfig& cfg, std::size_t boost_epoch);

// Scores, ranks (stable, descending fitness), keeps the best `gap` as the
// parent pool, and refills with grown and mutated clones of uniformly chosen
// parents.
GenerationResult evolve_generation(std::span<const ProgramTree> pop, const LabeledDataset& data,
                                   const TrainerConfig& cfg, std::size_t boost_epoch, std::size_t gp_epoch);

// Rank position of the first parent with a pure bin and fitness strictly
// above `best_fit`.
std::optional<std::size_t> find_champion_index(std::span<const ProgramScore> ranked_scores, double best_fit);

// As above, building the frozen entry and raising `best_fit` on success.
std::optional<ChampionEntry> find_champion(std::span<const ProgramTree> ranked_pop,
                                           std::span<const ProgramScore> ranked_scores, const LabeledDataset& data,
                                           const TrainerConfig& cfg, double& best_fit);

struct Residual {
    LabeledDataset residual;
    std::vector<std::size_t> claimed;  // row indices into the input data
};

// Removes every record that lands in one of the champion's pure bins,
// whatever its own label; sets champion.records_claimed.
Residual extract_residual(ChampionEntry& champion, const LabeledDataset& data);

EnsembleStack train(const LabeledDataset& data, const TrainerConfig& cfg);

}  // namespace bstac
