#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bstac/dataset.hpp"

namespace bstac {

using BinKey = std::uint32_t;

enum class BinMode : std::uint8_t {
    Fixed,           // num_bin equal-width intervals over [lo, hi]
    FloatResolution  // one bin per single-precision value (2^32 bins)
};

enum class BinType : std::uint8_t { Empty, Pure, Ambiguous };

std::string_view bin_type_name(BinType t);

// Map between a program output and its bin.
struct IntervalGeometry {
    BinMode mode = BinMode::Fixed;
    std::uint32_t num_bin = 2;
    double lo = 0.0;
    double hi = 0.0;

    static IntervalGeometry fixed(std::uint32_t num_bin) { return {BinMode::Fixed, num_bin, 0.0, 0.0}; }
    static IntervalGeometry float_resolution() { return {BinMode::FloatResolution, 0, 0.0, 0.0}; }

    // Fixed: clamp(floor((y - lo) / width), 0, num_bin - 1); a degenerate
    // range maps everything to bin 0. Float: bit pattern of (float)y with
    // -0 folded into +0.
    BinKey key_of(double y) const {
        if (mode == BinMode::FloatResolution) {
            float f = static_cast<float>(y);
            if (f == 0.0f) f = 0.0f;
            return std::bit_cast<std::uint32_t>(f);
        }
        const double width = (hi - lo) / static_cast<double>(num_bin);
        if (!(width > 0.0)) return 0;
        const double pos = std::floor((y - lo) / width);
        if (!(pos >= 0.0)) return 0;
        if (pos >= static_cast<double>(num_bin - 1)) return num_bin - 1;
        return static_cast<BinKey>(pos);
    }

    // Value on the output line that stands for the bin: its float value in
    // float mode, the interval centre in fixed mode.
    double representative(BinKey key) const {
        if (mode == BinMode::FloatResolution) return static_cast<double>(std::bit_cast<float>(key));
        const double width = (hi - lo) / static_cast<double>(num_bin);
        return lo + (static_cast<double>(key) + 0.5) * width;
    }

    // Number of bins the geometry offers (2^32 in float mode).
    std::uint64_t available_bins() const {
        return mode == BinMode::FloatResolution ? (std::uint64_t{1} << 32) : num_bin;
    }

    friend bool operator==(const IntervalGeometry&, const IntervalGeometry&) = default;
};

// Monotone map from float bit patterns to unsigned order (NaN excluded).
inline std::uint32_t float_order(BinKey bits) {
    return (bits & 0x80000000u) ? ~bits : (bits | 0x80000000u);
}

// Bin contents for one key. `counts` is indexed by class.
struct BinStats {
    BinKey key = 0;
    std::size_t total = 0;
    std::vector<std::size_t> counts;

    std::size_t majority_count() const;
    // Lowest class index attaining the majority count.
    ClassId majority_class() const;
};

// Purity: y* / total >= beta. Empty when total == 0.
BinType classify_bin(const BinStats& stats, double beta);

// Occupied bins of one program over one dataset, ascending by output value.
class BinHistogram {
public:
    BinHistogram() = default;
    BinHistogram(IntervalGeometry geometry, std::size_t num_classes, std::vector<BinKey> keys,
                 std::vector<std::size_t> counts, std::vector<BinKey> record_bins = {});

    const IntervalGeometry& geometry() const { return geometry_; }
    std::size_t num_classes() const { return num_classes_; }
    std::size_t used_bins() const { return keys_.size(); }
    std::size_t records() const { return records_; }

    BinKey key(std::size_t bin) const { return keys_[bin]; }
    std::size_t total(std::size_t bin) const { return totals_[bin]; }
    std::size_t count(std::size_t bin, ClassId c) const { return counts_[bin * num_classes_ + c]; }
    std::span<const std::size_t> counts(std::size_t bin) const {
        return {counts_.data() + bin * num_classes_, num_classes_};
    }
    BinStats stats(std::size_t bin) const;
    // Stats for an arbitrary key; total == 0 when the key is unoccupied.
    BinStats stats_for_key(BinKey key) const;
    std::optional<std::size_t> find(BinKey key) const;

    // Per-record bin keys, present only when requested at fit time.
    const std::vector<BinKey>& record_bins() const { return record_bins_; }

private:
    IntervalGeometry geometry_;
    std::size_t num_classes_ = 0;
    std::size_t records_ = 0;
    std::vector<BinKey> keys_;
    std::vector<std::size_t> totals_;
    std::vector<std::size_t> counts_;
    std::vector<BinKey> record_bins_;
};

// Bins precomputed outputs. Fixed mode sets lo/hi from the outputs.
BinHistogram fit_histogram(std::span<const double> outputs, std::span<const ClassId> labels,
                           std::size_t num_classes, IntervalGeometry geometry, bool keep_record_bins = false);

class ProgramTree;
BinHistogram fit_histogram(const ProgramTree& tree, const LabeledDataset& data, IntervalGeometry geometry,
                           bool keep_record_bins = false);

struct FitnessConfig {
    double beta = 0.99;
    double alpha = 0.0;
};

// GiniIndex + alpha * %Used_bins, where
//   GiniIndex = sum_i sum_c (Count(i,c) / (Total(i) * Inst(c)))^2 * Inst(c)
//   %Used_bins = used_bins / min(available_bins, n).
// Higher is fitter.
double gini_fitness(const BinHistogram& hist, std::span<const std::size_t> class_counts, double alpha);

std::size_t count_pure_bins(const BinHistogram& hist, double beta);

struct PureBin {
    BinKey key = 0;
    double value = 0.0;  // representative output
    ClassId label = 0;
    std::size_t total = 0;
    std::size_t majority = 0;

    friend bool operator==(const PureBin&, const PureBin&) = default;
};

// Pure bins of `hist`, ascending by representative output.
std::vector<PureBin> pure_bin_table(const BinHistogram& hist, double beta);

// Pure bin whose representative is closest to `query`; ties go to the
// lower value. `table` must be ascending by value.
std::optional<PureBin> nearest_pure_bin(std::span<const PureBin> table, double query);

}  // namespace bstac
