#include "bstac/binning.hpp"

#include <algorithm>
#include <boost/sort/spreadsort/integer_sort.hpp>
#include <limits>
#include <stdexcept>

#include "bstac/error.hpp"
#include "bstac/kernels.hpp"

namespace bstac {

std::string_view bin_type_name(BinType t) {
    switch (t) {
        case BinType::Empty: return "empty";
        case BinType::Pure: return "pure";
        case BinType::Ambiguous: return "ambiguous";
    }
    return "?";
}

std::size_t BinStats::majority_count() const {
    return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

ClassId BinStats::majority_class() const {
    return counts.empty() ? 0 : static_cast<ClassId>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

BinType classify_bin(const BinStats& stats, double beta) {
    if (stats.total == 0) return BinType::Empty;
    const double purity = static_cast<double>(stats.majority_count()) / static_cast<double>(stats.total);
    return purity >= beta ? BinType::Pure : BinType::Ambiguous;
}

namespace {

// Sort position of a key: raw index in fixed mode, value order in float mode.
std::uint32_t sort_key(BinMode mode, BinKey key) { return mode == BinMode::FloatResolution ? float_order(key) : key; }

}  // namespace

BinHistogram::BinHistogram(IntervalGeometry geometry, std::size_t num_classes, std::vector<BinKey> keys,
                           std::vector<std::size_t> counts, std::vector<BinKey> record_bins)
    : geometry_(geometry),
      num_classes_(num_classes),
      keys_(std::move(keys)),
      totals_(keys_.size(), 0),
      counts_(std::move(counts)),
      record_bins_(std::move(record_bins)) {
    if (counts_.size() != keys_.size() * num_classes_) throw std::invalid_argument("histogram count table size mismatch");
    for (std::size_t b = 0; b < keys_.size(); ++b) {
        for (std::size_t c = 0; c < num_classes_; ++c) totals_[b] += counts_[b * num_classes_ + c];
        records_ += totals_[b];
    }
}

BinStats BinHistogram::stats(std::size_t bin) const {
    const auto c = counts(bin);
    return {keys_[bin], totals_[bin], std::vector<std::size_t>(c.begin(), c.end())};
}

std::optional<std::size_t> BinHistogram::find(BinKey key) const {
    const auto mode = geometry_.mode;
    const auto it = std::lower_bound(keys_.begin(), keys_.end(), key, [mode](BinKey a, BinKey b) {
        return sort_key(mode, a) < sort_key(mode, b);
    });
    if (it == keys_.end() || *it != key) return std::nullopt;
    return static_cast<std::size_t>(it - keys_.begin());
}

BinStats BinHistogram::stats_for_key(BinKey key) const {
    if (const auto b = find(key)) return stats(*b);
    return {key, 0, std::vector<std::size_t>(num_classes_, 0)};
}

BinHistogram fit_histogram(std::span<const double> outputs, std::span<const ClassId> labels, std::size_t num_classes,
                           IntervalGeometry geometry, bool keep_record_bins) {
    if (outputs.empty()) throw DataError("cannot fit a histogram on an empty dataset");
    if (outputs.size() != labels.size()) throw std::invalid_argument("outputs/labels length mismatch");
    const std::size_t n = outputs.size();

    std::vector<BinKey> record_bins;
    if (keep_record_bins) record_bins.resize(n);

    if (geometry.mode == BinMode::Fixed) {
        if (geometry.num_bin < 2) throw ConfigError("fixed binning needs at least 2 bins");
        const auto [mn, mx] = std::minmax_element(outputs.begin(), outputs.end());
        geometry.lo = *mn;
        geometry.hi = *mx;
        std::vector<std::size_t> dense(static_cast<std::size_t>(geometry.num_bin) * num_classes, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const BinKey k = geometry.key_of(outputs[i]);
            ++dense[k * num_classes + labels[i]];
            if (keep_record_bins) record_bins[i] = k;
        }
        std::vector<BinKey> keys;
        std::vector<std::size_t> counts;
        for (BinKey k = 0; k < geometry.num_bin; ++k) {
            const auto row = dense.begin() + static_cast<std::ptrdiff_t>(k * num_classes);
            if (std::all_of(row, row + static_cast<std::ptrdiff_t>(num_classes), [](std::size_t v) { return v == 0; }))
                continue;
            keys.push_back(k);
            counts.insert(counts.end(), row, row + static_cast<std::ptrdiff_t>(num_classes));
        }
        return {geometry, num_classes, std::move(keys), std::move(counts), std::move(record_bins)};
    }

    // Float resolution: sort (value order, class) pairs and run-length count.
    std::vector<std::uint64_t> packed(n);
    for (std::size_t i = 0; i < n; ++i) {
        const BinKey k = geometry.key_of(outputs[i]);
        packed[i] = (std::uint64_t{float_order(k)} << 32) | labels[i];
        if (keep_record_bins) record_bins[i] = k;
    }
    boost::sort::spreadsort::integer_sort(packed.begin(), packed.end());

    std::vector<BinKey> keys;
    std::vector<std::size_t> counts;
    std::uint64_t current = std::numeric_limits<std::uint64_t>::max();
    for (const auto p : packed) {
        const auto order = static_cast<std::uint32_t>(p >> 32);
        if (order != current) {
            current = order;
            keys.push_back((order & 0x80000000u) ? (order & 0x7fffffffu) : ~order);
            counts.resize(counts.size() + num_classes, 0);
        }
        ++counts[counts.size() - num_classes + static_cast<std::uint32_t>(p)];
    }
    return {geometry, num_classes, std::move(keys), std::move(counts), std::move(record_bins)};
}

BinHistogram fit_histogram(const ProgramTree& tree, const LabeledDataset& data, IntervalGeometry geometry,
                           bool keep_record_bins) {
    if (data.empty()) throw DataError("cannot fit a histogram on an empty dataset");
    std::vector<double> outputs(data.rows());
    eval_batch(tree, data, outputs);
    return fit_histogram(outputs, data.labels(), data.num_classes(), geometry, keep_record_bins);
}

double gini_fitness(const BinHistogram& hist, std::span<const std::size_t> class_counts, double alpha) {
    const std::size_t nc = hist.num_classes();
    if (class_counts.size() < nc) throw std::invalid_argument("class count table shorter than histogram classes");
    double gini = 0.0;
    for (std::size_t b = 0; b < hist.used_bins(); ++b) {
        const double total = static_cast<double>(hist.total(b));
        for (std::size_t c = 0; c < nc; ++c) {
            const std::size_t cnt = hist.count(b, static_cast<ClassId>(c));
            if (cnt == 0) continue;
            if (class_counts[c] == 0)
                throw std::logic_error("class present in histogram but absent from class counts");
            const double inst = static_cast<double>(class_counts[c]);
            const double h = static_cast<double>(cnt) / (total * inst);
            gini += h * h * inst;
        }
    }
    const double denom = static_cast<double>(
        std::min<std::uint64_t>(hist.geometry().available_bins(), static_cast<std::uint64_t>(hist.records())));
    const double used = denom > 0 ? static_cast<double>(hist.used_bins()) / denom : 0.0;
    return gini + alpha * used;
}

std::size_t count_pure_bins(const BinHistogram& hist, double beta) {
    std::size_t pure = 0;
    for (std::size_t b = 0; b < hist.used_bins(); ++b) {
        const auto c = hist.counts(b);
        const auto ystar = *std::max_element(c.begin(), c.end());
        if (static_cast<double>(ystar) / static_cast<double>(hist.total(b)) >= beta) ++pure;
    }
    return pure;
}

std::vector<PureBin> pure_bin_table(const BinHistogram& hist, double beta) {
    std::vector<PureBin> table;
    for (std::size_t b = 0; b < hist.used_bins(); ++b) {
        const auto s = hist.stats(b);
        if (classify_bin(s, beta) != BinType::Pure) continue;
        table.push_back({s.key, hist.geometry().representative(s.key), s.majority_class(), s.total, s.majority_count()});
    }
    return table;
}

std::optional<PureBin> nearest_pure_bin(std::span<const PureBin> table, double query) {
    if (table.empty()) return std::nullopt;
    const auto it = std::lower_bound(table.begin(), table.end(), query,
                                     [](const PureBin& p, double q) { return p.value < q; });
    if (it == table.begin()) return *it;
    if (it == table.end()) return table.back();
    const auto below = std::prev(it);
    return (query - below->value) <= (it->value - query) ? *below : *it;
}

}  // namespace bstac
