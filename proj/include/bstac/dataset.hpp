#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bstac {

using ClassId = std::uint32_t;

// Row-major matrix of finite attributes plus a dense class index per row.
//
// Class identifiers are kept verbatim as strings and mapped to dense indices
// in first-appearance order. Subsets produced by split/removal share the
// parent's class table, so class indices stay comparable across partitions.
class LabeledDataset {
public:
    LabeledDataset() = default;
    LabeledDataset(std::vector<std::string> attribute_names, std::vector<double> values,
                   std::vector<ClassId> labels, std::vector<std::string> class_names,
                   std::string label_name = "class", std::size_t label_position = npos);

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t rows() const { return labels_.size(); }
    std::size_t cols() const { return attribute_names_.size(); }
    bool empty() const { return labels_.empty(); }

    std::span<const double> record(std::size_t row) const {
        return {values_.data() + row * cols(), cols()};
    }
    double at(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
    std::span<const double> values() const { return values_; }

    ClassId label(std::size_t row) const { return labels_[row]; }
    std::span<const ClassId> labels() const { return labels_; }

    std::size_t num_classes() const { return class_names_.size(); }
    const std::vector<std::string>& class_names() const { return class_names_; }
    // #Inst(c): records of class c in this dataset.
    const std::vector<std::size_t>& class_counts() const { return class_counts_; }
    // Lowest class index among those with the largest count.
    ClassId majority_class() const;

    const std::vector<std::string>& attribute_names() const { return attribute_names_; }
    const std::string& label_name() const { return label_name_; }
    // Column position of the label in the source CSV (cols() means last).
    std::size_t label_position() const { return label_position_; }

    // Rows in the given order; duplicates allowed.
    LabeledDataset subset(std::span<const std::size_t> rows) const;

    // Returns a copy whose labels index into `names`; classes unknown to
    // `names` are appended after them.
    LabeledDataset with_class_table(const std::vector<std::string>& names) const;

private:
    std::vector<std::string> attribute_names_;
    std::vector<double> values_;
    std::vector<ClassId> labels_;
    std::vector<std::string> class_names_;
    std::vector<std::size_t> class_counts_;
    std::string label_name_ = "class";
    std::size_t label_position_ = 0;
};

// Column selector: a header name, or a zero-based index given as digits.
// Empty selects the last column.
struct LabelColumn {
    std::string selector;
};

LabeledDataset load_csv(const std::filesystem::path& path, const LabelColumn& label = {});
LabeledDataset parse_csv(std::string_view text, const LabelColumn& label = {},
                         const std::string& source = "<memory>");
void write_csv(const LabeledDataset& data, const std::filesystem::path& path);
std::string format_csv(const LabeledDataset& data);

struct SplitSpec {
    double train_fraction = 0.7;
    bool stratified = true;
    std::uint64_t seed = 0;
};

struct Split {
    LabeledDataset train;
    LabeledDataset test;
};

// Per class c, round-half-up(train_fraction * #Inst(c)) records go to train.
// Within each partition the source row order is preserved.
Split stratified_split(const LabeledDataset& data, const SplitSpec& spec);

// Rows not listed in `indices`, in their original order.
LabeledDataset remove_records(const LabeledDataset& data, std::span<const std::size_t> indices);

}  // namespace bstac
