#include "bstac/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "bstac/error.hpp"
#include "bstac/rng.hpp"
#include "bstac/text.hpp"

namespace bstac {

LabeledDataset::LabeledDataset(std::vector<std::string> attribute_names, std::vector<double> values,
                               std::vector<ClassId> labels, std::vector<std::string> class_names,
                               std::string label_name, std::size_t label_position)
    : attribute_names_(std::move(attribute_names)),
      values_(std::move(values)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)),
      class_counts_(class_names_.size(), 0),
      label_name_(std::move(label_name)),
      label_position_(label_position == npos ? attribute_names_.size() : label_position) {
    if (attribute_names_.empty()) throw DataError("dataset needs at least one attribute");
    if (values_.size() != labels_.size() * attribute_names_.size())
        throw DataError("attribute matrix size does not match rows x columns");
    for (double v : values_)
        if (!std::isfinite(v)) throw DataError("non-finite attribute value");
    for (ClassId c : labels_) {
        if (c >= class_names_.size()) throw DataError("label index outside class table");
        ++class_counts_[c];
    }
}

ClassId LabeledDataset::majority_class() const {
    const auto it = std::max_element(class_counts_.begin(), class_counts_.end());
    return it == class_counts_.end() ? 0 : static_cast<ClassId>(it - class_counts_.begin());
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
    std::vector<double> values;
    values.reserve(rows.size() * cols());
    std::vector<ClassId> labels;
    labels.reserve(rows.size());
    for (std::size_t r : rows) {
        const auto rec = record(r);
        values.insert(values.end(), rec.begin(), rec.end());
        labels.push_back(labels_[r]);
    }
    return {attribute_names_, std::move(values), std::move(labels), class_names_, label_name_,
            label_position_};
}

LabeledDataset LabeledDataset::with_class_table(const std::vector<std::string>& names) const {
    std::vector<std::string> table = names;
    std::vector<ClassId> remap(class_names_.size());
    for (std::size_t c = 0; c < class_names_.size(); ++c) {
        auto it = std::find(table.begin(), table.end(), class_names_[c]);
        if (it == table.end()) it = table.insert(table.end(), class_names_[c]);
        remap[c] = static_cast<ClassId>(it - table.begin());
    }
    std::vector<ClassId> labels(labels_.size());
    std::transform(labels_.begin(), labels_.end(), labels.begin(), [&](ClassId c) { return remap[c]; });
    return {attribute_names_, values_, std::move(labels), std::move(table), label_name_, label_position_};
}

namespace {

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::string(trim(cur)));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(std::string(trim(cur)));
    return out;
}

std::size_t resolve_label(const std::vector<std::string>& header, const LabelColumn& label,
                          const std::string& source) {
    if (label.selector.empty()) return header.size() - 1;
    std::size_t hits = 0, pos = 0;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == label.selector) {
            ++hits;
            pos = i;
        }
    if (hits > 1) throw DataError(source + ": label column '" + label.selector + "' appears more than once");
    if (hits == 1) return pos;
    std::size_t idx = 0;
    const auto* b = label.selector.data();
    const auto* e = b + label.selector.size();
    if (auto [p, ec] = std::from_chars(b, e, idx); ec == std::errc{} && p == e) {
        if (idx < header.size()) return idx;
    }
    throw DataError(source + ": label column '" + label.selector + "' not found");
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

}  // namespace

LabeledDataset parse_csv(std::string_view text, const LabelColumn& label, const std::string& source) {
    std::vector<std::string> lines;
    {
        std::size_t start = 0;
        while (start <= text.size()) {
            auto end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            std::string_view line = text.substr(start, end - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            lines.emplace_back(line);
            start = end + 1;
        }
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw DataError(source + ": missing header row");

    const auto header = split_fields(lines[0]);
    if (header.size() < 2) throw DataError(source + ": need at least one attribute and a label column");
    const std::size_t label_col = resolve_label(header, label, source);

    std::vector<std::string> attr_names;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i != label_col) attr_names.push_back(header[i]);

    std::vector<double> values;
    std::vector<ClassId> labels;
    std::vector<std::string> class_names;
    std::unordered_map<std::string, ClassId> class_index;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        const auto fields = split_fields(lines[li]);
        if (fields.size() != header.size())
            throw DataError(source + ": row " + std::to_string(li + 1) + " has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(header.size()));
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i == label_col) continue;
            const auto v = parse_real(fields[i]);
            if (!v || !std::isfinite(*v))
                throw DataError(source + ": row " + std::to_string(li + 1) + ", column '" + header[i] +
                                "': not a finite number: '" + fields[i] + "'");
            values.push_back(*v);
        }
        const auto& name = fields[label_col];
        auto [it, inserted] = class_index.try_emplace(name, static_cast<ClassId>(class_names.size()));
        if (inserted) class_names.push_back(name);
        labels.push_back(it->second);
    }
    if (labels.empty()) throw DataError(source + ": no data rows");
    return {std::move(attr_names), std::move(values), std::move(labels), std::move(class_names),
            header[label_col], label_col};
}

LabeledDataset load_csv(const std::filesystem::path& path, const LabelColumn& label) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), label, path.string());
}

std::string format_csv(const LabeledDataset& data) {
    std::string out;
    const std::size_t total = data.cols() + 1;
    const std::size_t label_pos = std::min(data.label_position(), data.cols());
    auto emit_row = [&](auto&& field_at) {
        for (std::size_t i = 0, a = 0; i < total; ++i) {
            if (i) out += ',';
            out += i == label_pos ? field_at(true, 0) : field_at(false, a++);
        }
        out += '\n';
    };
    emit_row([&](bool is_label, std::size_t a) {
        return csv_field(is_label ? data.label_name() : data.attribute_names()[a]);
    });
    for (std::size_t r = 0; r < data.rows(); ++r)
        emit_row([&](bool is_label, std::size_t a) {
            return is_label ? csv_field(data.class_names()[data.label(r)]) : format_real(data.at(r, a));
        });
    return out;
}

void write_csv(const LabeledDataset& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << format_csv(data);
}

Split stratified_split(const LabeledDataset& data, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw DataError("train fraction must lie in (0, 1)");
    RngStream rng(spec.seed, RngStream::stream_id({0x5911'7ULL}));

    // Groups of row indices, each shuffled and cut independently.
    std::vector<std::vector<std::size_t>> groups;
    if (spec.stratified) {
        groups.resize(data.num_classes());
        for (std::size_t r = 0; r < data.rows(); ++r) groups[data.label(r)].push_back(r);
        for (std::size_t c = 0; c < groups.size(); ++c)
            if (groups[c].size() == 1)
                throw DataError("class '" + data.class_names()[c] + "' has fewer than 2 records; cannot stratify");
    } else {
        groups.emplace_back(data.rows());
        std::iota(groups[0].begin(), groups[0].end(), std::size_t{0});
    }

    std::vector<std::size_t> train_rows, test_rows;
    for (auto& g : groups) {
        for (std::size_t i = g.size(); i > 1; --i) std::swap(g[i - 1], g[rng.below(i)]);
        const auto take = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(g.size()) + 0.5 + 1e-9));
        train_rows.insert(train_rows.end(), g.begin(), g.begin() + static_cast<std::ptrdiff_t>(take));
        test_rows.insert(test_rows.end(), g.begin() + static_cast<std::ptrdiff_t>(take), g.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {data.subset(train_rows), data.subset(test_rows)};
}

LabeledDataset remove_records(const LabeledDataset& data, std::span<const std::size_t> indices) {
    std::vector<char> drop(data.rows(), 0);
    for (std::size_t i : indices) {
        if (i >= data.rows())
            throw DataError("record index " + std::to_string(i) + " out of range for " + std::to_string(data.rows()) +
                            " rows");
        drop[i] = 1;
    }
    std::vector<std::size_t> keep;
    keep.reserve(data.rows());
    for (std::size_t r = 0; r < data.rows(); ++r)
        if (!drop[r]) keep.push_back(r);
    return data.subset(keep);
}

}  // namespace bstac
