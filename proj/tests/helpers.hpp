#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bstac/dataset.hpp"
#include "bstac/rng.hpp"

namespace testutil {

// Random dataset with `classes` labels named "c0", "c1", ...; values drawn
// on a coarse grid so ties and duplicate outputs occur.
inline bstac::LabeledDataset random_dataset(bstac::RngStream& rng, std::size_t n, std::size_t d,
                                            std::size_t classes = 2) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < d; ++j) names.push_back("x" + std::to_string(j));
    std::vector<double> values;
    std::vector<bstac::ClassId> labels;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) values.push_back(static_cast<double>(rng.below(21)) / 4.0 - 2.5);
        labels.push_back(static_cast<bstac::ClassId>(i < classes ? i : rng.below(classes)));
    }
    std::vector<std::string> class_names;
    for (std::size_t c = 0; c < classes; ++c) class_names.push_back("c" + std::to_string(c));
    return {names, values, labels, class_names};
}

inline bstac::LabeledDataset make_dataset(std::vector<std::vector<double>> rows, std::vector<bstac::ClassId> labels,
                                          std::vector<std::string> classes = {"A", "B"}) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < rows.front().size(); ++j) names.push_back("x" + std::to_string(j));
    std::vector<double> values;
    for (auto& r : rows) values.insert(values.end(), r.begin(), r.end());
    return {names, values, labels, classes};
}

}  // namespace testutil
