#pragma once

// Hot loops of training and evaluation. Each parallel kernel has a serial
// reference twin that the tests hold it to, bit for bit.

#include <cstddef>
#include <span>
#include <vector>

#include "bstac/binning.hpp"
#include "bstac/dataset.hpp"
#include "bstac/program.hpp"

namespace bstac {

// Outputs of `tree` for every row of `data`, evaluated column-block-wise.
// Identical to calling eval() per record.
void eval_batch(const ProgramTree& tree, const LabeledDataset& data, std::span<double> out);
void eval_batch_serial(const ProgramTree& tree, const LabeledDataset& data, std::span<double> out);

struct ProgramScore {
    double fitness = 0.0;
    std::size_t used_bins = 0;
    std::size_t pure_bins = 0;

    friend bool operator==(const ProgramScore&, const ProgramScore&) = default;
};

struct ScoringParams {
    IntervalGeometry geometry = IntervalGeometry::fixed(2);
    FitnessConfig fitness;
};

ProgramScore score_program(const ProgramTree& tree, const LabeledDataset& data, const ScoringParams& params);

// One task per program. `workers` <= 0 uses the OpenMP default.
std::vector<ProgramScore> score_population(std::span<const ProgramTree> pop, const LabeledDataset& data,
                                           const ScoringParams& params, int workers = 0);
std::vector<ProgramScore> score_population_serial(std::span<const ProgramTree> pop, const LabeledDataset& data,
                                                  const ScoringParams& params);

// Number of threads an OpenMP region would use for `workers`.
int resolve_workers(int workers);

}  // namespace bstac
