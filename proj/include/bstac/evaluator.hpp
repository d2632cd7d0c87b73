#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bstac/dataset.hpp"
#include "bstac/trainer.hpp"

namespace bstac {

struct PredictionTrace {
    ClassId label = 0;
    // 1-based answering level; 0 means every level declined (fallback).
    std::size_t level = 0;
    std::optional<bool> correct;

    bool fallback() const { return level == 0; }
};

// Walks the first `stack_depth` levels oldest first. A level answers when
// the record's bin is pure. In float-resolution mode a record landing in an
// empty bin takes the label of the nearest pure bin; an ambiguous bin passes
// the record on.
PredictionTrace predict_record(const EnsembleStack& stack, std::span<const double> record, std::size_t stack_depth);

struct EvalReport {
    std::size_t records = 0;
    std::size_t correct = 0;  // pure-bin answers matching the label
    std::size_t error = 0;    // pure-bin answers not matching
    std::size_t fallback = 0;
    std::size_t fallback_correct = 0;
    std::vector<std::size_t> per_level_counts;
    std::vector<std::size_t> per_level_nodes;
    double seconds = 0.0;

    // correct / records: declined records count against.
    double accuracy_strict() const;
    // (correct + fallback_correct) / records.
    double accuracy_with_fallback() const;

    std::string to_text() const;
    std::string to_json() const;
};

// No depth means the full stack; an explicit depth must lie in
// [1, stack size]. Labels are matched to the stack's class table by name.
// `workers` <= 0 uses the OpenMP default.
EvalReport evaluate(const EnsembleStack& stack, const LabeledDataset& data,
                    std::optional<std::size_t> stack_depth = std::nullopt, int workers = 1);
EvalReport evaluate_serial(const EnsembleStack& stack, const LabeledDataset& data,
                           std::optional<std::size_t> stack_depth = std::nullopt);

struct StackUsage {
    std::vector<double> level_shares;  // per level, stack order
    double fallback_share = 0.0;
};

StackUsage stack_usage_report(const EvalReport& report);

}  // namespace bstac
