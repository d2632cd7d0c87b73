#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bstac/dataset.hpp"
#include "bstac/trainer.hpp"

namespace bstac {

struct TrialResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    double train_accuracy = 0.0;
    std::optional<double> test_accuracy;
    double train_accuracy_strict = 0.0;
    std::optional<double> test_accuracy_strict;
    std::size_t trees = 0;
    std::size_t nodes = 0;
    double mean_depth = 0.0;
    bool stalled = false;
    double seconds = 0.0;
    EnsembleStack model;
};

struct TrialPlan {
    TrainerConfig trainer;
    std::size_t trials = 1;
    // 1.0 trains on everything and skips the test partition.
    double train_fraction = 0.7;
    // Trials run concurrently; each trial then scores serially.
    bool parallel = false;
};

// Trial i uses seed base+i for both the stratified split and training.
TrialResult run_trial(const LabeledDataset& data, const TrialPlan& plan, std::size_t index);
std::vector<TrialResult> run_trials(const LabeledDataset& data, const TrialPlan& plan);

struct Summary {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation (0 for one value)
};
Summary summarize(const std::vector<double>& values);

// Mean +/- std table over trials, plus per-trial rows in the JSON twin.
std::string aggregate_text(const std::vector<TrialResult>& trials);
std::string aggregate_json(const std::vector<TrialResult>& trials);

// Model path for trial `index` of `count`: the path itself for a single
// trial, otherwise "<stem>.trial<NN><ext>".
std::string trial_model_path(const std::string& base, std::size_t index, std::size_t count);

}  // namespace bstac
