// bstacgp: train, evaluate, inspect and split for boosted ensemble stacks.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bstac/dataset.hpp"
#include "bstac/error.hpp"
#include "bstac/evaluator.hpp"
#include "bstac/experiment.hpp"
#include "bstac/model_io.hpp"
#include "bstac/text.hpp"

namespace {

using namespace bstac;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << text;
}

// Reports go to stdout and, with --out, to <out> plus a <out>.json twin.
void emit(const std::string& out_path, const std::string& text, const std::string& json) {
    std::cout << text;
    if (out_path.empty()) return;
    write_text(out_path, text);
    write_text(out_path + ".json", json + "\n");
}

// Splices "key=value" lines from --config in front of the command-line
// flags so that flags given explicitly win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file " + config_path);
    std::vector<std::string> injected;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) throw ConfigError(config_path + ":" + std::to_string(no) + ": expected key=value");
        injected.push_back("--" + std::string(trim(t.substr(0, eq))) + "=" + std::string(trim(t.substr(eq + 1))));
    }
    // Insert right after the subcommand name (first positional argument).
    auto at = std::find_if(args.begin() + 1, args.end(), [](const std::string& a) { return a.rfind("-", 0) != 0; });
    if (at != args.end()) ++at;
    args.insert(at, injected.begin(), injected.end());
    return args;
}

struct TrainOverrides {
    std::size_t max_boost_epoch = 0, max_gp_epoch = 0, pop_size = 0, gap = 0;
    std::uint32_t num_bin = 0;
    bool float_resolution = false;
    double beta = -1, alpha = -1;
    std::string best_fit;
    std::string on_stall;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boosted ensemble stack genetic programming classifier"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_help_all_flag("--help-all");

    std::string data_path, label_col, preset = "small-fast", model_path, out_path;
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    std::optional<std::size_t> stack_depth;
    double train_frac = 0.7;
    bool parallel = false;
    int workers = 1;
    TrainOverrides ov;

    auto add_data = [&](CLI::App* cmd, bool required) {
        auto* o = cmd->add_option("--data", data_path, "CSV file with a header row");
        if (required) o->required();
        cmd->add_option("--label-col", label_col, "Label column name or zero-based index (default: last column)");
    };

    auto* train_cmd = app.add_subcommand("train", "Train one or more seeded trials");
    add_data(train_cmd, true);
    train_cmd->add_option("--preset", preset, "small-fast | small-slow | large-fast | large-slow")
        ->check(CLI::IsMember(TrainerConfig::preset_names()));
    train_cmd->add_option("--seed", seed, "Base seed; trial i uses seed+i");
    train_cmd->add_option("--trials", trials, "Independent trials")->check(CLI::PositiveNumber);
    train_cmd->add_option("--model", model_path, "Model output path (per-trial suffix when trials > 1)");
    train_cmd->add_option("--out", out_path, "Aggregate report path (JSON twin at <out>.json)");
    train_cmd->add_option("--train-frac", train_frac, "Stratified training fraction; 1 trains on all data")
        ->check(CLI::Range(0.0, 1.0));
    train_cmd->add_flag("--parallel", parallel, "Run trials concurrently");
    train_cmd->add_option("--workers", workers, "Threads for fitness evaluation (<=0: OpenMP default)");
    train_cmd->add_option("--max-boost-epoch", ov.max_boost_epoch, "Override: boosting epochs");
    train_cmd->add_option("--max-gp-epoch", ov.max_gp_epoch, "Override: generations per epoch");
    train_cmd->add_option("--pop-size", ov.pop_size, "Override: population size");
    train_cmd->add_option("--gap", ov.gap, "Override: parent pool size");
    train_cmd->add_option("--num-bin", ov.num_bin, "Override: fixed bin count (selects fixed mode)");
    train_cmd->add_flag("--float-resolution", ov.float_resolution, "Override: one bin per float value");
    train_cmd->add_option("--beta", ov.beta, "Override: bin purity threshold");
    train_cmd->add_option("--alpha", ov.alpha, "Override: used-bin regularization weight");
    train_cmd->add_option("--best-fit", ov.best_fit, "Champion fitness bar: persist | reset | fixed")
        ->check(CLI::IsMember({"persist", "reset", "fixed"}));
    train_cmd->add_option("--on-stall", ov.on_stall, "Epoch without a champion: retry | stop")
        ->check(CLI::IsMember({"retry", "stop"}));

    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a model on a dataset");
    add_data(eval_cmd, true);
    eval_cmd->add_option("--model", model_path, "Model file")->required();
    eval_cmd->add_option("--stack-depth", stack_depth, "Use only the first k stack levels");
    eval_cmd->add_option("--out", out_path, "Report path (JSON twin at <out>.json)");
    eval_cmd->add_option("--workers", workers, "Threads (<=0: OpenMP default)");

    auto* inspect_cmd = app.add_subcommand("inspect", "Print a model summary");
    inspect_cmd->add_option("--model", model_path, "Model file")->required();

    auto* split_cmd = app.add_subcommand("split", "Write a stratified train/test split");
    add_data(split_cmd, true);
    split_cmd->add_option("--train-frac", train_frac, "Training fraction")->check(CLI::Range(0.0, 1.0));
    split_cmd->add_option("--seed", seed, "Shuffle seed");
    split_cmd->add_option("--out", out_path, "Output prefix: <out>_train.csv, <out>_test.csv")->required();

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = expand_config(std::move(args));
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (train_cmd->parsed()) {
            const auto data = load_csv(data_path, {label_col});
            TrialPlan plan;
            plan.trainer = TrainerConfig::preset(preset);
            auto& tc = plan.trainer;
            tc.seed = seed;
            tc.workers = workers;
            if (ov.max_boost_epoch) tc.max_boost_epoch = ov.max_boost_epoch;
            if (ov.max_gp_epoch) tc.max_gp_epoch = ov.max_gp_epoch;
            if (ov.pop_size) tc.new_pop_size = ov.pop_size;
            if (ov.gap) tc.gap = ov.gap;
            if (ov.num_bin) {
                tc.mode = BinMode::Fixed;
                tc.num_bin = ov.num_bin;
            }
            if (ov.float_resolution) tc.mode = BinMode::FloatResolution;
            if (ov.beta >= 0) tc.beta = ov.beta;
            if (ov.alpha >= 0) tc.alpha = ov.alpha;
            if (!ov.best_fit.empty()) tc.best_fit = parse_best_fit_policy(ov.best_fit);
            if (!ov.on_stall.empty()) tc.on_stall = parse_stall_policy(ov.on_stall);
            tc.validate();
            plan.trials = trials;
            plan.train_fraction = train_frac;
            plan.parallel = parallel;

            const auto results = run_trials(data, plan);
            if (!model_path.empty())
                for (const auto& r : results) save_model(r.model, trial_model_path(model_path, r.index, results.size()));
            emit(out_path, aggregate_text(results), aggregate_json(results));
        } else if (eval_cmd->parsed()) {
            const auto model = load_model(model_path);
            const auto data = load_csv(data_path, {label_col});
            const auto report = evaluate(model, data, stack_depth, workers);
            std::string text = report.to_text();
            const auto usage = stack_usage_report(report);
            text += "level_shares=";
            for (std::size_t i = 0; i < usage.level_shares.size(); ++i)
                text += (i ? "," : "") + format_real(usage.level_shares[i]);
            text += "\nfallback_share=" + format_real(usage.fallback_share) + "\n";
            emit(out_path, text, report.to_json());
        } else if (inspect_cmd->parsed()) {
            const auto model = load_model(model_path);
            std::ostringstream out;
            out << "classes=" << model.class_names.size() << " attributes=" << model.num_attributes()
                << " fallback=" << model.class_names.at(model.fallback_class)
                << " stalled=" << (model.log.stalled ? "yes" : "no") << '\n';
            for (std::size_t i = 0; i < model.entries.size(); ++i) {
                const auto& e = model.entries[i];
                out << "level " << i + 1 << ": nodes=" << e.tree.node_count() << " depth=" << e.tree.depth()
                    << " pure_bins=" << e.pure_bins.size() << " fitness=" << format_real(e.fitness)
                    << " claimed=" << e.records_claimed << '\n'
                    << "  " << e.tree.to_string() << '\n';
            }
            out << "total: trees=" << model.entries.size() << " nodes=" << model.total_nodes()
                << " avg_depth=" << format_real(model.mean_depth()) << '\n';
            std::cout << out.str();
        } else if (split_cmd->parsed()) {
            const auto data = load_csv(data_path, {label_col});
            const auto split = stratified_split(data, {train_frac, true, seed});
            write_csv(split.train, out_path + "_train.csv");
            write_csv(split.test, out_path + "_test.csv");
            std::cout << "train=" << split.train.rows() << " test=" << split.test.rows() << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
