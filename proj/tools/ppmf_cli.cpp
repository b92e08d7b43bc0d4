// ppmf command line: thin dispatch over the C interface.
//
// Settings resolve as flags > --config file > built-in defaults. Exit code 0
// on success, 1 for validation errors, 2 for I/O errors.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ppmf/ppmf.h"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct Failure {
    ppmf_status status;
};

void check(ppmf_status s) {
    if (s != PPMF_OK) throw Failure{s};
}

// A flag that maps onto one config key and is applied only when given.
struct Setting {
    std::string key;
    std::string value;
    CLI::Option* option = nullptr;
};

class Settings {
public:
    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        auto& s = items_.emplace_back(std::make_unique<Setting>());
        s->key = key;
        s->option = app->add_option(flag, s->value, help);
    }
    void apply(ppmf_config* config) const {
        for (const auto& s : items_)
            if (s->option->count() > 0) check(ppmf_config_set(config, s->key.c_str(), s->value.c_str()));
    }

private:
    std::vector<std::unique_ptr<Setting>> items_;
};

void add_cohort_flags(CLI::App* app, Settings& s) {
    s.add(app, "--events", "events", "Events CSV (patient_id,minute,variable,value); synthetic cohort if omitted");
    s.add(app, "--outcomes", "outcomes", "Outcomes CSV (patient_id,in_hospital_death)");
}

void add_synth_flags(CLI::App* app, Settings& s) {
    s.add(app, "--patients", "synth.n_patients", "Synthetic cohort size");
    s.add(app, "--prevalence", "synth.prevalence", "Fraction of positive patients");
    s.add(app, "--informative", "synth.informative", "Number of planted informative dynamic variables");
    s.add(app, "--missing-rate", "synth.missing_rate", "Probability a 2h cell gets no observation");
    s.add(app, "--effect-size", "synth.effect_size", "Signal amplitude in between-patient spreads");
    s.add(app, "--static-effect", "synth.static_effect", "Age shift of positives in spreads (0 = statics are noise)");
    s.add(app, "--signal", "synth.signal", "drift or mirror");
}

void add_layout_flags(CLI::App* app, Settings& s) {
    s.add(app, "--window-hours", "window_hours", "Bucket width in hours");
    s.add(app, "--horizon-hours", "horizon_hours", "Hours after admission that are framed");
}

void add_training_flags(CLI::App* app, Settings& s) {
    s.add(app, "--weighting", "weighting", "gd, none, manual, chi2, infogain or gini");
    s.add(app, "--features", "features", "all, static or dynamic");
    s.add(app, "--manual-weights", "manual_weights", "Weights file used by manual weighting");
    s.add(app, "--k", "k", "Neighbors per prediction");
    s.add(app, "--lr", "learning_rate", "Gradient-descent learning rate");
    s.add(app, "--max-epochs", "max_epochs", "Gradient-descent epoch cap");
    s.add(app, "--min-improvement", "min_relative_improvement", "Relative error improvement counted as progress");
    s.add(app, "--patience", "patience", "Epochs without progress before stopping");
}

void add_prediction_flags(CLI::App* app, Settings& s) {
    s.add(app, "--mode", "mode", "majority or weighted");
    s.add(app, "--threshold", "threshold", "Score threshold in weighted mode");
}

void add_evaluation_flags(CLI::App* app, Settings& s) {
    s.add(app, "--representation", "representation", "timeseries or aggregation");
    s.add(app, "--folds", "folds", "Cross-validation folds");
}

void print_file(const std::string& path) {
    std::ifstream in(path);
    std::cout << in.rdbuf();
}

std::string join(const std::string& dir, const std::string& name) { return dir + "/" + name; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Patient similarity classification on framed ICU time series"};
    app.require_subcommand(1);

    std::string config_path;
    std::string seed;
    std::size_t workers = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Seed for the synthetic cohort, split and folds");
    app.add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
    app.add_option("--workers", workers, "Parallelism cap (default: available cores); never changes results");
    // Global flags are accepted after the subcommand name too.
    app.fallthrough();

    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic cohort with planted informative variables");
    std::string synth_events, synth_outcomes, synth_manifest;
    synth_cmd->add_option("--events", synth_events, "Events CSV to write")->required();
    synth_cmd->add_option("--outcomes", synth_outcomes, "Outcomes CSV to write")->required();
    synth_cmd->add_option("--manifest", synth_manifest, "JSON ground-truth manifest to write");
    Settings synth_settings;
    add_synth_flags(synth_cmd, synth_settings);

    auto* frame_cmd = app.add_subcommand("frame", "Bucket, impute and scale a cohort into a framed file");
    std::string frame_values, frame_mask, frame_stats_out;
    Settings frame_settings;
    add_cohort_flags(frame_cmd, frame_settings);
    frame_cmd->get_option("--events")->required();
    frame_cmd->get_option("--outcomes")->required();
    frame_cmd->add_option("--out", frame_values, "Framed values CSV to write")->required();
    frame_cmd->add_option("--mask", frame_mask, "Observation mask CSV to write")->required();
    frame_settings.add(frame_cmd, "--stats", "stats", "Reuse these scaling statistics instead of fitting");
    frame_cmd->add_option("--stats-out", frame_stats_out, "Write the scaling statistics used");
    add_layout_flags(frame_cmd, frame_settings);

    auto* train_cmd = app.add_subcommand("train", "Learn feature weights on a framed cohort");
    std::string train_framed, train_weights, train_trace;
    train_cmd->add_option("--framed", train_framed, "Framed values CSV")->required();
    train_cmd->add_option("--weights-out", train_weights, "Weights CSV to write")->required();
    train_cmd->add_option("--trace-out", train_trace, "epoch,error trace to write (gd only)");
    Settings train_settings;
    add_training_flags(train_cmd, train_settings);

    auto* predict_cmd = app.add_subcommand("predict", "Score patients against a framed training cohort");
    std::string predict_train, predict_query, predict_weights, predict_out;
    predict_cmd->add_option("--train", predict_train, "Framed training cohort")->required();
    predict_cmd->add_option("--query", predict_query, "Framed cohort to score (default: training, leave-one-out)");
    predict_cmd->add_option("--weights", predict_weights, "Weights CSV (default: all 1)");
    predict_cmd->add_option("--out", predict_out, "patient_id,score,label CSV to write")->required();
    Settings predict_settings;
    predict_settings.add(predict_cmd, "--k", "k", "Neighbors per prediction");
    add_prediction_flags(predict_cmd, predict_settings);

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Cross-validate one method on the validation half");
    std::string evaluate_dir = ".";
    evaluate_cmd->add_option("--out-dir", evaluate_dir, "Directory for fold_metrics.csv, report.json, report.txt");
    Settings evaluate_settings;
    add_cohort_flags(evaluate_cmd, evaluate_settings);
    add_layout_flags(evaluate_cmd, evaluate_settings);
    add_training_flags(evaluate_cmd, evaluate_settings);
    add_prediction_flags(evaluate_cmd, evaluate_settings);
    add_evaluation_flags(evaluate_cmd, evaluate_settings);
    add_synth_flags(evaluate_cmd, evaluate_settings);

    auto* compare_cmd = app.add_subcommand("compare", "Friedman and Wilcoxon tests over fold-metrics files");
    std::vector<std::string> compare_inputs;
    std::string compare_dir = ".";
    double alpha = 0.05;
    compare_cmd->add_option("inputs", compare_inputs, "fold_metrics.csv files")->required();
    compare_cmd->add_option("--alpha", alpha, "Significance level");
    compare_cmd->add_option("--out-dir", compare_dir, "Directory for fold_metrics.csv, report.json, report.txt");

    auto* experiment_cmd = app.add_subcommand("experiment", "Run a preset comparison (exp1, exp2, exp3)");
    std::string preset;
    std::string experiment_dir = ".";
    experiment_cmd->add_option("preset", preset, "exp1, exp2 or exp3")->required();
    experiment_cmd->add_option("--out-dir", experiment_dir, "Directory for fold_metrics.csv, report.json, report.txt");
    Settings experiment_settings;
    add_cohort_flags(experiment_cmd, experiment_settings);
    add_layout_flags(experiment_cmd, experiment_settings);
    add_training_flags(experiment_cmd, experiment_settings);
    add_prediction_flags(experiment_cmd, experiment_settings);
    add_evaluation_flags(experiment_cmd, experiment_settings);
    add_synth_flags(experiment_cmd, experiment_settings);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    ppmf_config* raw_config = nullptr;
    ppmf_cohort* cohort = nullptr;
    ppmf_weights* weights = nullptr;
    int exit_code = 0;
    try {
        check(ppmf_config_new(&raw_config));
        ppmf_config* config = raw_config;
        if (!config_path.empty()) check(ppmf_config_load(config, config_path.c_str()));
        if (seed_opt->count() > 0) check(ppmf_config_set(config, "seed", seed.c_str()));
        check(ppmf_config_set_workers(config, workers));

        if (synth_cmd->parsed()) {
            synth_settings.apply(config);
            check(ppmf_synth(config, synth_events.c_str(), synth_outcomes.c_str(),
                             synth_manifest.empty() ? nullptr : synth_manifest.c_str()));
            std::cout << "wrote " << synth_events << " and " << synth_outcomes << '\n';
        } else if (frame_cmd->parsed()) {
            frame_settings.apply(config);
            const auto events = frame_cmd->get_option("--events")->as<std::string>();
            const auto outcomes = frame_cmd->get_option("--outcomes")->as<std::string>();
            auto* stats_opt = frame_cmd->get_option("--stats");
            const auto stats = stats_opt->count() > 0 ? stats_opt->as<std::string>() : std::string();
            check(ppmf_cohort_load(events.c_str(), outcomes.c_str(), &cohort));
            double sparsity = 0.0;
            check(ppmf_frame(config, cohort, frame_values.c_str(), frame_mask.c_str(),
                             stats.empty() ? nullptr : stats.c_str(),
                             frame_stats_out.empty() ? nullptr : frame_stats_out.c_str(), &sparsity));
            std::cout << "patients " << ppmf_cohort_size(cohort) << ", positives " << ppmf_cohort_positives(cohort)
                      << ", dropped placeholder rows " << ppmf_cohort_dropped_rows(cohort) << ", sparsity "
                      << sparsity << '\n';
        } else if (train_cmd->parsed()) {
            train_settings.apply(config);
            check(ppmf_train(config, train_framed.c_str(), train_weights.c_str(),
                             train_trace.empty() ? nullptr : train_trace.c_str()));
            std::cout << "wrote " << train_weights << '\n';
        } else if (predict_cmd->parsed()) {
            predict_settings.apply(config);
            if (predict_weights.empty())
                check(ppmf_weights_uniform(1.0, &weights));
            else
                check(ppmf_weights_load(predict_weights.c_str(), &weights));
            check(ppmf_predict(config, predict_train.c_str(), predict_query.empty() ? nullptr : predict_query.c_str(),
                               weights, predict_out.c_str()));
            std::cout << "wrote " << predict_out << '\n';
        } else if (evaluate_cmd->parsed()) {
            evaluate_settings.apply(config);
            check(ppmf_evaluate(config, evaluate_dir.c_str()));
            print_file(join(evaluate_dir, "report.txt"));
        } else if (compare_cmd->parsed()) {
            std::vector<const char*> paths;
            for (const auto& p : compare_inputs) paths.push_back(p.c_str());
            check(ppmf_compare(paths.data(), paths.size(), alpha, compare_dir.c_str()));
            print_file(join(compare_dir, "report.txt"));
        } else if (experiment_cmd->parsed()) {
            experiment_settings.apply(config);
            check(ppmf_experiment(config, preset.c_str(), experiment_dir.c_str()));
            print_file(join(experiment_dir, "report.txt"));
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << ppmf_last_error() << '\n';
        exit_code = f.status == PPMF_IO_ERROR ? kExitIo : kExitValidation;
    }
    ppmf_weights_free(weights);
    ppmf_cohort_free(cohort);
    ppmf_config_free(raw_config);
    return exit_code;
}
