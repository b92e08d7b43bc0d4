#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eval.hpp"
#include "framing.hpp"
#include "ingest.hpp"
#include "methods.hpp"
#include "synth.hpp"

namespace ppmf::experiment {

/// Every knob of a run. Text form is one `key=value` per line; precedence
/// when assembling one is flags > config file > defaults.
struct RunConfig {
    std::string events;
    std::string outcomes;
    std::string out_dir = ".";
    std::string stats;           // reuse scaling stats instead of fitting (frame)
    std::string manual_weights;  // weights file for manual weighting
    int window_hours = 2;
    int horizon_hours = 48;
    eval::Representation representation = eval::Representation::TimeSeries;
    eval::Weighting weighting = eval::Weighting::GradientDescent;
    eval::FeatureSet features = eval::FeatureSet::All;
    std::size_t k = 10;
    double learning_rate = 0.3;
    std::size_t max_epochs = 200;
    double min_relative_improvement = 1e-6;
    std::size_t patience = 3;
    double threshold = 0.5;
    knn::PredictionMode mode = knn::PredictionMode::Majority;
    std::size_t folds = 20;
    std::uint64_t seed = 0;
    std::size_t workers = 1;  // runtime only; never changes results, not serialized
    synth::SynthSpec synth;

    /// Throws BadConfig for unknown keys or unparsable values.
    void set(const std::string& key, const std::string& value);
    void load(std::istream& in);
    void save(std::ostream& out) const;
    void validate() const;

    framing::FrameLayout layout() const { return {window_hours, horizon_hours}; }
    weights::TrainConfig train_config() const;
    eval::MethodSpec method(const std::string& name) const;

    static std::vector<std::string> keys();
};

/// Cohort named by `events`/`outcomes`, or the synthetic cohort described by
/// `synth` (seeded with `seed`) when no files are given.
ingest::RawCohort obtain_cohort(const RunConfig& config);

/// Methods compared by a preset:
///  exp1  similarity classifier vs non-similarity references
///  exp2  time-series vs aggregate representation, plus static-only and
///        dynamic-only ablations
///  exp3  gradient-descent weights vs filters (and manual, when a weights
///        file is configured) vs no weights
std::vector<eval::MethodSpec> preset_methods(const std::string& preset, const RunConfig& config);

/// Stratified dev/validation split, then k-fold cross-validation of every
/// method on the validation half with shared folds, then the comparison.
eval::ComparisonReport run_methods(const ingest::RawCohort& cohort, const std::vector<eval::MethodSpec>& methods,
                                   const RunConfig& config);

eval::ComparisonReport run_experiment(const std::string& preset, const RunConfig& config);

/// Cross-validated fold metrics of the single method described by `config`.
eval::MethodResult evaluate(const ingest::RawCohort& cohort, const RunConfig& config);

}  // namespace ppmf::experiment
