#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "knn.hpp"

namespace ppmf::weights {

using knn::FeatureWeights;
using ActiveSet = std::array<bool, kNumVariables>;

inline ActiveSet all_active() {
    ActiveSet a;
    a.fill(true);
    return a;
}

struct TrainConfig {
    double learning_rate = 0.3;
    std::size_t max_epochs = 200;
    double min_relative_improvement = 1e-6;
    std::size_t patience = 3;
    std::size_t k = 10;
    FeatureWeights initial_weights = FeatureWeights::uniform(1.0);
    /// Variables outside the set keep weight 0 and receive no updates.
    ActiveSet active = all_active();
    std::size_t workers = 1;

    void validate() const;
};

enum class StopReason { Converged, MaxEpochs };

struct TrainTrace {
    std::vector<double> errors;             // errors[e] = E after e updates; errors[0] is the start point
    std::vector<double> best_errors;        // best-so-far, non-increasing
    std::vector<std::string> weight_hashes; // snapshot of the weights each error was measured at
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;
    StopReason stop_reason = StopReason::MaxEpochs;
};

/// FNV-1a over the raw bytes of the weight vector, as 16 hex digits.
std::string weight_hash(const FeatureWeights& weights);

/// E = sum_i [(y_i - p_i)^2 + ((1-y_i) - (1-p_i))^2] = 2 sum_i (y_i - p_i)^2,
/// where p_i is the leave-one-out soft score of training patient i.
double training_error(const Dataset& train, const FeatureWeights& weights, std::size_t k, std::size_t workers = 1);

/// dE/dw_v with every patient's leave-one-out neighbor set held at the
/// current weights.
FeatureWeights gradient(const Dataset& train, const FeatureWeights& weights, std::size_t k, std::size_t workers = 1);

struct ErrorAndGradient {
    double error = 0.0;
    FeatureWeights gradient;
};

/// One pass that returns both; used by the training loop.
ErrorAndGradient evaluate(const knn::PairwiseDistances& pairs, const FeatureWeights& weights, std::size_t k,
                          std::size_t workers = 1);

struct TrainResult {
    FeatureWeights weights;  // best-error weights seen
    TrainTrace trace;
};

/// Projected gradient descent: w <- max(0, w - lr * grad). Neighbor sets are
/// recomputed at every epoch. Stops once the relative improvement over the
/// best error stays below `min_relative_improvement` for `patience`
/// consecutive epochs, or after `max_epochs` updates.
TrainResult train_gd(const Dataset& train, const TrainConfig& config);

// ---------------------------------------------------------------------------
// Filters

enum class FilterMethod { ChiSquare, InformationGain, Gini };

/// rows = bins, columns = (negative count, positive count)
using Contingency = std::vector<std::array<double, 2>>;

double chi_square(const Contingency& table);
double information_gain(const Contingency& table);  // bits
double gini_reduction(const Contingency& table);

/// Equal-frequency discretization: bin b holds values at or above the
/// b-th decile of the training values. Equal values always share a bin.
std::vector<std::size_t> equal_frequency_bins(const std::vector<double>& values, std::size_t bins = 10);

Contingency contingency(const std::vector<std::size_t>& bins, const std::vector<int>& labels, std::size_t n_bins);

/// Raw per-variable filter scores. Dynamic variables are summarized by their
/// mean cell value; statics are used directly.
std::array<double, kNumVariables> filter_scores(const Dataset& train, FilterMethod method);

/// Scores rescaled to sum to the number of active variables (40 by default),
/// so they sit on the same scale as uniform weights. All-zero scores give
/// uniform weights.
FeatureWeights filter_weights(const Dataset& train, FilterMethod method, const ActiveSet& active = all_active());

// ---------------------------------------------------------------------------
// Weight files: `variable,weight` rows in canonical order

struct LoadedWeights {
    FeatureWeights weights;
    std::vector<std::string> warnings;
};

/// Unlisted variables default to 0 and produce a warning each.
LoadedWeights load_weights(std::istream& in);
void write_weights(const FeatureWeights& weights, std::ostream& out);
void write_trace(const TrainTrace& trace, std::ostream& out);

const char* to_string(FilterMethod m);
const char* to_string(StopReason r);

}  // namespace ppmf::weights
