#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eval.hpp"
#include "framing.hpp"
#include "ingest.hpp"
#include "knn.hpp"
#include "weights.hpp"

namespace ppmf::eval {

enum class Representation { TimeSeries, Aggregation };
enum class Weighting { GradientDescent, None, Manual, ChiSquare, InformationGain, Gini };
enum class FeatureSet { All, StaticOnly, DynamicOnly };
/// Knn is the similarity classifier; the other two are non-similarity
/// reference points.
enum class Classifier { Knn, MajorityClass, Logistic };

struct MethodSpec {
    std::string name;
    Representation representation = Representation::TimeSeries;
    Weighting weighting = Weighting::GradientDescent;
    FeatureSet features = FeatureSet::All;
    Classifier classifier = Classifier::Knn;
    std::size_t k = 10;
    knn::PredictionMode mode = knn::PredictionMode::Majority;
    double threshold = 0.5;
    double learning_rate = 0.3;
    std::size_t max_epochs = 200;
    double min_relative_improvement = 1e-6;
    std::size_t patience = 3;
    std::optional<knn::FeatureWeights> manual_weights;
};

weights::ActiveSet active_variables(FeatureSet features);

/// Pre-imputation views of the same patients, in one shared row order.
struct EvaluationData {
    std::vector<framing::FramedPatient> frames;
    std::vector<framing::AggregatedPatient> aggregates;

    std::size_t size() const { return frames.size(); }
    std::vector<int> labels() const;
    EvaluationData subset(const std::vector<std::size_t>& rows) const;
};

EvaluationData prepare(const ingest::RawCohort& cohort, const framing::FrameLayout& layout = {},
                       std::size_t workers = 1);

/// Training-only scaling, weighting and classification for one fold;
/// returns predicted labels for `test` rows in order.
std::vector<int> fit_and_predict(const EvaluationData& data, const std::vector<std::size_t>& train,
                                 const std::vector<std::size_t>& test, const MethodSpec& method);

/// For each fold, fits scaling and weights on the remaining folds and scores
/// the held-out fold. Folds run in parallel; output is ordered by fold.
std::vector<FoldMetrics> cross_validate(const EvaluationData& data, const MethodSpec& method,
                                        const std::vector<std::vector<std::size_t>>& folds, std::size_t workers = 1);

std::vector<FoldMetrics> cross_validate(const EvaluationData& data, const MethodSpec& method, std::size_t k_folds,
                                        std::uint64_t seed, std::size_t workers = 1);

/// L2-regularized logistic regression by batch gradient descent; the
/// linear reference scorer.
class LogisticScorer {
public:
    void fit(const Dataset& train, std::size_t iterations = 500, double learning_rate = 0.5, double l2 = 1e-3);
    double probability(std::span<const double> x) const;

private:
    std::vector<double> coef_;
    double bias_ = 0.0;
};

const char* to_string(Representation r);
const char* to_string(Weighting w);
const char* to_string(FeatureSet f);
Representation parse_representation(const std::string& s);
Weighting parse_weighting(const std::string& s);
FeatureSet parse_feature_set(const std::string& s);
knn::PredictionMode parse_mode(const std::string& s);
const char* to_string(knn::PredictionMode m);

}  // namespace ppmf::eval
