#include "methods.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "parallel.hpp"

namespace ppmf::eval {
namespace {

template <typename T>
std::vector<T> pick(const std::vector<T>& all, const std::vector<std::size_t>& rows) {
    std::vector<T> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(all[r]);
    return out;
}

struct FoldDatasets {
    Dataset train;
    Dataset test;
};

FoldDatasets build_fold(const EvaluationData& data, const std::vector<std::size_t>& train,
                        const std::vector<std::size_t>& test, Representation rep) {
    if (rep == Representation::TimeSeries) {
        const auto train_raw = pick(data.frames, train);
        const auto stats = framing::fit_scaling(train_raw);
        std::vector<framing::FramedPatient> train_dense, test_dense;
        for (const auto& f : train_raw) train_dense.push_back(framing::impute_and_scale(f, stats));
        for (auto r : test) test_dense.push_back(framing::impute_and_scale(data.frames[r], stats));
        return {framing::to_dataset(train_dense), framing::to_dataset(test_dense)};
    }
    const auto train_raw = pick(data.aggregates, train);
    const auto stats = framing::fit_aggregation(train_raw);
    std::vector<framing::AggregatedPatient> train_dense, test_dense;
    for (const auto& a : train_raw) train_dense.push_back(framing::impute_and_scale(a, stats));
    for (auto r : test) test_dense.push_back(framing::impute_and_scale(data.aggregates[r], stats));
    return {framing::to_dataset(train_dense), framing::to_dataset(test_dense)};
}

knn::FeatureWeights learn_weights(const Dataset& train, const MethodSpec& m) {
    const auto active = active_variables(m.features);
    switch (m.weighting) {
        case Weighting::GradientDescent: {
            weights::TrainConfig cfg;
            cfg.learning_rate = m.learning_rate;
            cfg.max_epochs = m.max_epochs;
            cfg.min_relative_improvement = m.min_relative_improvement;
            cfg.patience = m.patience;
            cfg.k = m.k;
            cfg.active = active;
            return weights::train_gd(train, cfg).weights;
        }
        case Weighting::ChiSquare: return weights::filter_weights(train, weights::FilterMethod::ChiSquare, active);
        case Weighting::InformationGain:
            return weights::filter_weights(train, weights::FilterMethod::InformationGain, active);
        case Weighting::Gini: return weights::filter_weights(train, weights::FilterMethod::Gini, active);
        case Weighting::Manual: {
            if (!m.manual_weights) throw Error(ErrorCode::BadConfig, "manual weighting needs a weights file");
            auto w = *m.manual_weights;
            for (std::size_t v = 0; v < kNumVariables; ++v)
                if (!active[v]) w[v] = 0.0;
            return w;
        }
        case Weighting::None: break;
    }
    knn::FeatureWeights w;
    for (std::size_t v = 0; v < kNumVariables; ++v) w[v] = active[v] ? 1.0 : 0.0;
    return w;
}

}  // namespace

weights::ActiveSet active_variables(FeatureSet features) {
    weights::ActiveSet a{};
    for (std::size_t v = 0; v < kNumVariables; ++v) {
        switch (features) {
            case FeatureSet::All: a[v] = true; break;
            case FeatureSet::StaticOnly: a[v] = is_static(v); break;
            case FeatureSet::DynamicOnly: a[v] = !is_static(v); break;
        }
    }
    return a;
}

std::vector<int> EvaluationData::labels() const {
    std::vector<int> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back(f.label);
    return out;
}

EvaluationData EvaluationData::subset(const std::vector<std::size_t>& rows) const {
    return {pick(frames, rows), pick(aggregates, rows)};
}

EvaluationData prepare(const ingest::RawCohort& cohort, const framing::FrameLayout& layout, std::size_t workers) {
    return {framing::bucketize_cohort(cohort, layout, workers), framing::aggregate_cohort(cohort, workers)};
}

void LogisticScorer::fit(const Dataset& train, std::size_t iterations, double learning_rate, double l2) {
    const std::size_t d = train.dims();
    const double n = static_cast<double>(train.size());
    coef_.assign(d, 0.0);
    bias_ = 0.0;
    std::vector<double> grad(d);
    for (std::size_t it = 0; it < iterations; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_bias = 0.0;
        for (std::size_t i = 0; i < train.size(); ++i) {
            const auto x = train.row(i);
            const double err = probability(x) - train.label(i);
            for (std::size_t c = 0; c < d; ++c) grad[c] += err * x[c];
            grad_bias += err;
        }
        for (std::size_t c = 0; c < d; ++c) coef_[c] -= learning_rate * (grad[c] / n + l2 * coef_[c]);
        bias_ -= learning_rate * grad_bias / n;
    }
}

double LogisticScorer::probability(std::span<const double> x) const {
    double z = bias_;
    for (std::size_t c = 0; c < coef_.size(); ++c) z += coef_[c] * x[c];
    return 1.0 / (1.0 + std::exp(-z));
}

std::vector<int> fit_and_predict(const EvaluationData& data, const std::vector<std::size_t>& train,
                                 const std::vector<std::size_t>& test, const MethodSpec& method) {
    auto fold = build_fold(data, train, test, method.representation);
    std::vector<int> predicted(fold.test.size(), 0);

    switch (method.classifier) {
        case Classifier::MajorityClass: {
            const std::size_t pos = fold.train.count_positive();
            const int majority = 2 * pos > fold.train.size() ? 1 : 0;
            std::fill(predicted.begin(), predicted.end(), majority);
            return predicted;
        }
        case Classifier::Logistic: {
            LogisticScorer scorer;
            scorer.fit(fold.train);
            for (std::size_t i = 0; i < fold.test.size(); ++i)
                predicted[i] = scorer.probability(fold.test.row(i)) >= method.threshold ? 1 : 0;
            return predicted;
        }
        case Classifier::Knn: break;
    }
    const auto w = learn_weights(fold.train, method);
    const knn::Model model(std::move(fold.train), w, method.k, method.mode, method.threshold);
    const auto preds = model.predict(fold.test);
    for (std::size_t i = 0; i < preds.size(); ++i) predicted[i] = preds[i].label;
    return predicted;
}

std::vector<FoldMetrics> cross_validate(const EvaluationData& data, const MethodSpec& method,
                                        const std::vector<std::vector<std::size_t>>& folds, std::size_t workers) {
    if (data.frames.size() != data.aggregates.size())
        throw Error(ErrorCode::DimensionMismatch, "frames and aggregates disagree in size");
    const auto labels = data.labels();
    std::vector<FoldMetrics> out(folds.size());
    parallel_for(folds.size(), workers, [&](std::size_t f) {
        std::vector<std::size_t> train;
        for (std::size_t g = 0; g < folds.size(); ++g)
            if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
        std::sort(train.begin(), train.end());
        const auto predicted = fit_and_predict(data, train, folds[f], method);
        out[f] = FoldMetrics::from_predictions(f, pick(labels, folds[f]), predicted);
    });
    return out;
}

std::vector<FoldMetrics> cross_validate(const EvaluationData& data, const MethodSpec& method, std::size_t k_folds,
                                        std::uint64_t seed, std::size_t workers) {
    return cross_validate(data, method, kfold(data.labels(), k_folds, seed), workers);
}

const char* to_string(Representation r) { return r == Representation::TimeSeries ? "timeseries" : "aggregation"; }

const char* to_string(Weighting w) {
    switch (w) {
        case Weighting::GradientDescent: return "gd";
        case Weighting::None: return "none";
        case Weighting::Manual: return "manual";
        case Weighting::ChiSquare: return "chi2";
        case Weighting::InformationGain: return "infogain";
        case Weighting::Gini: return "gini";
    }
    return "?";
}

const char* to_string(FeatureSet f) {
    switch (f) {
        case FeatureSet::All: return "all";
        case FeatureSet::StaticOnly: return "static";
        case FeatureSet::DynamicOnly: return "dynamic";
    }
    return "?";
}

const char* to_string(knn::PredictionMode m) { return m == knn::PredictionMode::Majority ? "majority" : "weighted"; }

Representation parse_representation(const std::string& s) {
    if (s == "timeseries") return Representation::TimeSeries;
    if (s == "aggregation") return Representation::Aggregation;
    throw Error(ErrorCode::BadConfig, "unknown representation '" + s + "'");
}

Weighting parse_weighting(const std::string& s) {
    for (auto w : {Weighting::GradientDescent, Weighting::None, Weighting::Manual, Weighting::ChiSquare,
                   Weighting::InformationGain, Weighting::Gini})
        if (s == to_string(w)) return w;
    throw Error(ErrorCode::BadConfig, "unknown weighting '" + s + "'");
}

FeatureSet parse_feature_set(const std::string& s) {
    for (auto f : {FeatureSet::All, FeatureSet::StaticOnly, FeatureSet::DynamicOnly})
        if (s == to_string(f)) return f;
    throw Error(ErrorCode::BadConfig, "unknown feature set '" + s + "'");
}

knn::PredictionMode parse_mode(const std::string& s) {
    if (s == "majority") return knn::PredictionMode::Majority;
    if (s == "weighted") return knn::PredictionMode::Weighted;
    throw Error(ErrorCode::BadConfig, "unknown prediction mode '" + s + "'");
}

}  // namespace ppmf::eval
