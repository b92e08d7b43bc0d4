#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "vocabulary.hpp"

namespace ppmf::knn {

/// One non-negative weight per clinical variable, shared by all cells of
/// that variable. Canonical variable order.
struct FeatureWeights {
    std::array<double, kNumVariables> w{};

    static FeatureWeights uniform(double value = 1.0) {
        FeatureWeights f;
        f.w.fill(value);
        return f;
    }
    double& operator[](std::size_t v) { return w[v]; }
    double operator[](std::size_t v) const { return w[v]; }

    /// Throws NegativeWeight for negative or non-finite entries.
    void validate() const;
    bool usable() const;

    friend bool operator==(const FeatureWeights&, const FeatureWeights&) = default;
};

using VariableDistances = std::array<double, kNumVariables>;

/// Squared distance restricted to one variable: mean squared difference over
/// the variable's cells (24 buckets / 6 aggregates), plain squared difference
/// for a static.
double variable_distance_sq(std::span<const double> a, std::span<const double> b, std::size_t block_width,
                            std::size_t variable);

VariableDistances variable_distances(std::span<const double> a, std::span<const double> b, std::size_t block_width);

/// sum_v w_v * D_v^2, accumulated in canonical variable order.
double weighted_distance_sq(const VariableDistances& d, const FeatureWeights& weights);
double weighted_distance_sq(std::span<const double> a, std::span<const double> b, std::size_t block_width,
                            const FeatureWeights& weights);

struct Neighbor {
    std::size_t index = 0;  // row in the training dataset
    std::string patient_id;
    double distance_sq = 0.0;
    int label = 0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct NeighborSet {
    std::string query_id;
    std::vector<Neighbor> entries;  // ascending distance, ties by patient id
};

/// Sort key used everywhere neighbors are ranked.
struct Candidate {
    double distance_sq;
    std::size_t index;
};

/// Keeps the k smallest candidates ordered by (distance, patient id).
/// Throws KTooLarge when fewer than k candidates exist.
void select_nearest(std::vector<Candidate>& candidates, std::size_t k, const Dataset& train);

/// exp(-d^2) similarity-weighted mean label. The smallest distance is
/// subtracted before exponentiating; the ratio is unchanged.
double soft_score(std::span<const double> distances_sq, std::span<const int> labels);
double soft_score(const NeighborSet& neighbors);

enum class PredictionMode { Majority, Weighted };

struct Prediction {
    int label = 0;
    double score = 0.0;
};

class Model {
public:
    Model(Dataset train, FeatureWeights weights, std::size_t k = 10, PredictionMode mode = PredictionMode::Majority,
          double threshold = 0.5);

    const Dataset& train() const noexcept { return train_; }
    const FeatureWeights& weights() const noexcept { return weights_; }
    std::size_t k() const noexcept { return k_; }
    PredictionMode mode() const noexcept { return mode_; }
    double threshold() const noexcept { return threshold_; }

    /// Exact k nearest training patients by full scan. With leave_one_out the
    /// training row carrying `query_id` is skipped.
    NeighborSet neighbors(std::span<const double> query, const std::string& query_id, bool leave_one_out) const;

    /// Majority mode: most frequent neighbor label, a tied vote goes to the
    /// positive class, score = positive vote fraction. Weighted mode: label =
    /// soft score >= threshold.
    Prediction classify(std::span<const double> query, const std::string& query_id,
                        bool leave_one_out = false) const;

    std::vector<Prediction> predict(const Dataset& queries, bool leave_one_out = false, std::size_t workers = 1) const;

private:
    Dataset train_;
    FeatureWeights weights_;
    std::size_t k_;
    PredictionMode mode_;
    double threshold_;
};

/// Per-variable squared distances between every pair of rows of one dataset.
/// Cached when the triangle fits in `max_cache_bytes`, computed on demand
/// otherwise; both paths return identical values.
class PairwiseDistances {
public:
    explicit PairwiseDistances(const Dataset& data, std::size_t workers = 1,
                               std::size_t max_cache_bytes = std::size_t{1} << 30);

    const Dataset& data() const noexcept { return data_; }
    bool cached() const noexcept { return !cache_.empty(); }

    VariableDistances get(std::size_t i, std::size_t j) const;
    double weighted(std::size_t i, std::size_t j, const FeatureWeights& weights) const;

private:
    std::size_t slot(std::size_t i, std::size_t j) const;

    const Dataset& data_;
    std::vector<double> cache_;
};

}  // namespace ppmf::knn
