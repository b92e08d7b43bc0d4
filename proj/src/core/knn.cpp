#include "knn.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "parallel.hpp"

namespace ppmf::knn {

void FeatureWeights::validate() const {
    for (std::size_t v = 0; v < kNumVariables; ++v)
        if (!(w[v] >= 0.0) || !std::isfinite(w[v]))
            throw Error(ErrorCode::NegativeWeight, std::string(kVariableNames[v]) + " has weight " + std::to_string(w[v]));
}

bool FeatureWeights::usable() const {
    return std::any_of(w.begin(), w.end(), [](double x) { return x > 0.0; });
}

double variable_distance_sq(std::span<const double> a, std::span<const double> b, std::size_t block_width,
                            std::size_t variable) {
    if (is_static(variable)) {
        std::size_t c = kNumDynamic * block_width + (variable - kNumDynamic);
        double d = a[c] - b[c];
        return d * d;
    }
    const std::size_t begin = variable * block_width;
    double sum = 0.0;
    for (std::size_t c = begin; c < begin + block_width; ++c) {
        double d = a[c] - b[c];
        sum += d * d;
    }
    return sum / static_cast<double>(block_width);
}

VariableDistances variable_distances(std::span<const double> a, std::span<const double> b, std::size_t block_width) {
    VariableDistances out;
    for (std::size_t v = 0; v < kNumVariables; ++v) out[v] = variable_distance_sq(a, b, block_width, v);
    return out;
}

double weighted_distance_sq(const VariableDistances& d, const FeatureWeights& weights) {
    double sum = 0.0;
    for (std::size_t v = 0; v < kNumVariables; ++v) sum += weights[v] * d[v];
    return sum;
}

double weighted_distance_sq(std::span<const double> a, std::span<const double> b, std::size_t block_width,
                            const FeatureWeights& weights) {
    return weighted_distance_sq(variable_distances(a, b, block_width), weights);
}

void select_nearest(std::vector<Candidate>& candidates, std::size_t k, const Dataset& train) {
    if (k == 0) throw Error(ErrorCode::KTooLarge, "k must be positive");
    if (k > candidates.size())
        throw Error(ErrorCode::KTooLarge,
                    "k=" + std::to_string(k) + " exceeds " + std::to_string(candidates.size()) + " candidates");
    auto before = [&](const Candidate& x, const Candidate& y) {
        if (x.distance_sq != y.distance_sq) return x.distance_sq < y.distance_sq;
        return train.id(x.index) < train.id(y.index);
    };
    auto kth = candidates.begin() + static_cast<std::ptrdiff_t>(k);
    std::nth_element(candidates.begin(), kth - 1, candidates.end(), before);
    std::sort(candidates.begin(), kth, before);
    candidates.resize(k);
}

double soft_score(std::span<const double> distances_sq, std::span<const int> labels) {
    const double shift = *std::min_element(distances_sq.begin(), distances_sq.end());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t n = 0; n < distances_sq.size(); ++n) {
        double s = std::exp(-(distances_sq[n] - shift));
        num += s * labels[n];
        den += s;
    }
    return num / den;
}

double soft_score(const NeighborSet& neighbors) {
    std::vector<double> d;
    std::vector<int> y;
    for (const auto& n : neighbors.entries) {
        d.push_back(n.distance_sq);
        y.push_back(n.label);
    }
    return soft_score(d, y);
}

Model::Model(Dataset train, FeatureWeights weights, std::size_t k, PredictionMode mode, double threshold)
    : train_(std::move(train)), weights_(weights), k_(k), mode_(mode), threshold_(threshold) {
    weights_.validate();
    if (k_ == 0 || k_ > train_.size())
        throw Error(ErrorCode::KTooLarge,
                    "k=" + std::to_string(k_) + " with " + std::to_string(train_.size()) + " training patients");
    if (!(threshold_ > 0.0 && threshold_ < 1.0)) throw Error(ErrorCode::BadConfig, "threshold must lie in (0, 1)");
}

NeighborSet Model::neighbors(std::span<const double> query, const std::string& query_id, bool leave_one_out) const {
    if (query.size() != train_.dims())
        throw Error(ErrorCode::DimensionMismatch, "query '" + query_id + "' does not match the training layout");
    std::vector<Candidate> candidates;
    candidates.reserve(train_.size());
    for (std::size_t j = 0; j < train_.size(); ++j) {
        if (leave_one_out && train_.id(j) == query_id) continue;
        candidates.push_back({weighted_distance_sq(query, train_.row(j), train_.block_width(), weights_), j});
    }
    select_nearest(candidates, k_, train_);

    NeighborSet out{query_id, {}};
    out.entries.reserve(candidates.size());
    for (const auto& c : candidates)
        out.entries.push_back({c.index, train_.id(c.index), c.distance_sq, train_.label(c.index)});
    return out;
}

Prediction Model::classify(std::span<const double> query, const std::string& query_id, bool leave_one_out) const {
    const NeighborSet ns = neighbors(query, query_id, leave_one_out);
    if (mode_ == PredictionMode::Weighted) {
        double s = soft_score(ns);
        return {s >= threshold_ ? 1 : 0, s};
    }
    std::size_t positive = 0;
    for (const auto& n : ns.entries) positive += n.label == 1 ? 1 : 0;
    const std::size_t negative = ns.entries.size() - positive;
    return {positive >= negative ? 1 : 0, static_cast<double>(positive) / static_cast<double>(ns.entries.size())};
}

std::vector<Prediction> Model::predict(const Dataset& queries, bool leave_one_out, std::size_t workers) const {
    std::vector<Prediction> out(queries.size());
    parallel_for(queries.size(), workers,
                 [&](std::size_t i) { out[i] = classify(queries.row(i), queries.id(i), leave_one_out); });
    return out;
}

// --- pairwise table ----------------------------------------------------------

PairwiseDistances::PairwiseDistances(const Dataset& data, std::size_t workers, std::size_t max_cache_bytes)
    : data_(data) {
    const std::size_t n = data.size();
    const std::size_t pairs = n < 2 ? 0 : n * (n - 1) / 2;
    if (pairs == 0 || pairs * kNumVariables * sizeof(double) > max_cache_bytes) return;
    cache_.resize(pairs * kNumVariables);
    parallel_for(n, workers, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            auto d = variable_distances(data_.row(i), data_.row(j), data_.block_width());
            std::copy(d.begin(), d.end(), cache_.begin() + static_cast<std::ptrdiff_t>(slot(i, j) * kNumVariables));
        }
    });
}

std::size_t PairwiseDistances::slot(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    const std::size_t n = data_.size();
    // row-major upper triangle without the diagonal
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

VariableDistances PairwiseDistances::get(std::size_t i, std::size_t j) const {
    if (i == j) return VariableDistances{};
    if (cache_.empty()) return variable_distances(data_.row(i), data_.row(j), data_.block_width());
    VariableDistances d;
    const double* p = cache_.data() + slot(i, j) * kNumVariables;
    std::copy(p, p + kNumVariables, d.begin());
    return d;
}

double PairwiseDistances::weighted(std::size_t i, std::size_t j, const FeatureWeights& weights) const {
    if (i == j) return 0.0;
    if (cache_.empty()) return weighted_distance_sq(data_.row(i), data_.row(j), data_.block_width(), weights);
    const double* p = cache_.data() + slot(i, j) * kNumVariables;
    double sum = 0.0;
    for (std::size_t v = 0; v < kNumVariables; ++v) sum += weights[v] * p[v];
    return sum;
}

}  // namespace ppmf::knn
