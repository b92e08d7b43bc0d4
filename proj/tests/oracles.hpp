#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's distance, neighbor or error code.

#include <algorithm>
#include <span>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "knn.hpp"

namespace oracles {

inline std::vector<double> per_variable_sq(const ppmf::Dataset& d, std::size_t i, std::size_t j) {
    std::vector<double> out(ppmf::kNumVariables);
    auto a = d.row(i), b = d.row(j);
    for (std::size_t v = 0; v < ppmf::kNumVariables; ++v) {
        double s = 0.0;
        for (std::size_t c = d.offset(v); c < d.offset(v) + d.width(v); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
        out[v] = s / static_cast<double>(d.width(v));
    }
    return out;
}

inline double weighted(const std::vector<double>& dv, const ppmf::knn::FeatureWeights& w) {
    double s = 0.0;
    for (std::size_t v = 0; v < dv.size(); ++v) s += w[v] * dv[v];
    return s;
}

/// Leave-one-out k nearest rows of every row, by (distance, id).
inline std::vector<std::vector<std::size_t>> loo_neighbors(const ppmf::Dataset& d, const ppmf::knn::FeatureWeights& w,
                                                           std::size_t k) {
    std::vector<std::vector<std::size_t>> out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::vector<std::pair<std::pair<double, std::string>, std::size_t>> c;
        for (std::size_t j = 0; j < d.size(); ++j)
            if (j != i) c.push_back({{weighted(per_variable_sq(d, i, j), w), d.id(j)}, j});
        std::sort(c.begin(), c.end());
        for (std::size_t r = 0; r < k; ++r) out[i].push_back(c[r].second);
    }
    return out;
}

/// E = 2 * sum_i (y_i - yhat_i)^2 over fixed neighbor sets, with
/// yhat_i = sum_n exp(-d_in) y_n / sum_n exp(-d_in).
inline double error_with_sets(const ppmf::Dataset& d, const ppmf::knn::FeatureWeights& w,
                              const std::vector<std::vector<std::size_t>>& sets) {
    double e = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        double num = 0.0, den = 0.0;
        for (auto n : sets[i]) {
            const double s = std::exp(-weighted(per_variable_sq(d, i, n), w));
            num += s * d.label(n);
            den += s;
        }
        const double r = d.label(i) - num / den;
        e += 2.0 * r * r;
    }
    return e;
}

inline double naive_error(const ppmf::Dataset& d, const ppmf::knn::FeatureWeights& w, std::size_t k) {
    return error_with_sets(d, w, loo_neighbors(d, w, k));
}

/// Central differences of the error with every neighbor set frozen at `w`.
inline ppmf::knn::FeatureWeights finite_difference_gradient(const ppmf::Dataset& d, const ppmf::knn::FeatureWeights& w,
                                                            std::size_t k, double h) {
    const auto sets = loo_neighbors(d, w, k);
    ppmf::knn::FeatureWeights g;
    for (std::size_t v = 0; v < ppmf::kNumVariables; ++v) {
        auto up = w, down = w;
        up[v] += h;
        down[v] -= h;
        g[v] = (error_with_sets(d, up, sets) - error_with_sets(d, down, sets)) / (2.0 * h);
    }
    return g;
}

// Exhaustive scan written independently of the library: per-variable mean
// squared difference, weighted sum, full sort by (distance, id).
inline std::vector<std::pair<double, std::string>> brute_force(const ppmf::Dataset& train,
                                                               std::span<const double> q,
                                                               const ppmf::knn::FeatureWeights& w, std::size_t k,
                                                               const std::string& skip) {
    std::vector<std::pair<double, std::string>> all;
    for (std::size_t j = 0; j < train.size(); ++j) {
        if (train.id(j) == skip) continue;
        auto r = train.row(j);
        double total = 0.0;
        for (std::size_t v = 0; v < ppmf::kNumVariables; ++v) {
            const std::size_t off = train.offset(v), width = train.width(v);
            double s = 0.0;
            for (std::size_t c = off; c < off + width; ++c) s += (q[c] - r[c]) * (q[c] - r[c]);
            total += w[v] * (s / static_cast<double>(width));
        }
        all.emplace_back(total, train.id(j));
    }
    std::sort(all.begin(), all.end());
    all.resize(k);
    return all;
}

/// |a - b| relative to the larger magnitude; two values below 1e-9 in
/// magnitude count as equal (both are numerically zero).
inline double relative_error(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale < 1e-9) return 0.0;
    return std::abs(a - b) / scale;
}

}  // namespace oracles
