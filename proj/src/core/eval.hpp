#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ppmf::eval {

struct Split {
    std::vector<std::size_t> development;
    std::vector<std::size_t> validation;
};

/// Stratified 50/50 split of row indices. Development receives floor(n/2)
/// rows of which floor(positives/2) are positive. Deterministic in `seed`.
/// Throws SingleClassCohort unless each class has at least two members.
Split split_dev_validation(const std::vector<int>& labels, std::uint64_t seed);

/// Stratified k-fold assignment over row indices: each class is shuffled and
/// dealt round-robin, continuing across classes, so fold sizes differ by at
/// most one. Indices inside each fold are ascending. Throws TooFewPerClass if
/// a class has fewer than k members.
std::vector<std::vector<std::size_t>> kfold(const std::vector<int>& labels, std::size_t k, std::uint64_t seed);

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

/// Precision, recall and F1 on the positive class; every 0/0 is taken as 0.
Prf prf(std::size_t tp, std::size_t fp, std::size_t fn);

struct FoldMetrics {
    std::size_t fold_index = 0;
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0.0, recall = 0.0, f_measure = 0.0;

    static FoldMetrics from_predictions(std::size_t fold, const std::vector<int>& truth,
                                        const std::vector<int>& predicted);
    std::size_t size() const { return tp + fp + fn + tn; }
};

struct MethodResult {
    std::string name;
    std::vector<FoldMetrics> folds;

    double mean_precision() const;
    double mean_recall() const;
    double mean_f_measure() const;
    std::vector<double> f_measures() const;
};

struct PairwiseComparison {
    std::string method_a;
    std::string method_b;
    double statistic = 0.0;
    double p_value = 1.0;
    bool significant = false;
    /// Fewer than five folds differ; reported as p = 1.
    bool insufficient_pairs = false;
};

struct ComparisonReport {
    double alpha = 0.05;
    std::vector<MethodResult> methods;
    double friedman_statistic = 0.0;
    double friedman_p = 1.0;
    std::vector<PairwiseComparison> pairwise;  // empty unless friedman_p < alpha
    bool tested = true;                        // false for a single method: metrics only

    bool friedman_significant() const { return friedman_p < alpha; }
    const MethodResult& method(const std::string& name) const;

    std::string to_json() const;
    /// Aligned precision / recall / F-measure table plus test results.
    std::string to_table() const;
};

/// Friedman over the fold x method F-measure matrix; when significant at
/// `alpha`, Wilcoxon signed-rank on every pair of methods. A single method
/// yields its metrics without tests.
ComparisonReport compare(std::vector<MethodResult> methods, double alpha = 0.05);

/// `method,fold,tp,fp,fn,tn,precision,recall,f_measure` rows.
void write_fold_metrics(const std::vector<MethodResult>& methods, std::ostream& out);
std::vector<MethodResult> read_fold_metrics(std::istream& in);

}  // namespace ppmf::eval
