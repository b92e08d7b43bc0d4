#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ppmf::stats {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Average ranks (1-based) of `values`; tied values share the mean rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Friedman chi-square over a folds x methods matrix (rows = folds). Methods
/// are ranked within each fold with average ranks for ties and the statistic
/// carries the usual tie correction; p comes from chi-square with M-1 degrees
/// of freedom. A matrix whose every row is fully tied gives (0, 1).
/// Throws DegenerateMatrix if N < 2 or M < 2.
TestResult friedman(const std::vector<std::vector<double>>& matrix);

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped, tied magnitudes get average ranks. The statistic is
/// min(W+, W-). For n <= 25 the p-value is exact (full sign-flip
/// distribution of the observed ranks); above that the normal approximation
/// with tie-corrected variance and continuity correction is used.
/// Throws TooFewPairs when fewer than 5 non-zero differences remain.
TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

inline constexpr std::size_t kWilcoxonExactLimit = 25;
inline constexpr std::size_t kWilcoxonMinPairs = 5;

/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double dof);

}  // namespace ppmf::stats
