#include "stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace ppmf::stats {

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = r;
        i = j + 1;
    }
    return ranks;
}

namespace {

// sum of t^3 - t over groups of equal values
double tie_term(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        sum += t * t * t - t;
        i = j + 1;
    }
    return sum;
}

}  // namespace

double chi_square_sf(double x, double dof) {
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

TestResult friedman(const std::vector<std::vector<double>>& matrix) {
    const std::size_t n = matrix.size();
    if (n < 2) throw Error(ErrorCode::DegenerateMatrix, "Friedman test needs at least two folds");
    const std::size_t m = matrix.front().size();
    if (m < 2) throw Error(ErrorCode::DegenerateMatrix, "Friedman test needs at least two methods");

    std::vector<double> rank_sums(m, 0.0);
    double ties = 0.0;
    for (const auto& row : matrix) {
        if (row.size() != m) throw Error(ErrorCode::DimensionMismatch, "ragged fold x method matrix");
        const auto r = average_ranks(row);
        for (std::size_t j = 0; j < m; ++j) rank_sums[j] += r[j];
        ties += tie_term(row);
    }
    const double N = static_cast<double>(n);
    const double M = static_cast<double>(m);
    const double correction = 1.0 - ties / (N * M * (M * M - 1.0));
    if (correction <= 0.0) return {0.0, 1.0};

    double ss = 0.0;
    for (double r : rank_sums) ss += r * r;
    double chi = (12.0 / (N * M * (M + 1.0)) * ss - 3.0 * N * (M + 1.0)) / correction;
    chi = std::max(0.0, chi);
    return {chi, chi_square_sf(chi, M - 1.0)};
}

TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "paired samples differ in length");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    const std::size_t n = diffs.size();
    if (n < kWilcoxonMinPairs)
        throw Error(ErrorCode::TooFewPairs, std::to_string(n) + " non-zero differences, need " +
                                                std::to_string(kWilcoxonMinPairs));

    std::vector<double> magnitudes(n);
    for (std::size_t i = 0; i < n; ++i) magnitudes[i] = std::abs(diffs[i]);
    const auto ranks = average_ranks(magnitudes);

    double w_plus = 0.0;
    double w_minus = 0.0;
    for (std::size_t i = 0; i < n; ++i) (diffs[i] > 0.0 ? w_plus : w_minus) += ranks[i];
    const double statistic = std::min(w_plus, w_minus);

    if (n <= kWilcoxonExactLimit) {
        // Distribution of W+ over all 2^n sign assignments, on doubled ranks
        // so that half-integer average ranks stay integral.
        std::vector<long> doubled(n);
        long total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            doubled[i] = std::lround(2.0 * ranks[i]);
            total += doubled[i];
        }
        std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
        ways[0] = 1.0;
        long reach = 0;
        for (long r : doubled) {
            for (long s = reach; s >= 0; --s)
                if (ways[static_cast<std::size_t>(s)] != 0.0) ways[static_cast<std::size_t>(s + r)] += ways[static_cast<std::size_t>(s)];
            reach += r;
        }
        const long cutoff = std::lround(2.0 * statistic);
        double tail = 0.0;
        for (long s = 0; s <= cutoff; ++s) tail += ways[static_cast<std::size_t>(s)];
        const double p = 2.0 * tail / std::ldexp(1.0, static_cast<int>(n));
        return {statistic, std::min(1.0, p)};
    }

    const double N = static_cast<double>(n);
    const double mean = N * (N + 1.0) / 4.0;
    const double var = (N * (N + 1.0) * (2.0 * N + 1.0) - tie_term(magnitudes) / 2.0) / 24.0;
    const double se = std::sqrt(var);
    double z = (w_plus - mean) / se;
    if (z > 0.0)
        z -= 0.5 / se;
    else if (z < 0.0)
        z += 0.5 / se;
    const double p = std::erfc(std::abs(z) / std::sqrt(2.0));
    return {statistic, std::min(1.0, p)};
}

}  // namespace ppmf::stats
