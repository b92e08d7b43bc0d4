#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "error.hpp"
#include "reference.hpp"
#include "stats.hpp"

using namespace ppmf;
using namespace ppmf::stats;

namespace {

// Two-sided p of the signed-rank statistic by listing all 2^n sign vectors
// over the given (possibly tied) ranks.
double enumerate_p(const std::vector<double>& ranks, double observed_min) {
    const std::size_t n = ranks.size();
    double total = 0.0;
    for (double r : ranks) total += r;
    std::size_t extreme = 0;
    const std::size_t all = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < all; ++mask) {
        double plus = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i)) plus += ranks[i];
        if (std::min(plus, total - plus) <= observed_min + 1e-9) ++extreme;
    }
    return std::min(1.0, static_cast<double>(extreme) / static_cast<double>(all));
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("average ranks share ties") {
    std::vector<double> x = {3.0, 1.0, 3.0, 2.0};
    auto r = average_ranks(x);
    CHECK(r == std::vector<double>{3.5, 1.0, 3.5, 2.0});
}

TEST_CASE("Friedman on identical methods is 0 with p 1") {
    std::vector<std::vector<double>> m(8, std::vector<double>{0.4, 0.4, 0.4});
    auto r = friedman(m);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);
}

TEST_CASE("Friedman closed form for a consistent ranking") {
    // M = 3, N = 10, ranks always 1,2,3: chi2 = 12N/(M(M+1)) * sum (Rj - 2)^2 = 10 * 2 = 20,
    // p = exp(-20/2) for two degrees of freedom.
    std::vector<std::vector<double>> m;
    for (int i = 0; i < 10; ++i) m.push_back({0.9 - 0.01 * i, 0.5, 0.1 + 0.01 * i});
    auto r = friedman(m);
    CHECK(r.statistic == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(std::exp(-10.0)).epsilon(1e-9));
}

TEST_CASE("Friedman ignores the column order") {
    std::mt19937_64 eng(4);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<std::vector<double>> m(12, std::vector<double>(4));
    for (auto& row : m)
        for (auto& x : row) x = std::round(u(eng) * 5) / 5;  // coarse, so ties occur
    auto base = friedman(m);
    auto perm = m;
    for (auto& row : perm) std::swap(row[0], row[3]), std::swap(row[1], row[2]);
    auto r = friedman(perm);
    CHECK(r.statistic == doctest::Approx(base.statistic).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(base.p_value).epsilon(1e-12));
}

TEST_CASE("Friedman needs two folds and two methods") {
    CHECK_THROWS_AS(friedman({{0.1, 0.2}}), Error);
    CHECK_THROWS_AS(friedman({{0.1}, {0.2}}), Error);
}

TEST_CASE("Wilcoxon n=5 all positive is 2/32") {
    std::vector<double> a = {1.1, 2.2, 3.3, 4.4, 5.5}, b = {1, 2, 3, 4, 5};
    auto r = wilcoxon_signed_rank(a, b);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == enumerate_p({1, 2, 3, 4, 5}, 0.0));
    CHECK(r.p_value == 0.0625);
}

TEST_CASE("Wilcoxon drops zero differences") {
    std::vector<double> a = {1, 2, 3, 4, 5, 6}, b = a;
    CHECK_THROWS_AS(wilcoxon_signed_rank(a, b), Error);
    try {
        wilcoxon_signed_rank(a, b);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooFewPairs);
    }
    CHECK_THROWS_AS(wilcoxon_signed_rank(std::vector<double>{1, 2}, std::vector<double>{1}), Error);
}

TEST_CASE("Wilcoxon is symmetric in its arguments") {
    std::vector<double> a = {0.1, 0.5, 0.3, 0.9, 0.7, 0.2, 0.8}, b = {0.2, 0.1, 0.35, 0.4, 0.75, 0.6, 0.3};
    auto ab = wilcoxon_signed_rank(a, b), ba = wilcoxon_signed_rank(b, a);
    CHECK(ab.statistic == ba.statistic);
    CHECK(ab.p_value == ba.p_value);
}

TEST_CASE("exact Wilcoxon matches full enumeration, ties included") {
    std::mt19937_64 eng(8);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 5 + static_cast<std::size_t>(trial % 10);
        std::vector<double> a(n), b(n);
        std::uniform_int_distribution<int> small(-4, 4);
        for (std::size_t i = 0; i < n; ++i) {
            int diff = small(eng);
            if (diff == 0) diff = 1;
            a[i] = 10.0;
            b[i] = 10.0 - diff;  // integer differences: plenty of tied magnitudes
        }
        std::vector<double> d(n), mag(n);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = a[i] - b[i];
            mag[i] = std::abs(d[i]);
        }
        auto ranks = average_ranks(mag);
        double plus = 0.0, total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += ranks[i];
            if (d[i] > 0) plus += ranks[i];
        }
        const double stat = std::min(plus, total - plus);
        auto r = wilcoxon_signed_rank(a, b);
        CHECK(r.statistic == stat);
        CHECK(r.p_value == doctest::Approx(enumerate_p(ranks, stat)).epsilon(1e-12));
    }
}

TEST_CASE("Friedman and Wilcoxon agree with the scipy reference on 50 matrices") {
    const auto cases = reference::load(std::string(PPMF_TEST_DATA_DIR) + "/stats_reference.csv");
    REQUIRE(cases.size() == 50);
    for (const auto& c : cases) {
        auto fr = friedman(c.matrix);
        CHECK(reference::close(fr.statistic, c.friedman_statistic));
        CHECK(reference::close(fr.p_value, c.friedman_p));
        std::vector<double> a, b;
        for (const auto& row : c.matrix) {
            a.push_back(row[0]);
            b.push_back(row[1]);
        }
        auto w = wilcoxon_signed_rank(a, b);
        CHECK(reference::close(w.statistic, c.wilcoxon_statistic));
        CHECK(reference::close(w.p_value, c.wilcoxon_p));
    }
}

TEST_CASE("chi-square tail") {
    CHECK(chi_square_sf(0.0, 3) == 1.0);
    CHECK(chi_square_sf(2.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

}
