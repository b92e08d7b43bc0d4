#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "error.hpp"
#include "eval.hpp"
#include "helpers.hpp"
#include "methods.hpp"

using namespace ppmf;
using namespace ppmf::eval;

namespace {

std::vector<int> labels_with(std::size_t n, std::size_t positives) {
    std::vector<int> y(n, 0);
    for (std::size_t i = 0; i < positives; ++i) y[(i * 7919) % n] = 1;  // scattered
    REQUIRE(static_cast<std::size_t>(std::count(y.begin(), y.end(), 1)) == positives);
    return y;
}

// Positives run a heart rate of 150 in every bucket, negatives 60.
ingest::RawCohort separable(std::size_t n, std::size_t positives) {
    std::vector<ingest::Event> events;
    std::vector<ingest::Outcome> outcomes;
    const auto hr = *variable_index("Heart rate");
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = testing::pid(i);
        const int y = i < positives ? 1 : 0;
        for (int t = 0; t < 24; ++t) events.push_back({id, t * 120 + 5, hr, y ? 150.0 + i % 3 : 60.0 + i % 3});
        events.push_back({id, 0, kAgeIndex, 60.0});
        outcomes.push_back({id, y});
    }
    return ingest::build_cohort(events, outcomes);
}

MethodResult method(const std::string& name, std::vector<double> f) {
    MethodResult m;
    m.name = name;
    for (std::size_t i = 0; i < f.size(); ++i) {
        FoldMetrics fm;
        fm.fold_index = i;
        fm.f_measure = f[i];
        m.folds.push_back(fm);
    }
    return m;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("stratified halving") {
    auto y = labels_with(100, 18);
    auto s = split_dev_validation(y, 1);
    CHECK(s.development.size() == 50);
    CHECK(s.validation.size() == 50);
    std::size_t dev_pos = 0;
    for (auto i : s.development) dev_pos += static_cast<std::size_t>(y[i]);
    CHECK(dev_pos == 9);
    std::set<std::size_t> all(s.development.begin(), s.development.end());
    all.insert(s.validation.begin(), s.validation.end());
    CHECK(all.size() == 100);
}

TEST_CASE("splits are seed-determined") {
    auto y = labels_with(100, 18);
    auto a = split_dev_validation(y, 42), b = split_dev_validation(y, 42);
    CHECK(a.development == b.development);
    std::size_t distinct = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed)
        distinct += split_dev_validation(y, seed).development != a.development ? 1 : 0;
    CHECK(distinct == 10);
    CHECK_THROWS_AS(split_dev_validation(std::vector<int>{1, 0, 0, 0}, 1), Error);
}

TEST_CASE("k-fold partitions") {
    auto y = labels_with(200, 40);
    auto folds = kfold(y, 20, 3);
    REQUIRE(folds.size() == 20);
    std::set<std::size_t> seen;
    for (const auto& f : folds) {
        CHECK(f.size() == 10);
        CHECK(std::is_sorted(f.begin(), f.end()));
        std::size_t pos = 0;
        for (auto i : f) {
            CHECK(seen.insert(i).second);
            pos += static_cast<std::size_t>(y[i]);
        }
        CHECK(pos == 2);
    }
    CHECK(seen.size() == 200);
    CHECK(kfold(y, 20, 3) == folds);

    auto uneven = kfold(labels_with(207, 43), 20, 3);
    std::size_t lo = 1000, hi = 0;
    for (const auto& f : uneven) lo = std::min(lo, f.size()), hi = std::max(hi, f.size());
    CHECK(hi - lo <= 1);

    try {
        kfold(labels_with(100, 10), 20, 1);
        FAIL("expected TooFewPerClass");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooFewPerClass);
    }
}

TEST_CASE("precision, recall, F") {
    auto a = prf(2, 0, 0);
    CHECK((a.precision == 1.0 && a.recall == 1.0 && a.f_measure == 1.0));
    auto b = prf(1, 1, 1);
    CHECK((b.precision == 0.5 && b.recall == 0.5 && b.f_measure == 0.5));
    auto c = prf(0, 0, 5);
    CHECK((c.precision == 0.0 && c.recall == 0.0 && c.f_measure == 0.0));
}

TEST_CASE("fold metrics recompute from counts") {
    auto m = FoldMetrics::from_predictions(3, {1, 1, 0, 0, 1}, {1, 0, 0, 1, 1});
    CHECK(m.tp == 2);
    CHECK(m.fn == 1);
    CHECK(m.fp == 1);
    CHECK(m.tn == 1);
    CHECK(m.size() == 5);
    auto r = prf(m.tp, m.fp, m.fn);
    CHECK(m.f_measure == r.f_measure);
}

TEST_CASE("a separable cohort scores perfectly in every fold") {
    auto data = prepare(separable(200, 50));
    MethodSpec spec;
    spec.weighting = Weighting::None;
    auto folds = cross_validate(data, spec, 20, 7);
    REQUIRE(folds.size() == 20);
    for (const auto& f : folds) CHECK(f.f_measure == 1.0);

    spec.weighting = Weighting::GradientDescent;
    spec.max_epochs = 3;
    for (const auto& f : cross_validate(data, spec, 5, 7, 2)) CHECK(f.f_measure == 1.0);

    spec.representation = Representation::Aggregation;
    spec.weighting = Weighting::ChiSquare;
    for (const auto& f : cross_validate(data, spec, 5, 7)) CHECK(f.f_measure == 1.0);
}

TEST_CASE("the majority-class reference never finds a positive") {
    auto data = prepare(separable(200, 50));
    MethodSpec spec;
    spec.classifier = Classifier::MajorityClass;
    auto folds = cross_validate(data, spec, 20, 1);
    std::size_t lo = 1000, hi = 0, total = 0;
    for (const auto& f : folds) {
        CHECK(f.recall == 0.0);
        lo = std::min(lo, f.size());
        hi = std::max(hi, f.size());
        total += f.size();
    }
    CHECK(hi - lo <= 1);
    CHECK(total == 200);
}

TEST_CASE("cross-validation is independent of the worker count") {
    auto data = prepare(separable(120, 30));
    // shuffle some labels so predictions are not trivially perfect
    for (std::size_t i = 0; i < data.size(); i += 9) {
        data.frames[i].label ^= 1;
        data.aggregates[i].label ^= 1;
    }
    MethodSpec spec;
    spec.max_epochs = 4;
    spec.mode = knn::PredictionMode::Weighted;
    auto one = cross_validate(data, spec, 10, 5, 1);
    auto four = cross_validate(data, spec, 10, 5, 4);
    for (std::size_t f = 0; f < one.size(); ++f) {
        CHECK(one[f].tp == four[f].tp);
        CHECK(one[f].fp == four[f].fp);
        CHECK(one[f].fn == four[f].fn);
        CHECK(one[f].tn == four[f].tn);
    }
}

TEST_CASE("identical methods: Friedman p = 1 and no pairwise tests") {
    std::vector<double> f = {0.5, 0.6, 0.7, 0.4, 0.55, 0.65, 0.3, 0.8};
    auto r = compare({method("a", f), method("b", f)});
    CHECK(r.friedman_p == 1.0);
    CHECK(r.pairwise.empty());
}

TEST_CASE("a strictly dominant method is significant against every other") {
    std::vector<MethodResult> ms;
    std::vector<double> top, mid, low;
    for (int i = 0; i < 20; ++i) {
        top.push_back(0.9 + 0.001 * i);
        mid.push_back(0.5 + 0.01 * ((i * 7) % 10));
        low.push_back(0.4 - 0.01 * ((i * 3) % 10));
    }
    auto r = compare({method("top", top), method("mid", mid), method("low", low)});
    CHECK(r.friedman_significant());
    for (const auto& p : r.pairwise)
        if (p.method_a == "top" || p.method_b == "top") CHECK(p.significant);
    CHECK(r.pairwise.size() == 3);
}

TEST_CASE("pairwise tests only follow a significant Friedman test") {
    std::vector<double> a, b;
    for (int i = 0; i < 20; ++i) {
        a.push_back(0.5 + 0.01 * (i % 3));
        b.push_back(0.5 + 0.01 * ((i + 1) % 3));
    }
    auto r = compare({method("a", a), method("b", b)});
    CHECK_FALSE(r.friedman_significant());
    CHECK(r.pairwise.empty());
}

TEST_CASE("report means are fold means and files round-trip") {
    MethodResult m;
    m.name = "x";
    m.folds.push_back(FoldMetrics::from_predictions(0, {1, 0, 1}, {1, 0, 0}));
    m.folds.push_back(FoldMetrics::from_predictions(1, {1, 1, 0}, {1, 1, 1}));
    MethodResult n = m;
    n.name = "y";
    n.folds[0] = FoldMetrics::from_predictions(0, {1, 0, 1}, {0, 0, 0});
    auto r = compare({m, n});
    CHECK(r.method("x").mean_f_measure() == doctest::Approx((m.folds[0].f_measure + m.folds[1].f_measure) / 2));
    CHECK(r.method("x").mean_precision() == doctest::Approx((1.0 + 2.0 / 3.0) / 2));

    std::ostringstream out;
    write_fold_metrics(r.methods, out);
    std::istringstream in(out.str());
    auto back = read_fold_metrics(in);
    REQUIRE(back.size() == 2);
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t f = 0; f < 2; ++f) {
            CHECK(back[j].folds[f].tp == r.methods[j].folds[f].tp);
            CHECK(back[j].folds[f].f_measure == r.methods[j].folds[f].f_measure);
        }

    auto json = r.to_json();
    CHECK(json.find("\"friedman\"") != std::string::npos);
    CHECK(r.to_table().find("f_measure") != std::string::npos);

    auto single = compare({m});
    CHECK_FALSE(single.tested);
    CHECK(single.to_json().find("\"friedman\": null") != std::string::npos);
}

TEST_CASE("comparisons need complete matrices") {
    CHECK_THROWS_AS(compare({method("a", {0.1, 0.2}), method("b", {0.1})}), Error);
    CHECK_THROWS_AS(compare({}), Error);
}

}
