#include "eval.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <json.hpp>
#include <map>
#include <ostream>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "text.hpp"

namespace ppmf::eval {
namespace {

std::array<std::vector<std::size_t>, 2> by_class(const std::vector<int>& labels) {
    std::array<std::vector<std::size_t>, 2> out;
    for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i] == 1 ? 1 : 0].push_back(i);
    return out;
}

double mean_of(const std::vector<FoldMetrics>& folds, double FoldMetrics::*field) {
    if (folds.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& f : folds) sum += f.*field;
    return sum / static_cast<double>(folds.size());
}

}  // namespace

Split split_dev_validation(const std::vector<int>& labels, std::uint64_t seed) {
    auto classes = by_class(labels);
    if (classes[0].size() < 2 || classes[1].size() < 2)
        throw Error(ErrorCode::SingleClassCohort, "each class needs at least two patients to split");

    auto eng = rng::stream(seed, "split");
    for (auto& members : classes) rng::shuffle(members, eng);

    const std::size_t dev_pos = classes[1].size() / 2;
    const std::size_t dev_neg = labels.size() / 2 - dev_pos;

    Split s;
    s.development.insert(s.development.end(), classes[1].begin(), classes[1].begin() + static_cast<std::ptrdiff_t>(dev_pos));
    s.development.insert(s.development.end(), classes[0].begin(), classes[0].begin() + static_cast<std::ptrdiff_t>(dev_neg));
    s.validation.insert(s.validation.end(), classes[1].begin() + static_cast<std::ptrdiff_t>(dev_pos), classes[1].end());
    s.validation.insert(s.validation.end(), classes[0].begin() + static_cast<std::ptrdiff_t>(dev_neg), classes[0].end());
    std::sort(s.development.begin(), s.development.end());
    std::sort(s.validation.begin(), s.validation.end());
    return s;
}

std::vector<std::vector<std::size_t>> kfold(const std::vector<int>& labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw Error(ErrorCode::BadConfig, "need at least two folds");
    auto classes = by_class(labels);
    for (int c : {1, 0})
        if (classes[static_cast<std::size_t>(c)].size() < k)
            throw Error(ErrorCode::TooFewPerClass, "class " + std::to_string(c) + " has " +
                                                       std::to_string(classes[static_cast<std::size_t>(c)].size()) +
                                                       " members for " + std::to_string(k) + " folds");
    auto eng = rng::stream(seed, "folds");
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t next = 0;
    for (int c : {1, 0}) {
        auto& members = classes[static_cast<std::size_t>(c)];
        rng::shuffle(members, eng);
        for (auto idx : members) folds[next++ % k].push_back(idx);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

Prf prf(std::size_t tp, std::size_t fp, std::size_t fn) {
    auto ratio = [](double num, double den) { return den == 0.0 ? 0.0 : num / den; };
    Prf out;
    out.precision = ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
    out.recall = ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
    out.f_measure = ratio(2.0 * out.precision * out.recall, out.precision + out.recall);
    return out;
}

FoldMetrics FoldMetrics::from_predictions(std::size_t fold, const std::vector<int>& truth,
                                          const std::vector<int>& predicted) {
    if (truth.size() != predicted.size()) throw Error(ErrorCode::DimensionMismatch, "truth/prediction length");
    FoldMetrics m;
    m.fold_index = fold;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 1)
            (predicted[i] == 1 ? m.tp : m.fn) += 1;
        else
            (predicted[i] == 1 ? m.fp : m.tn) += 1;
    }
    const auto r = prf(m.tp, m.fp, m.fn);
    m.precision = r.precision;
    m.recall = r.recall;
    m.f_measure = r.f_measure;
    return m;
}

double MethodResult::mean_precision() const { return mean_of(folds, &FoldMetrics::precision); }
double MethodResult::mean_recall() const { return mean_of(folds, &FoldMetrics::recall); }
double MethodResult::mean_f_measure() const { return mean_of(folds, &FoldMetrics::f_measure); }

std::vector<double> MethodResult::f_measures() const {
    std::vector<double> out;
    out.reserve(folds.size());
    for (const auto& f : folds) out.push_back(f.f_measure);
    return out;
}

const MethodResult& ComparisonReport::method(const std::string& name) const {
    for (const auto& m : methods)
        if (m.name == name) return m;
    throw Error(ErrorCode::InvalidArgument, "no method named '" + name + "' in report");
}

ComparisonReport compare(std::vector<MethodResult> methods, double alpha) {
    if (methods.empty()) throw Error(ErrorCode::DegenerateMatrix, "nothing to compare");
    const std::size_t n_folds = methods.front().folds.size();
    for (const auto& m : methods)
        if (m.folds.size() != n_folds)
            throw Error(ErrorCode::DimensionMismatch, "method '" + m.name + "' has " + std::to_string(m.folds.size()) +
                                                          " folds, expected " + std::to_string(n_folds));

    std::vector<std::vector<double>> matrix(n_folds, std::vector<double>(methods.size()));
    for (std::size_t j = 0; j < methods.size(); ++j)
        for (std::size_t i = 0; i < n_folds; ++i) matrix[i][j] = methods[j].folds[i].f_measure;

    ComparisonReport report;
    report.alpha = alpha;
    if (methods.size() == 1) {
        report.tested = false;
        report.methods = std::move(methods);
        return report;
    }
    const auto fr = stats::friedman(matrix);
    report.friedman_statistic = fr.statistic;
    report.friedman_p = fr.p_value;

    if (report.friedman_significant()) {
        for (std::size_t a = 0; a < methods.size(); ++a)
            for (std::size_t b = a + 1; b < methods.size(); ++b) {
                PairwiseComparison pc;
                pc.method_a = methods[a].name;
                pc.method_b = methods[b].name;
                const auto fa = methods[a].f_measures();
                const auto fb = methods[b].f_measures();
                try {
                    const auto w = stats::wilcoxon_signed_rank(fa, fb);
                    pc.statistic = w.statistic;
                    pc.p_value = w.p_value;
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::TooFewPairs) throw;
                    pc.insufficient_pairs = true;
                }
                pc.significant = pc.p_value < alpha;
                report.pairwise.push_back(pc);
            }
    }
    report.methods = std::move(methods);
    return report;
}

std::string ComparisonReport::to_json() const {
    using nlohmann::ordered_json;
    ordered_json j;
    j["alpha"] = alpha;
    ordered_json ms = ordered_json::array();
    for (const auto& m : methods) {
        ordered_json jm;
        jm["name"] = m.name;
        jm["mean_precision"] = m.mean_precision();
        jm["mean_recall"] = m.mean_recall();
        jm["mean_f_measure"] = m.mean_f_measure();
        ordered_json folds = ordered_json::array();
        for (const auto& f : m.folds)
            folds.push_back({{"fold", f.fold_index},
                             {"tp", f.tp},
                             {"fp", f.fp},
                             {"fn", f.fn},
                             {"tn", f.tn},
                             {"precision", f.precision},
                             {"recall", f.recall},
                             {"f_measure", f.f_measure}});
        jm["folds"] = std::move(folds);
        ms.push_back(std::move(jm));
    }
    j["methods"] = std::move(ms);
    if (tested)
        j["friedman"] = {{"statistic", friedman_statistic}, {"p_value", friedman_p}, {"significant", friedman_significant()}};
    else
        j["friedman"] = nullptr;
    ordered_json pw = ordered_json::array();
    for (const auto& p : pairwise)
        pw.push_back({{"method_a", p.method_a},
                      {"method_b", p.method_b},
                      {"statistic", p.statistic},
                      {"p_value", p.p_value},
                      {"significant", p.significant},
                      {"insufficient_pairs", p.insufficient_pairs}});
    j["pairwise"] = std::move(pw);
    return j.dump(2) + "\n";
}

std::string ComparisonReport::to_table() const {
    std::size_t width = 6;
    for (const auto& m : methods) width = std::max(width, m.name.size());
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s  %9s  %9s  %9s\n", static_cast<int>(width), "method", "precision", "recall",
                  "f_measure");
    out << buf;
    for (const auto& m : methods) {
        std::snprintf(buf, sizeof buf, "%-*s  %9.4f  %9.4f  %9.4f\n", static_cast<int>(width), m.name.c_str(),
                      m.mean_precision(), m.mean_recall(), m.mean_f_measure());
        out << buf;
    }
    if (!tested) return out.str();
    std::snprintf(buf, sizeof buf, "\nFriedman chi2 = %.4f, p = %.4g (%s at alpha %.2f)\n", friedman_statistic,
                  friedman_p, friedman_significant() ? "significant" : "not significant", alpha);
    out << buf;
    if (!pairwise.empty()) {
        out << "\nWilcoxon signed-rank (F-measure per fold):\n";
        for (const auto& p : pairwise) {
            std::snprintf(buf, sizeof buf, "  %-*s vs %-*s  W = %8.2f  p = %.4g%s%s\n", static_cast<int>(width),
                          p.method_a.c_str(), static_cast<int>(width), p.method_b.c_str(), p.statistic, p.p_value,
                          p.significant ? "  *" : "", p.insufficient_pairs ? "  (too few differing folds)" : "");
            out << buf;
        }
    }
    return out.str();
}

void write_fold_metrics(const std::vector<MethodResult>& methods, std::ostream& out) {
    out << "method,fold,tp,fp,fn,tn,precision,recall,f_measure\n";
    for (const auto& m : methods)
        for (const auto& f : m.folds)
            out << m.name << ',' << f.fold_index << ',' << f.tp << ',' << f.fp << ',' << f.fn << ',' << f.tn << ','
                << text::format_double(f.precision) << ',' << text::format_double(f.recall) << ','
                << text::format_double(f.f_measure) << '\n';
}

std::vector<MethodResult> read_fold_metrics(std::istream& in) {
    std::vector<MethodResult> methods;
    std::map<std::string, std::size_t> index;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = text::trim(line);
        if (t.empty()) continue;
        if (line_no == 1 && t.starts_with("method,")) continue;
        auto fields = text::split(t);
        if (fields.size() != 9)
            throw Error(ErrorCode::MalformedRow, "fold metrics line " + std::to_string(line_no) + ": expected 9 columns");
        FoldMetrics f;
        auto integer = [&](std::size_t c) {
            auto v = text::parse_int(fields[c]);
            if (!v || *v < 0) throw Error(ErrorCode::MalformedRow, "fold metrics line " + std::to_string(line_no));
            return static_cast<std::size_t>(*v);
        };
        f.fold_index = integer(1);
        f.tp = integer(2);
        f.fp = integer(3);
        f.fn = integer(4);
        f.tn = integer(5);
        // metrics are recomputed from the counts rather than trusted
        const auto r = prf(f.tp, f.fp, f.fn);
        f.precision = r.precision;
        f.recall = r.recall;
        f.f_measure = r.f_measure;
        const std::string name(fields[0]);
        auto [it, inserted] = index.emplace(name, methods.size());
        if (inserted) methods.push_back(MethodResult{name, {}});
        methods[it->second].folds.push_back(f);
    }
    for (auto& m : methods)
        std::sort(m.folds.begin(), m.folds.end(),
                  [](const FoldMetrics& a, const FoldMetrics& b) { return a.fold_index < b.fold_index; });
    return methods;
}

}  // namespace ppmf::eval
