#include "weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "text.hpp"

namespace ppmf::weights {
namespace {

void require_trainable(const Dataset& train, std::size_t k) {
    if (k == 0) throw Error(ErrorCode::KTooLarge, "k must be positive");
    if (train.size() < k + 1)
        throw Error(ErrorCode::KTooLarge, "leave-one-out with k=" + std::to_string(k) + " needs " +
                                              std::to_string(k + 1) + " patients, have " +
                                              std::to_string(train.size()));
}

void require_both_classes(const Dataset& train) {
    const std::size_t pos = train.count_positive();
    if (pos == 0 || pos == train.size())
        throw Error(ErrorCode::SingleClassCohort, "training data contains a single class");
}

struct PatientTerm {
    double error = 0.0;
    knn::VariableDistances gradient{};
};

PatientTerm patient_term(const knn::PairwiseDistances& pairs, std::size_t i, const FeatureWeights& weights,
                         std::size_t k, bool with_gradient) {
    const Dataset& data = pairs.data();
    std::vector<knn::Candidate> candidates;
    candidates.reserve(data.size() - 1);
    for (std::size_t j = 0; j < data.size(); ++j)
        if (j != i) candidates.push_back({pairs.weighted(i, j, weights), j});
    knn::select_nearest(candidates, k, data);

    const double shift = candidates.front().distance_sq;
    std::vector<double> sim(candidates.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t n = 0; n < candidates.size(); ++n) {
        sim[n] = std::exp(-(candidates[n].distance_sq - shift));
        num += sim[n] * data.label(candidates[n].index);
        den += sim[n];
    }
    const double p = num / den;
    const double residual = data.label(i) - p;

    PatientTerm term;
    term.error = 2.0 * residual * residual;
    if (!with_gradient || residual == 0.0) return term;

    // dp/dw_v = -sum_n D_v(i,n) s_n (y_n - p) / S ; dE_i/dw_v = -4 (y_i - p) dp/dw_v
    for (std::size_t n = 0; n < candidates.size(); ++n) {
        const double coef = sim[n] * (data.label(candidates[n].index) - p) / den;
        if (coef == 0.0) continue;
        const auto d = pairs.get(i, candidates[n].index);
        for (std::size_t v = 0; v < kNumVariables; ++v) term.gradient[v] += d[v] * coef;
    }
    for (auto& g : term.gradient) g *= 4.0 * residual;
    return term;
}

ErrorAndGradient evaluate_impl(const knn::PairwiseDistances& pairs, const FeatureWeights& weights, std::size_t k,
                               std::size_t workers, bool with_gradient) {
    const Dataset& data = pairs.data();
    require_trainable(data, k);
    std::vector<PatientTerm> terms(data.size());
    parallel_for(data.size(), workers,
                 [&](std::size_t i) { terms[i] = patient_term(pairs, i, weights, k, with_gradient); });

    // fixed reduction order: training rows are kept in patient-id order
    ErrorAndGradient out;
    for (const auto& t : terms) {
        out.error += t.error;
        for (std::size_t v = 0; v < kNumVariables; ++v) out.gradient[v] += t.gradient[v];
    }
    return out;
}

double entropy_bits(double a, double b) {
    const double n = a + b;
    double h = 0.0;
    for (double c : {a, b})
        if (c > 0.0) h -= (c / n) * std::log2(c / n);
    return h;
}

double gini_impurity(double a, double b) {
    const double n = a + b;
    return 1.0 - (a / n) * (a / n) - (b / n) * (b / n);
}

}  // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw Error(ErrorCode::BadConfig, "learning_rate must be positive");
    if (max_epochs == 0) throw Error(ErrorCode::BadConfig, "max_epochs must be positive");
    if (!(min_relative_improvement > 0.0)) throw Error(ErrorCode::BadConfig, "min_relative_improvement must be positive");
    if (patience == 0) throw Error(ErrorCode::BadConfig, "patience must be positive");
    if (k == 0) throw Error(ErrorCode::BadConfig, "k must be positive");
    initial_weights.validate();
}

std::string weight_hash(const FeatureWeights& weights) {
    std::string bytes(sizeof(double) * kNumVariables, '\0');
    std::memcpy(bytes.data(), weights.w.data(), bytes.size());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng::fnv1a(bytes)));
    return buf;
}

ErrorAndGradient evaluate(const knn::PairwiseDistances& pairs, const FeatureWeights& weights, std::size_t k,
                          std::size_t workers) {
    return evaluate_impl(pairs, weights, k, workers, true);
}

double training_error(const Dataset& train, const FeatureWeights& weights, std::size_t k, std::size_t workers) {
    require_trainable(train, k);
    knn::PairwiseDistances pairs(train, workers, 0);
    return evaluate_impl(pairs, weights, k, workers, false).error;
}

FeatureWeights gradient(const Dataset& train, const FeatureWeights& weights, std::size_t k, std::size_t workers) {
    require_trainable(train, k);
    knn::PairwiseDistances pairs(train, workers, 0);
    auto g = evaluate_impl(pairs, weights, k, workers, true).gradient;
    return FeatureWeights{g};
}

TrainResult train_gd(const Dataset& train, const TrainConfig& config) {
    config.validate();
    require_trainable(train, config.k);
    require_both_classes(train);

    knn::PairwiseDistances pairs(train, config.workers);

    FeatureWeights w = config.initial_weights;
    for (std::size_t v = 0; v < kNumVariables; ++v)
        if (!config.active[v]) w[v] = 0.0;

    TrainResult result;
    TrainTrace& trace = result.trace;
    auto record = [&](double error) {
        trace.errors.push_back(error);
        trace.weight_hashes.push_back(weight_hash(w));
    };

    auto current = evaluate(pairs, w, config.k, config.workers);
    record(current.error);
    double best = current.error;
    result.weights = w;
    trace.best_errors.push_back(best);

    std::size_t stalled = 0;
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        for (std::size_t v = 0; v < kNumVariables; ++v)
            if (config.active[v]) w[v] = std::max(0.0, w[v] - config.learning_rate * current.gradient[v]);

        current = evaluate(pairs, w, config.k, config.workers);
        record(current.error);
        trace.epochs_run = epoch;

        const double improvement = best > 0.0 ? (best - current.error) / best : 0.0;
        if (current.error < best) {
            best = current.error;
            result.weights = w;
            trace.best_epoch = epoch;
        }
        trace.best_errors.push_back(best);

        stalled = improvement < config.min_relative_improvement ? stalled + 1 : 0;
        if (stalled >= config.patience) {
            trace.stop_reason = StopReason::Converged;
            break;
        }
    }
    return result;
}

// --- filters -------------------------------------------------------------------

double chi_square(const Contingency& table) {
    double n = 0.0;
    std::array<double, 2> col{0.0, 0.0};
    for (const auto& row : table) {
        col[0] += row[0];
        col[1] += row[1];
    }
    n = col[0] + col[1];
    if (n == 0.0) return 0.0;
    double chi = 0.0;
    for (const auto& row : table) {
        const double r = row[0] + row[1];
        for (std::size_t c = 0; c < 2; ++c) {
            const double expected = r * col[c] / n;
            if (expected > 0.0) chi += (row[c] - expected) * (row[c] - expected) / expected;
        }
    }
    return chi;
}

double information_gain(const Contingency& table) {
    double neg = 0.0, pos = 0.0;
    for (const auto& row : table) {
        neg += row[0];
        pos += row[1];
    }
    const double n = neg + pos;
    if (n == 0.0) return 0.0;
    double conditional = 0.0;
    for (const auto& row : table) {
        const double r = row[0] + row[1];
        if (r > 0.0) conditional += (r / n) * entropy_bits(row[0], row[1]);
    }
    return std::max(0.0, entropy_bits(neg, pos) - conditional);
}

double gini_reduction(const Contingency& table) {
    double neg = 0.0, pos = 0.0;
    for (const auto& row : table) {
        neg += row[0];
        pos += row[1];
    }
    const double n = neg + pos;
    if (n == 0.0) return 0.0;
    double conditional = 0.0;
    for (const auto& row : table) {
        const double r = row[0] + row[1];
        if (r > 0.0) conditional += (r / n) * gini_impurity(row[0], row[1]);
    }
    return std::max(0.0, gini_impurity(neg, pos) - conditional);
}

std::vector<std::size_t> equal_frequency_bins(const std::vector<double>& values, std::size_t bins) {
    if (bins == 0) throw Error(ErrorCode::BadConfig, "bin count must be positive");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> cuts;
    for (std::size_t b = 1; b < bins && !sorted.empty(); ++b) cuts.push_back(sorted[b * sorted.size() / bins]);

    std::vector<std::size_t> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), values[i]) - cuts.begin());
    return out;
}

Contingency contingency(const std::vector<std::size_t>& bins, const std::vector<int>& labels, std::size_t n_bins) {
    Contingency table(n_bins, {0.0, 0.0});
    for (std::size_t i = 0; i < bins.size(); ++i) table.at(bins[i])[labels[i] == 1 ? 1 : 0] += 1.0;
    return table;
}

std::array<double, kNumVariables> filter_scores(const Dataset& train, FilterMethod method) {
    require_both_classes(train);
    constexpr std::size_t kBins = 10;
    std::vector<int> labels(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) labels[i] = train.label(i);

    std::array<double, kNumVariables> scores{};
    std::vector<double> summary(train.size());
    for (std::size_t v = 0; v < kNumVariables; ++v) {
        const std::size_t off = train.offset(v);
        const std::size_t width = train.width(v);
        for (std::size_t i = 0; i < train.size(); ++i) {
            const auto row = train.row(i);
            double sum = 0.0;
            for (std::size_t c = off; c < off + width; ++c) sum += row[c];
            summary[i] = sum / static_cast<double>(width);
        }
        const auto table = contingency(equal_frequency_bins(summary, kBins), labels, kBins);
        switch (method) {
            case FilterMethod::ChiSquare: scores[v] = chi_square(table); break;
            case FilterMethod::InformationGain: scores[v] = information_gain(table); break;
            case FilterMethod::Gini: scores[v] = gini_reduction(table); break;
        }
    }
    return scores;
}

FeatureWeights filter_weights(const Dataset& train, FilterMethod method, const ActiveSet& active) {
    const auto scores = filter_scores(train, method);
    double total = 0.0;
    std::size_t n_active = 0;
    for (std::size_t v = 0; v < kNumVariables; ++v)
        if (active[v]) {
            total += scores[v];
            ++n_active;
        }
    FeatureWeights w;
    for (std::size_t v = 0; v < kNumVariables; ++v) {
        if (!active[v]) continue;
        w[v] = total > 0.0 ? scores[v] * static_cast<double>(n_active) / total : 1.0;
    }
    return w;
}

// --- files -------------------------------------------------------------------------

LoadedWeights load_weights(std::istream& in) {
    LoadedWeights out;
    std::array<bool, kNumVariables> listed{};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (line_no == 1 && t == "variable,weight") continue;
        auto fields = text::split(t);
        if (fields.size() != 2)
            throw Error(ErrorCode::MalformedRow, "weights line " + std::to_string(line_no) + ": expected 2 columns");
        auto v = variable_index(fields[0]);
        if (!v) throw Error(ErrorCode::UnknownVariable, std::string(fields[0]));
        auto value = text::parse_double(fields[1]);
        if (!value) throw Error(ErrorCode::MalformedRow, "weights line " + std::to_string(line_no) + ": bad weight");
        if (*value < 0.0) throw Error(ErrorCode::NegativeWeight, std::string(fields[0]) + " = " + std::string(fields[1]));
        if (listed[*v]) throw Error(ErrorCode::MalformedRow, "variable listed twice: " + std::string(fields[0]));
        listed[*v] = true;
        out.weights[*v] = *value;
    }
    for (std::size_t v = 0; v < kNumVariables; ++v)
        if (!listed[v]) out.warnings.push_back(std::string(kVariableNames[v]) + " not listed; weight set to 0");
    return out;
}

void write_weights(const FeatureWeights& weights, std::ostream& out) {
    out << "variable,weight\n";
    for (std::size_t v = 0; v < kNumVariables; ++v)
        out << kVariableNames[v] << ',' << text::format_double(weights[v]) << '\n';
}

void write_trace(const TrainTrace& trace, std::ostream& out) {
    out << "epoch,error\n";
    for (std::size_t e = 0; e < trace.errors.size(); ++e) out << e << ',' << text::format_double(trace.errors[e]) << '\n';
}

const char* to_string(FilterMethod m) {
    switch (m) {
        case FilterMethod::ChiSquare: return "chi2";
        case FilterMethod::InformationGain: return "infogain";
        case FilterMethod::Gini: return "gini";
    }
    return "?";
}

const char* to_string(StopReason r) { return r == StopReason::Converged ? "converged" : "max_epochs"; }

}  // namespace ppmf::weights
