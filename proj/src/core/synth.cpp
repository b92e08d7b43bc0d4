#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <map>
#include <numeric>
#include <random>

#include "error.hpp"
#include "rng.hpp"
#include "vocabulary.hpp"

namespace ppmf::synth {
namespace {

constexpr int kBucketMinutes = 120;
constexpr std::size_t kBuckets = 24;

double variable_mean(std::size_t v) { return 20.0 + 5.0 * static_cast<double>(v); }
double variable_spread(std::size_t v) { return 2.0 + static_cast<double>(v % 5); }

double round2(double x) { return std::round(x * 100.0) / 100.0; }

// Piecewise-linear bump: zero before hour 8 and after hour 40, peak at 16.
double early_peak(double hour) {
    if (hour < 8.0 || hour >= 40.0) return 0.0;
    if (hour < 16.0) return (hour - 8.0) / 8.0;
    return (40.0 - hour) / 24.0;
}

double signal_shape(Signal signal, int label, double hour) {
    // drift: class difference lives in the latent risk multiplier
    if (signal == Signal::Drift) return hour / 48.0;
    return label == 1 ? early_peak(hour) : early_peak(48.0 - hour);
}

std::string patient_name(std::size_t i, std::size_t n) {
    const int width = std::max(5, static_cast<int>(std::to_string(n).size()));
    char buf[32];
    std::snprintf(buf, sizeof buf, "P%0*zu", width, i + 1);
    return buf;
}

}  // namespace

void SynthSpec::validate() const {
    if (n_patients < 2) throw Error(ErrorCode::BadSpec, "need at least two patients");
    if (!(prevalence > 0.0 && prevalence < 1.0)) throw Error(ErrorCode::BadSpec, "prevalence must lie in (0, 1)");
    if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw Error(ErrorCode::BadSpec, "missing_rate must lie in [0, 1)");
    if (n_informative_variables > kNumDynamic)
        throw Error(ErrorCode::BadSpec, "at most " + std::to_string(kNumDynamic) + " informative variables");
    if (!std::isfinite(effect_size) || !std::isfinite(static_effect))
        throw Error(ErrorCode::BadSpec, "effect sizes must be finite");
}

SynthCohort generate(const SynthSpec& spec) {
    spec.validate();

    Manifest manifest;
    manifest.spec = spec;

    std::vector<std::size_t> dynamic(kNumDynamic);
    std::iota(dynamic.begin(), dynamic.end(), 0);
    auto plant_eng = rng::stream(spec.seed, "synth.plant");
    rng::shuffle(dynamic, plant_eng);
    manifest.informative_variables.assign(dynamic.begin(),
                                          dynamic.begin() + static_cast<std::ptrdiff_t>(spec.n_informative_variables));
    std::sort(manifest.informative_variables.begin(), manifest.informative_variables.end());
    std::vector<bool> informative(kNumDynamic, false);
    for (auto v : manifest.informative_variables) informative[v] = true;
    if (spec.static_effect != 0.0) manifest.informative_statics.push_back(kAgeIndex);

    auto eng = rng::stream(spec.seed, "synth");
    std::normal_distribution<double> normal(0.0, 1.0);

    std::map<std::string, ingest::PatientRecord> patients;
    for (std::size_t i = 0; i < spec.n_patients; ++i) {
        PatientTruth truth;
        truth.patient_id = patient_name(i, spec.n_patients);
        truth.label = rng::uniform01(eng) < spec.prevalence ? 1 : 0;
        if (spec.signal == Signal::Drift)
            truth.latent_risk = truth.label == 1 ? 0.5 + rng::uniform01(eng) : -0.25 + 0.5 * rng::uniform01(eng);
        else
            truth.latent_risk = 0.75 + 0.5 * rng::uniform01(eng);

        ingest::PatientRecord record;
        record.label = truth.label;
        auto& events = record.events;

        const double age = 65.0 + 12.0 * normal(eng) + spec.static_effect * 12.0 * truth.label;
        const double gender = rng::uniform01(eng) < 0.55 ? 1.0 : 0.0;
        const double height = 170.0 + 10.0 * normal(eng);
        const double weight = 80.0 + 15.0 * normal(eng);
        events.push_back({truth.patient_id, 0, kAgeIndex, round2(age)});
        events.push_back({truth.patient_id, 0, kGenderIndex, gender});
        events.push_back({truth.patient_id, 0, kHeightIndex, round2(height)});
        events.push_back({truth.patient_id, 0, kWeightIndex, round2(weight)});

        for (std::size_t v = 0; v < kNumDynamic; ++v) {
            const double spread = variable_spread(v);
            const double baseline = variable_mean(v) + spread * normal(eng);
            for (std::size_t t = 0; t < kBuckets; ++t) {
                ++manifest.total_cells;
                if (rng::uniform01(eng) < spec.missing_rate) {
                    ++manifest.dropped_cells;
                    continue;
                }
                const auto n_obs = 1 + rng::below(eng, 3);
                for (std::uint64_t o = 0; o < n_obs; ++o) {
                    const int minute = static_cast<int>(t) * kBucketMinutes +
                                       static_cast<int>(rng::below(eng, kBucketMinutes));
                    double value = baseline + 0.3 * spread * normal(eng);
                    if (informative[v])
                        value += truth.latent_risk * spec.effect_size * spread *
                                 signal_shape(spec.signal, truth.label, minute / 60.0);
                    events.push_back({truth.patient_id, minute, v, round2(value)});
                }
            }
        }
        std::stable_sort(events.begin(), events.end(), [](const ingest::Event& a, const ingest::Event& b) {
            return a.minute != b.minute ? a.minute < b.minute : a.variable < b.variable;
        });
        patients.emplace(truth.patient_id, std::move(record));
        manifest.patients.push_back(std::move(truth));
    }
    return {ingest::RawCohort(std::move(patients)), std::move(manifest)};
}

std::string Manifest::to_json() const {
    using nlohmann::ordered_json;
    ordered_json j;
    j["seed"] = spec.seed;
    j["n_patients"] = spec.n_patients;
    j["prevalence"] = spec.prevalence;
    j["missing_rate"] = spec.missing_rate;
    j["effect_size"] = spec.effect_size;
    j["static_effect"] = spec.static_effect;
    j["signal"] = to_string(spec.signal);
    ordered_json inf = ordered_json::array();
    for (auto v : informative_variables) inf.push_back(std::string(kVariableNames[v]));
    j["informative_variables"] = std::move(inf);
    ordered_json inf_static = ordered_json::array();
    for (auto v : informative_statics) inf_static.push_back(std::string(kVariableNames[v]));
    j["informative_statics"] = std::move(inf_static);
    j["dropped_cells"] = dropped_cells;
    j["total_cells"] = total_cells;
    ordered_json ps = ordered_json::array();
    for (const auto& p : patients)
        ps.push_back({{"patient_id", p.patient_id}, {"label", p.label}, {"latent_risk", p.latent_risk}});
    j["patients"] = std::move(ps);
    return j.dump(2) + "\n";
}

const char* to_string(Signal s) { return s == Signal::Drift ? "drift" : "mirror"; }

Signal parse_signal(const std::string& s) {
    if (s == "drift") return Signal::Drift;
    if (s == "mirror") return Signal::Mirror;
    throw Error(ErrorCode::BadSpec, "unknown signal '" + s + "'");
}

}  // namespace ppmf::synth
