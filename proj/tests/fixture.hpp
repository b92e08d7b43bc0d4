#pragma once

// Three hand-built patients with hand-computed frames. Only Heart rate and
// Temperature carry dynamic data; every other dynamic variable is never
// observed and therefore degenerate (0.5 everywhere after scaling).
//
//   P1 (died)  HR 80@10, 90@50 -> b0 = 85; HR 100@130 -> b1; Temp 37@0 -> b0
//              Age 70, Gender M
//   P2         HR 60@240 -> b2; HR 70@2879 -> b23; Temp 38@125, 39@200 -> b1 = 38.5
//              Age 50, Gender F
//   P3         Temp 36@1500 -> b12; Age 60, Gender M, Height 180, Weight 90
//
// Fitted on all three:
//   HR   min 60, max 100; bucket means b0 85, b1 100, b2 60, b23 70,
//        elsewhere the variable mean (85+100+60+70)/4 = 78.75
//   Temp min 36, max 38.5; bucket means b0 37, b1 38.5, b12 36,
//        elsewhere (37+38.5+36)/3
//   Age  50..70; Gender 0..1; Height and Weight seen once -> degenerate

#include <cmath>
#include <string>
#include <vector>

#include "framing.hpp"
#include "ingest.hpp"
#include "vocabulary.hpp"

namespace fixture {

inline std::size_t hr() { return *ppmf::variable_index("Heart rate"); }
inline std::size_t temp() { return *ppmf::variable_index("Temperature"); }

inline ppmf::ingest::RawCohort cohort() {
    using ppmf::ingest::Event;
    auto v = [](const char* name) { return *ppmf::variable_index(name); };
    std::vector<Event> events = {
        {"P1", 10, v("Heart rate"), 80},  {"P1", 50, v("Heart rate"), 90},  {"P1", 130, v("Heart rate"), 100},
        {"P1", 0, v("Temperature"), 37},  {"P1", 0, v("Age"), 70},          {"P1", 0, v("Gender"), 1},
        {"P2", 240, v("Heart rate"), 60}, {"P2", 2879, v("Heart rate"), 70}, {"P2", 125, v("Temperature"), 38},
        {"P2", 200, v("Temperature"), 39}, {"P2", 0, v("Age"), 50},         {"P2", 0, v("Gender"), 0},
        {"P3", 1500, v("Temperature"), 36}, {"P3", 0, v("Age"), 60},        {"P3", 0, v("Gender"), 1},
        {"P3", 0, v("Height"), 180},      {"P3", 0, v("Weight"), 90},
    };
    return ppmf::ingest::build_cohort(events, {{"P1", 1}, {"P2", 0}, {"P3", 0}});
}

struct Expected {
    // raw (pre-imputation) cells: NaN = unobserved
    std::vector<double> hr_raw, temp_raw;
    // imputed and scaled
    std::vector<double> hr, temp;
    std::vector<double> statics;
};

inline std::vector<double> fill(double x) { return std::vector<double>(24, x); }

inline std::vector<Expected> expected() {
    const double nan = std::nan("");
    const double temp_mean = (37.0 + 38.5 + 36.0) / 3.0;
    const double temp_mean_scaled = (temp_mean - 36.0) / 2.5;
    std::vector<Expected> e(3);

    // P1
    e[0].hr_raw = fill(nan);
    e[0].hr_raw[0] = 85;
    e[0].hr_raw[1] = 100;
    e[0].temp_raw = fill(nan);
    e[0].temp_raw[0] = 37;
    e[0].hr = fill(1.0);  // LOCF of 100 after bucket 1
    e[0].hr[0] = 0.625;
    e[0].temp = fill(0.4);
    e[0].statics = {1.0, 1.0, 0.5, 0.5};

    // P2
    e[1].hr_raw = fill(nan);
    e[1].hr_raw[2] = 60;
    e[1].hr_raw[23] = 70;
    e[1].temp_raw = fill(nan);
    e[1].temp_raw[1] = 38.5;
    e[1].hr = fill(0.0);
    e[1].hr[0] = 0.625;  // leading gap: bucket mean 85
    e[1].hr[1] = 1.0;    // leading gap: bucket mean 100
    e[1].hr[23] = 0.25;
    e[1].temp = fill(1.0);
    e[1].temp[0] = 0.4;
    e[1].statics = {0.0, 0.0, 0.5, 0.5};

    // P3: HR never observed -> training bucket means throughout
    e[2].hr_raw = fill(nan);
    e[2].temp_raw = fill(nan);
    e[2].temp_raw[12] = 36;
    e[2].hr = fill(0.46875);
    e[2].hr[0] = 0.625;
    e[2].hr[1] = 1.0;
    e[2].hr[2] = 0.0;
    e[2].hr[23] = 0.25;
    e[2].temp = fill(0.0);
    e[2].temp[0] = 0.4;
    e[2].temp[1] = 1.0;
    for (int t = 2; t < 12; ++t) e[2].temp[t] = temp_mean_scaled;
    e[2].statics = {0.5, 1.0, 0.5, 0.5};
    return e;
}

inline bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

/// Compares raw frames, masks, imputed+scaled frames against the hand values.
/// Returns a description of every mismatch.
inline std::vector<std::string> check() {
    using namespace ppmf;
    std::vector<std::string> bad;
    const auto raw = framing::bucketize_cohort(cohort());
    const auto stats = framing::fit_scaling(raw);
    const auto exp = expected();
    if (raw.size() != 3) return {"expected 3 frames"};
    for (std::size_t p = 0; p < 3; ++p) {
        const auto dense = framing::impute_and_scale(raw[p], stats);
        const auto& id = raw[p].patient_id;
        for (std::size_t t = 0; t < 24; ++t) {
            auto cmp = [&](const char* what, double got, double want) {
                if (!same(got, want))
                    bad.push_back(id + " " + what + "[" + std::to_string(t) + "] = " + std::to_string(got) +
                                  ", want " + std::to_string(want));
            };
            cmp("HR raw", raw[p].cell(fixture::hr(), t), exp[p].hr_raw[t]);
            cmp("Temp raw", raw[p].cell(fixture::temp(), t), exp[p].temp_raw[t]);
            cmp("HR mask", raw[p].observed(fixture::hr(), t), !std::isnan(exp[p].hr_raw[t]));
            cmp("Temp mask", raw[p].observed(fixture::temp(), t), !std::isnan(exp[p].temp_raw[t]));
            cmp("HR mask kept", dense.observed(fixture::hr(), t), !std::isnan(exp[p].hr_raw[t]));
            cmp("HR", dense.cell(fixture::hr(), t), exp[p].hr[t]);
            cmp("Temp", dense.cell(fixture::temp(), t), exp[p].temp[t]);
            for (std::size_t v = 0; v < kNumDynamic; ++v) {
                if (v == fixture::hr() || v == fixture::temp()) continue;
                if (raw[p].observed(v, t)) bad.push_back(id + " unexpected observation");
                if (dense.cell(v, t) != 0.5) bad.push_back(id + " never-observed variable not 0.5");
            }
        }
        for (std::size_t j = 0; j < kNumStatic; ++j)
            if (dense.statics[j] != exp[p].statics[j])
                bad.push_back(id + " static " + std::string(kVariableNames[kNumDynamic + j]) + " = " +
                              std::to_string(dense.statics[j]) + ", want " + std::to_string(exp[p].statics[j]));
    }
    // sparsity: 7 observed cells of 3 * 36 * 24
    if (framing::sparsity(raw) != (3.0 * 36.0 * 24.0 - 7.0) / (3.0 * 36.0 * 24.0)) bad.push_back("fixture sparsity");
    return bad;
}

}  // namespace fixture
