#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ingest.hpp"

namespace ppmf::synth {

/// How informative dynamic variables depend on the label.
///  drift:  positives drift upward over the 48 hours, negatives stay flat.
///  mirror: both classes rise from and return to baseline; positives peak at
///          hour 16, negatives at hour 32 (time-reversed shapes), so min, max,
///          median, first, last and count carry no class information.
enum class Signal { Drift, Mirror };

struct SynthSpec {
    std::size_t n_patients = 1000;
    double prevalence = 0.18;
    std::size_t n_informative_variables = 2;
    double missing_rate = 0.28;
    /// Signal amplitude in units of the variable's between-patient spread.
    double effect_size = 3.0;
    /// Age shift for positives in the same units; 0 makes statics pure noise.
    double static_effect = 1.0;
    Signal signal = Signal::Drift;
    std::uint64_t seed = 0;

    void validate() const;
};

struct PatientTruth {
    std::string patient_id;
    int label = 0;
    double latent_risk = 0.0;
};

struct Manifest {
    SynthSpec spec;
    std::vector<std::size_t> informative_variables;  // dynamic indices, ascending
    std::vector<std::size_t> informative_statics;    // variable indices
    std::size_t dropped_cells = 0;                   // (patient, variable, 2h bucket) cells left empty
    std::size_t total_cells = 0;
    std::vector<PatientTruth> patients;

    double drop_fraction() const {
        return total_cells == 0 ? 0.0 : static_cast<double>(dropped_cells) / static_cast<double>(total_cells);
    }
    std::string to_json() const;
};

struct SynthCohort {
    ingest::RawCohort cohort;
    Manifest manifest;
};

/// Irregularly sampled cohort: every (variable, 2-hour bucket) cell is left
/// empty with probability missing_rate, otherwise it receives 1-3
/// observations at uniform minutes inside the bucket. Noise variables are
/// label-independent.
SynthCohort generate(const SynthSpec& spec);

const char* to_string(Signal s);
Signal parse_signal(const std::string& s);

}  // namespace ppmf::synth
