#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ppmf::ingest {

inline constexpr int kHorizonMinutes = 48 * 60;

struct Event {
    std::string patient_id;
    int minute = 0;             // since ICU admission, in [0, 2880)
    std::size_t variable = 0;   // index into kVariableNames
    double value = 0.0;

    friend bool operator==(const Event&, const Event&) = default;
};

struct Outcome {
    std::string patient_id;
    int in_hospital_death = 0;

    friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct EventParseResult {
    std::vector<Event> events;
    /// Rows carrying the -1 "not measured" placeholder; dropped, not errors.
    std::size_t dropped_placeholders = 0;
};

/// Reads `patient_id,minute,variable,value` rows. A leading header line is
/// skipped. Gender accepts 0/1 or M/F and is stored as 0 (female) / 1 (male).
EventParseResult parse_events(std::istream& in);

/// Reads `patient_id,in_hospital_death` rows.
std::vector<Outcome> parse_outcomes(std::istream& in);

struct PatientRecord {
    int label = 0;
    std::vector<Event> events;  // sorted by (minute, variable)

    friend bool operator==(const PatientRecord&, const PatientRecord&) = default;
};

/// Joined events and outcomes. Immutable once built; iteration order is by
/// patient id.
class RawCohort {
public:
    RawCohort() = default;
    explicit RawCohort(std::map<std::string, PatientRecord> patients);

    const std::map<std::string, PatientRecord>& patients() const noexcept { return patients_; }
    std::size_t size() const noexcept { return patients_.size(); }
    std::size_t positives() const noexcept { return positives_; }
    double prevalence() const noexcept;

    friend bool operator==(const RawCohort& a, const RawCohort& b) { return a.patients_ == b.patients_; }

private:
    std::map<std::string, PatientRecord> patients_;
    std::size_t positives_ = 0;
};

RawCohort build_cohort(std::vector<Event> events, const std::vector<Outcome>& outcomes);

void write_events(const RawCohort& cohort, std::ostream& out);
void write_outcomes(const RawCohort& cohort, std::ostream& out);

/// Convenience: parse both files from disk and join them.
struct LoadedCohort {
    RawCohort cohort;
    std::size_t dropped_placeholders = 0;
};
LoadedCohort load_cohort(const std::string& events_path, const std::string& outcomes_path);

}  // namespace ppmf::ingest
