#include "ingest.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include "error.hpp"
#include "text.hpp"
#include "vocabulary.hpp"

namespace ppmf::ingest {
namespace {

std::string at_line(std::size_t line_no) { return "line " + std::to_string(line_no); }

bool looks_like_header(std::string_view line) { return text::trim(line).starts_with("patient_id"); }

std::optional<double> parse_gender(std::string_view s) {
    if (s == "M" || s == "m" || s == "male" || s == "Male") return 1.0;
    if (s == "F" || s == "f" || s == "female" || s == "Female") return 0.0;
    return text::parse_double(s);
}

}  // namespace

EventParseResult parse_events(std::istream& in) {
    EventParseResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        if (line_no == 1 && looks_like_header(line)) continue;

        auto fields = text::split(line);
        if (fields.size() != 4 || fields[0].empty())
            throw Error(ErrorCode::MalformedRow, at_line(line_no) + ": expected 4 columns");

        auto minute = text::parse_int(fields[1]);
        if (!minute) throw Error(ErrorCode::MalformedRow, at_line(line_no) + ": non-integer minute");

        auto variable = variable_index(fields[2]);
        if (!variable) throw Error(ErrorCode::UnknownVariable, std::string(fields[2]));

        auto value = *variable == kGenderIndex ? parse_gender(fields[3]) : text::parse_double(fields[3]);
        if (!value) throw Error(ErrorCode::MalformedRow, at_line(line_no) + ": non-numeric value");

        if (*minute < 0 || *minute >= kHorizonMinutes)
            throw Error(ErrorCode::OutOfWindow, std::to_string(*minute) + " at " + at_line(line_no));

        if (*value == -1.0) {
            ++result.dropped_placeholders;
            continue;
        }
        if (*variable == kGenderIndex && *value != 0.0 && *value != 1.0)
            throw Error(ErrorCode::MalformedRow, at_line(line_no) + ": gender must be 0/1 or M/F");

        result.events.push_back(Event{std::string(fields[0]), static_cast<int>(*minute), *variable, *value});
    }
    return result;
}

std::vector<Outcome> parse_outcomes(std::istream& in) {
    std::vector<Outcome> outcomes;
    std::set<std::string, std::less<>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        if (line_no == 1 && looks_like_header(line)) continue;

        auto fields = text::split(line);
        if (fields.size() != 2 || fields[0].empty())
            throw Error(ErrorCode::MalformedRow, at_line(line_no) + ": expected 2 columns");
        auto label = text::parse_int(fields[1]);
        if (!label) throw Error(ErrorCode::MalformedRow, at_line(line_no) + ": non-integer label");
        if (*label != 0 && *label != 1) throw Error(ErrorCode::InvalidLabel, std::string(fields[1]));
        if (!seen.emplace(fields[0]).second) throw Error(ErrorCode::DuplicatePatient, std::string(fields[0]));

        outcomes.push_back(Outcome{std::string(fields[0]), static_cast<int>(*label)});
    }
    return outcomes;
}

RawCohort::RawCohort(std::map<std::string, PatientRecord> patients) : patients_(std::move(patients)) {
    for (const auto& [id, record] : patients_) positives_ += record.label == 1 ? 1 : 0;
}

double RawCohort::prevalence() const noexcept {
    return patients_.empty() ? 0.0 : static_cast<double>(positives_) / static_cast<double>(patients_.size());
}

RawCohort build_cohort(std::vector<Event> events, const std::vector<Outcome>& outcomes) {
    std::map<std::string, PatientRecord> patients;
    for (const auto& o : outcomes) {
        auto [it, inserted] = patients.emplace(o.patient_id, PatientRecord{o.in_hospital_death, {}});
        if (!inserted) throw Error(ErrorCode::DuplicatePatient, o.patient_id);
    }
    for (auto& e : events) {
        auto it = patients.find(e.patient_id);
        if (it == patients.end()) throw Error(ErrorCode::MissingOutcome, e.patient_id);
        it->second.events.push_back(std::move(e));
    }
    for (auto& [id, record] : patients) {
        if (record.events.empty()) throw Error(ErrorCode::MissingEvents, id);
        std::stable_sort(record.events.begin(), record.events.end(), [](const Event& a, const Event& b) {
            return a.minute != b.minute ? a.minute < b.minute : a.variable < b.variable;
        });
    }
    return RawCohort(std::move(patients));
}

void write_events(const RawCohort& cohort, std::ostream& out) {
    out << "patient_id,minute,variable,value\n";
    for (const auto& [id, record] : cohort.patients())
        for (const auto& e : record.events)
            out << id << ',' << e.minute << ',' << kVariableNames[e.variable] << ',' << text::format_double(e.value)
                << '\n';
}

void write_outcomes(const RawCohort& cohort, std::ostream& out) {
    out << "patient_id,in_hospital_death\n";
    for (const auto& [id, record] : cohort.patients()) out << id << ',' << record.label << '\n';
}

LoadedCohort load_cohort(const std::string& events_path, const std::string& outcomes_path) {
    auto events_in = text::open_in(events_path);
    auto parsed = parse_events(events_in);
    auto outcomes_in = text::open_in(outcomes_path);
    auto outcomes = parse_outcomes(outcomes_in);
    return LoadedCohort{build_cohort(std::move(parsed.events), outcomes), parsed.dropped_placeholders};
}

}  // namespace ppmf::ingest
