#include "vocabulary.hpp"

#include <algorithm>

#include "error.hpp"

namespace ppmf {

const std::array<std::string_view, kNumVariables> kVariableNames = {
    "Invasive (diastolic)",
    "Invasive (mean)",
    "Invasive (systolic)",
    "Non-invasive (diastolic)",
    "Non-invasive (mean)",
    "Non-invasive (systolic)",
    "Albumin",
    "ALP (Alkaline phosphatase)",
    "ALT (Alkaline transaminase)",
    "AST (Aspartate transaminase)",
    "Bilirubin",
    "BUN (Blood urea nitrogen)",
    "Cholesterol",
    "Creatinine",
    "FiO2 (Fractional inspired oxygen)",
    "Glasgow Coma Score (GCS)",
    "Glucose",
    "HCO3 (Serum bicarbonate)",
    "HCT (Hematocrit)",
    "Heart rate",
    "K (Serum potassium)",
    "Lactate",
    "Mg (Serum magnesium)",
    "Mechanical ventilation",
    "Na (Serum sodium)",
    "PaCO2",
    "PaO2",
    "pH",
    "Platelets",
    "Respiration rate",
    "SaO2",
    "Temperature",
    "Troponin-I",
    "Troponin-T",
    "Urine output",
    "WBC (White blood cell count)",
    "Age",
    "Gender",
    "Height",
    "Weight",
};

std::optional<std::size_t> variable_index(std::string_view name) noexcept {
    auto it = std::find(kVariableNames.begin(), kVariableNames.end(), name);
    if (it == kVariableNames.end()) return std::nullopt;
    return static_cast<std::size_t>(it - kVariableNames.begin());
}

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::UnknownVariable: return "UnknownVariable";
        case ErrorCode::OutOfWindow: return "OutOfWindow";
        case ErrorCode::DuplicatePatient: return "DuplicatePatient";
        case ErrorCode::InvalidLabel: return "InvalidLabel";
        case ErrorCode::MissingOutcome: return "MissingOutcome";
        case ErrorCode::MissingEvents: return "MissingEvents";
        case ErrorCode::BadConfig: return "BadConfig";
        case ErrorCode::EmptyCohort: return "EmptyCohort";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::KTooLarge: return "KTooLarge";
        case ErrorCode::SingleClassCohort: return "SingleClassCohort";
        case ErrorCode::NegativeWeight: return "NegativeWeight";
        case ErrorCode::TooFewPerClass: return "TooFewPerClass";
        case ErrorCode::TooFewPairs: return "TooFewPairs";
        case ErrorCode::DegenerateMatrix: return "DegenerateMatrix";
        case ErrorCode::BadSpec: return "BadSpec";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "IoError";
    }
    return "UnknownError";
}

}  // namespace ppmf
