#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "ingest.hpp"
#include "vocabulary.hpp"

namespace ppmf::framing {

struct FrameLayout {
    int window_hours = 2;
    int horizon_hours = 48;

    /// Throws BadConfig unless both are positive and the horizon is a whole
    /// number of windows.
    void validate() const;
    std::size_t buckets() const { return static_cast<std::size_t>(horizon_hours / window_hours); }
    int window_minutes() const { return window_hours * 60; }
};

/// One patient on the fixed time grid. Before imputation unobserved cells are
/// NaN; `mask` records which cells had at least one observation and is never
/// changed afterwards.
struct FramedPatient {
    std::string patient_id;
    int label = 0;
    std::size_t buckets = 0;
    std::vector<double> dynamic;          // kNumDynamic x buckets, variable-major
    std::vector<std::uint8_t> mask;       // same shape
    std::array<double, kNumStatic> statics{};
    std::array<std::uint8_t, kNumStatic> static_mask{};

    double& cell(std::size_t variable, std::size_t bucket) { return dynamic[variable * buckets + bucket]; }
    double cell(std::size_t variable, std::size_t bucket) const { return dynamic[variable * buckets + bucket]; }
    bool observed(std::size_t variable, std::size_t bucket) const { return mask[variable * buckets + bucket] != 0; }
};

/// Two-hour (by default) bucket means. Bucket t covers minutes
/// [t*window, (t+1)*window). Statics take their earliest observation.
FramedPatient bucketize(const std::string& patient_id, const ingest::PatientRecord& record,
                        const FrameLayout& layout = {});

std::vector<FramedPatient> bucketize_cohort(const ingest::RawCohort& cohort, const FrameLayout& layout = {},
                                            std::size_t workers = 1);

/// Fraction of dynamic cells with no observation. Throws EmptyCohort.
double sparsity(std::span<const FramedPatient> frames);

/// Training-split statistics shared by the time-series and aggregate paths
/// for the four static variables.
struct StaticStats {
    std::array<double, kNumStatic> min{};
    std::array<double, kNumStatic> max{};
    std::array<double, kNumStatic> mean{};
    std::array<bool, kNumStatic> degenerate{};
    friend bool operator==(const StaticStats&, const StaticStats&) = default;
};

struct ScalingStats {
    std::size_t buckets = 0;
    std::array<double, kNumDynamic> min{};
    std::array<double, kNumDynamic> max{};
    std::array<bool, kNumDynamic> degenerate{};
    std::vector<double> bucket_mean;  // kNumDynamic x buckets
    StaticStats statics;

    void write(std::ostream& out) const;
    static ScalingStats read(std::istream& in);
    friend bool operator==(const ScalingStats&, const ScalingStats&) = default;
};

/// Min/max over observed cells only, per-(variable, bucket) training means.
/// A variable that is constant or never observed is flagged degenerate.
/// Requires at least two patients (EmptyCohort otherwise).
ScalingStats fit_scaling(std::span<const FramedPatient> training);

/// Carry the last observation forward along the buckets, fill leading gaps
/// with the training bucket mean, then min-max scale with clamping. Degenerate
/// variables become 0.5. The mask is carried over untouched.
FramedPatient impute_and_scale(const FramedPatient& frame, const ScalingStats& stats);

// ---------------------------------------------------------------------------
// Aggregate representation

enum class Aggregate : std::size_t { Min = 0, Max, Median, First, Last, Count };
inline constexpr std::size_t kNumAggregates = 6;

struct AggregatedPatient {
    std::string patient_id;
    int label = 0;
    std::vector<double> values;  // kNumDynamic x 6, ordered as Aggregate; NaN (except count) when count == 0
    std::array<double, kNumStatic> statics{};
    std::array<std::uint8_t, kNumStatic> static_mask{};

    double at(std::size_t variable, Aggregate a) const {
        return values[variable * kNumAggregates + static_cast<std::size_t>(a)];
    }
};

/// min, max, median (mean of the middle pair for even counts), first, last
/// and count of every dynamic variable's observations in time order.
AggregatedPatient aggregate(const std::string& patient_id, const ingest::PatientRecord& record);

std::vector<AggregatedPatient> aggregate_cohort(const ingest::RawCohort& cohort, std::size_t workers = 1);

struct AggregationStats {
    std::array<double, kNumDynamic * kNumAggregates> min{};
    std::array<double, kNumDynamic * kNumAggregates> max{};
    std::array<double, kNumDynamic * kNumAggregates> mean{};
    std::array<bool, kNumDynamic * kNumAggregates> degenerate{};
    StaticStats statics;
};

AggregationStats fit_aggregation(std::span<const AggregatedPatient> training);

/// Fills absent variables from training means and scales each
/// (variable, aggregate) column to [0, 1].
AggregatedPatient impute_and_scale(const AggregatedPatient& patient, const AggregationStats& stats);

// ---------------------------------------------------------------------------
// Dense datasets for the classifier

Dataset to_dataset(std::span<const FramedPatient> dense);
Dataset to_dataset(std::span<const AggregatedPatient> dense);

/// Framed-cohort file: header, then `patient_id,label,` + dynamic cells in
/// variable-major order + 4 statics per row. The mask file has the same
/// layout with 0/1 cells (statics included).
void write_framed(std::span<const FramedPatient> frames, std::ostream& values_out, std::ostream& mask_out);
std::vector<FramedPatient> read_framed(std::istream& values_in);

std::string framed_header(std::size_t buckets);

}  // namespace ppmf::framing
