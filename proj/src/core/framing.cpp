#include "framing.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

#include "error.hpp"
#include "parallel.hpp"
#include "text.hpp"

namespace ppmf::framing {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double scale(double x, double lo, double hi, bool degenerate) {
    if (degenerate) return 0.5;
    return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

template <typename Patient>
StaticStats fit_statics(std::span<const Patient> training) {
    StaticStats s;
    for (std::size_t j = 0; j < kNumStatic; ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& p : training) {
            if (!p.static_mask[j]) continue;
            lo = std::min(lo, p.statics[j]);
            hi = std::max(hi, p.statics[j]);
            sum += p.statics[j];
            ++n;
        }
        if (n == 0) {
            s.min[j] = s.max[j] = s.mean[j] = 0.0;
            s.degenerate[j] = true;
        } else {
            s.min[j] = lo;
            s.max[j] = hi;
            s.mean[j] = sum / static_cast<double>(n);
            s.degenerate[j] = !(lo < hi);
        }
    }
    return s;
}

void apply_statics(std::array<double, kNumStatic>& values, const std::array<std::uint8_t, kNumStatic>& mask,
                   const StaticStats& s) {
    for (std::size_t j = 0; j < kNumStatic; ++j) {
        double raw = mask[j] ? values[j] : s.mean[j];
        values[j] = scale(raw, s.min[j], s.max[j], s.degenerate[j]);
    }
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void FrameLayout::validate() const {
    if (window_hours <= 0 || horizon_hours <= 0)
        throw Error(ErrorCode::BadConfig, "window and horizon must be positive");
    if (horizon_hours % window_hours != 0)
        throw Error(ErrorCode::BadConfig, "horizon " + std::to_string(horizon_hours) +
                                              "h is not divisible by window " + std::to_string(window_hours) + "h");
    if (horizon_hours > 48) throw Error(ErrorCode::BadConfig, "horizon beyond the 48-hour event window");
}

FramedPatient bucketize(const std::string& patient_id, const ingest::PatientRecord& record,
                        const FrameLayout& layout) {
    layout.validate();
    const std::size_t buckets = layout.buckets();
    const int horizon_minutes = layout.horizon_hours * 60;

    FramedPatient f;
    f.patient_id = patient_id;
    f.label = record.label;
    f.buckets = buckets;
    f.dynamic.assign(kNumDynamic * buckets, 0.0);
    f.mask.assign(kNumDynamic * buckets, 0);
    f.statics.fill(kNaN);
    f.static_mask.fill(0);

    std::vector<std::size_t> counts(kNumDynamic * buckets, 0);
    for (const auto& e : record.events) {
        if (is_static(e.variable)) {
            // events are time-sorted, so the first one seen is the initial value
            std::size_t j = e.variable - kNumDynamic;
            if (!f.static_mask[j]) {
                f.statics[j] = e.value;
                f.static_mask[j] = 1;
            }
            continue;
        }
        if (e.minute >= horizon_minutes) continue;
        std::size_t cell = e.variable * buckets + static_cast<std::size_t>(e.minute / layout.window_minutes());
        f.dynamic[cell] += e.value;
        ++counts[cell];
    }
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) {
            f.dynamic[c] = kNaN;
        } else {
            f.dynamic[c] /= static_cast<double>(counts[c]);
            f.mask[c] = 1;
        }
    }
    return f;
}

std::vector<FramedPatient> bucketize_cohort(const ingest::RawCohort& cohort, const FrameLayout& layout,
                                            std::size_t workers) {
    layout.validate();
    std::vector<const std::pair<const std::string, ingest::PatientRecord>*> entries;
    for (const auto& entry : cohort.patients()) entries.push_back(&entry);
    std::vector<FramedPatient> frames(entries.size());
    parallel_for(entries.size(), workers,
                 [&](std::size_t i) { frames[i] = bucketize(entries[i]->first, entries[i]->second, layout); });
    return frames;
}

double sparsity(std::span<const FramedPatient> frames) {
    if (frames.empty()) throw Error(ErrorCode::EmptyCohort, "sparsity of an empty cohort");
    std::size_t missing = 0;
    std::size_t total = 0;
    const std::size_t cells = frames.front().mask.size();
    for (const auto& f : frames) {
        if (f.mask.size() != cells) throw Error(ErrorCode::DimensionMismatch, "frames differ in bucket count");
        missing += static_cast<std::size_t>(std::count(f.mask.begin(), f.mask.end(), std::uint8_t{0}));
        total += cells;
    }
    return static_cast<double>(missing) / static_cast<double>(total);
}

ScalingStats fit_scaling(std::span<const FramedPatient> training) {
    if (training.size() < 2) throw Error(ErrorCode::EmptyCohort, "scaling needs at least two training patients");
    const std::size_t buckets = training.front().buckets;

    ScalingStats s;
    s.buckets = buckets;
    s.bucket_mean.assign(kNumDynamic * buckets, 0.0);

    for (std::size_t v = 0; v < kNumDynamic; ++v) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        double var_sum = 0.0;
        std::size_t var_n = 0;
        std::vector<double> sums(buckets, 0.0);
        std::vector<std::size_t> ns(buckets, 0);
        for (const auto& f : training) {
            if (f.buckets != buckets) throw Error(ErrorCode::DimensionMismatch, "frames differ in bucket count");
            for (std::size_t t = 0; t < buckets; ++t) {
                if (!f.observed(v, t)) continue;
                double x = f.cell(v, t);
                lo = std::min(lo, x);
                hi = std::max(hi, x);
                sums[t] += x;
                ++ns[t];
                var_sum += x;
                ++var_n;
            }
        }
        if (var_n == 0) {
            s.min[v] = s.max[v] = 0.0;
            s.degenerate[v] = true;
            continue;
        }
        s.min[v] = lo;
        s.max[v] = hi;
        s.degenerate[v] = !(lo < hi);
        const double var_mean = var_sum / static_cast<double>(var_n);
        for (std::size_t t = 0; t < buckets; ++t)
            s.bucket_mean[v * buckets + t] = ns[t] > 0 ? sums[t] / static_cast<double>(ns[t]) : var_mean;
    }
    s.statics = fit_statics(training);
    return s;
}

FramedPatient impute_and_scale(const FramedPatient& frame, const ScalingStats& stats) {
    if (frame.buckets != stats.buckets || frame.dynamic.size() != kNumDynamic * stats.buckets)
        throw Error(ErrorCode::DimensionMismatch, "frame for '" + frame.patient_id + "' has " +
                                                      std::to_string(frame.buckets) + " buckets, stats have " +
                                                      std::to_string(stats.buckets));
    FramedPatient out = frame;
    const std::size_t buckets = stats.buckets;
    for (std::size_t v = 0; v < kNumDynamic; ++v) {
        bool seen = false;
        double carried = 0.0;
        for (std::size_t t = 0; t < buckets; ++t) {
            double raw;
            if (frame.observed(v, t)) {
                raw = frame.cell(v, t);
                carried = raw;
                seen = true;
            } else if (seen) {
                raw = carried;
            } else {
                raw = stats.bucket_mean[v * buckets + t];
            }
            out.cell(v, t) = scale(raw, stats.min[v], stats.max[v], stats.degenerate[v]);
        }
    }
    apply_statics(out.statics, frame.static_mask, stats.statics);
    return out;
}

// --- persistence of scaling stats ------------------------------------------

void ScalingStats::write(std::ostream& out) const {
    out << "buckets=" << buckets << '\n';
    for (std::size_t v = 0; v < kNumDynamic; ++v) {
        const auto name = kVariableNames[v];
        out << name << ".min=" << text::format_double(min[v]) << '\n';
        out << name << ".max=" << text::format_double(max[v]) << '\n';
        out << name << ".degenerate=" << (degenerate[v] ? 1 : 0) << '\n';
        for (std::size_t t = 0; t < buckets; ++t)
            out << name << ".mean." << t << '=' << text::format_double(bucket_mean[v * buckets + t]) << '\n';
    }
    for (std::size_t j = 0; j < kNumStatic; ++j) {
        const auto name = kVariableNames[kNumDynamic + j];
        out << name << ".min=" << text::format_double(statics.min[j]) << '\n';
        out << name << ".max=" << text::format_double(statics.max[j]) << '\n';
        out << name << ".degenerate=" << (statics.degenerate[j] ? 1 : 0) << '\n';
        out << name << ".mean=" << text::format_double(statics.mean[j]) << '\n';
    }
}

ScalingStats ScalingStats::read(std::istream& in) {
    std::map<std::string, std::string, std::less<>> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::MalformedRow, "scaling stats line " + std::to_string(line_no));
        kv[std::string(text::trim(t.substr(0, eq)))] = std::string(text::trim(t.substr(eq + 1)));
    }
    auto number = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw Error(ErrorCode::MalformedRow, "scaling stats missing key '" + key + "'");
        auto v = text::parse_double(it->second);
        if (!v) throw Error(ErrorCode::MalformedRow, "scaling stats bad value for '" + key + "'");
        return *v;
    };

    ScalingStats s;
    double buckets = number("buckets");
    if (buckets < 1 || buckets != std::floor(buckets)) throw Error(ErrorCode::MalformedRow, "bad bucket count");
    s.buckets = static_cast<std::size_t>(buckets);
    s.bucket_mean.assign(kNumDynamic * s.buckets, 0.0);
    for (std::size_t v = 0; v < kNumDynamic; ++v) {
        const std::string name(kVariableNames[v]);
        s.min[v] = number(name + ".min");
        s.max[v] = number(name + ".max");
        s.degenerate[v] = number(name + ".degenerate") != 0.0;
        for (std::size_t t = 0; t < s.buckets; ++t)
            s.bucket_mean[v * s.buckets + t] = number(name + ".mean." + std::to_string(t));
    }
    for (std::size_t j = 0; j < kNumStatic; ++j) {
        const std::string name(kVariableNames[kNumDynamic + j]);
        s.statics.min[j] = number(name + ".min");
        s.statics.max[j] = number(name + ".max");
        s.statics.degenerate[j] = number(name + ".degenerate") != 0.0;
        s.statics.mean[j] = number(name + ".mean");
    }
    return s;
}

// --- aggregates --------------------------------------------------------------

AggregatedPatient aggregate(const std::string& patient_id, const ingest::PatientRecord& record) {
    AggregatedPatient a;
    a.patient_id = patient_id;
    a.label = record.label;
    a.values.assign(kNumDynamic * kNumAggregates, kNaN);
    a.statics.fill(kNaN);
    a.static_mask.fill(0);

    std::array<std::vector<double>, kNumDynamic> series;
    for (const auto& e : record.events) {
        if (is_static(e.variable)) {
            std::size_t j = e.variable - kNumDynamic;
            if (!a.static_mask[j]) {
                a.statics[j] = e.value;
                a.static_mask[j] = 1;
            }
        } else {
            series[e.variable].push_back(e.value);
        }
    }
    for (std::size_t v = 0; v < kNumDynamic; ++v) {
        const auto& xs = series[v];
        double* out = a.values.data() + v * kNumAggregates;
        out[static_cast<std::size_t>(Aggregate::Count)] = static_cast<double>(xs.size());
        if (xs.empty()) continue;
        auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
        out[static_cast<std::size_t>(Aggregate::Min)] = *lo;
        out[static_cast<std::size_t>(Aggregate::Max)] = *hi;
        out[static_cast<std::size_t>(Aggregate::Median)] = median_of(xs);
        out[static_cast<std::size_t>(Aggregate::First)] = xs.front();
        out[static_cast<std::size_t>(Aggregate::Last)] = xs.back();
    }
    return a;
}

std::vector<AggregatedPatient> aggregate_cohort(const ingest::RawCohort& cohort, std::size_t workers) {
    std::vector<const std::pair<const std::string, ingest::PatientRecord>*> entries;
    for (const auto& entry : cohort.patients()) entries.push_back(&entry);
    std::vector<AggregatedPatient> out(entries.size());
    parallel_for(entries.size(), workers,
                 [&](std::size_t i) { out[i] = aggregate(entries[i]->first, entries[i]->second); });
    return out;
}

AggregationStats fit_aggregation(std::span<const AggregatedPatient> training) {
    if (training.size() < 2) throw Error(ErrorCode::EmptyCohort, "aggregation stats need at least two patients");
    AggregationStats s;
    for (std::size_t c = 0; c < kNumDynamic * kNumAggregates; ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& p : training) {
            double x = p.values[c];
            if (std::isnan(x)) continue;
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            sum += x;
            ++n;
        }
        if (n == 0) {
            s.min[c] = s.max[c] = s.mean[c] = 0.0;
            s.degenerate[c] = true;
        } else {
            s.min[c] = lo;
            s.max[c] = hi;
            s.mean[c] = sum / static_cast<double>(n);
            s.degenerate[c] = !(lo < hi);
        }
    }
    s.statics = fit_statics(training);
    return s;
}

AggregatedPatient impute_and_scale(const AggregatedPatient& patient, const AggregationStats& stats) {
    if (patient.values.size() != kNumDynamic * kNumAggregates)
        throw Error(ErrorCode::DimensionMismatch, "aggregate row for '" + patient.patient_id + "'");
    AggregatedPatient out = patient;
    for (std::size_t c = 0; c < out.values.size(); ++c) {
        double raw = std::isnan(patient.values[c]) ? stats.mean[c] : patient.values[c];
        out.values[c] = scale(raw, stats.min[c], stats.max[c], stats.degenerate[c]);
    }
    apply_statics(out.statics, patient.static_mask, stats.statics);
    return out;
}

// --- datasets ------------------------------------------------------------------

Dataset to_dataset(std::span<const FramedPatient> dense) {
    if (dense.empty()) throw Error(ErrorCode::EmptyCohort, "no frames");
    Dataset ds(dense.front().buckets);
    std::vector<double> row(ds.dims());
    for (const auto& f : dense) {
        if (f.buckets != ds.block_width()) throw Error(ErrorCode::DimensionMismatch, "frames differ in bucket count");
        std::copy(f.dynamic.begin(), f.dynamic.end(), row.begin());
        std::copy(f.statics.begin(), f.statics.end(), row.begin() + static_cast<std::ptrdiff_t>(f.dynamic.size()));
        ds.add(f.patient_id, f.label, row);
    }
    return ds;
}

Dataset to_dataset(std::span<const AggregatedPatient> dense) {
    if (dense.empty()) throw Error(ErrorCode::EmptyCohort, "no aggregates");
    Dataset ds(kNumAggregates);
    std::vector<double> row(ds.dims());
    for (const auto& a : dense) {
        std::copy(a.values.begin(), a.values.end(), row.begin());
        std::copy(a.statics.begin(), a.statics.end(), row.begin() + static_cast<std::ptrdiff_t>(a.values.size()));
        ds.add(a.patient_id, a.label, row);
    }
    return ds;
}

// --- framed cohort files -----------------------------------------------------

std::string framed_header(std::size_t buckets) {
    std::string h = "patient_id,label";
    for (std::size_t v = 0; v < kNumDynamic; ++v)
        for (std::size_t t = 0; t < buckets; ++t) {
            h += ',';
            h += kVariableNames[v];
            h += '[' + std::to_string(t) + ']';
        }
    for (std::size_t j = 0; j < kNumStatic; ++j) {
        h += ',';
        h += kVariableNames[kNumDynamic + j];
    }
    return h;
}

void write_framed(std::span<const FramedPatient> frames, std::ostream& values_out, std::ostream& mask_out) {
    if (frames.empty()) throw Error(ErrorCode::EmptyCohort, "nothing to write");
    const std::size_t buckets = frames.front().buckets;
    const std::string header = framed_header(buckets);
    values_out << header << '\n';
    mask_out << header << '\n';
    for (const auto& f : frames) {
        if (f.buckets != buckets) throw Error(ErrorCode::DimensionMismatch, "frames differ in bucket count");
        values_out << f.patient_id << ',' << f.label;
        mask_out << f.patient_id << ',' << f.label;
        for (std::size_t c = 0; c < f.dynamic.size(); ++c) {
            values_out << ',' << text::format_double(f.dynamic[c]);
            mask_out << ',' << static_cast<int>(f.mask[c]);
        }
        for (std::size_t j = 0; j < kNumStatic; ++j) {
            values_out << ',' << text::format_double(f.statics[j]);
            mask_out << ',' << static_cast<int>(f.static_mask[j]);
        }
        values_out << '\n';
        mask_out << '\n';
    }
}

std::vector<FramedPatient> read_framed(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::EmptyCohort, "framed file is empty");
    const auto header = text::split(line);
    if (header.size() < 2 + kNumStatic + kNumDynamic || (header.size() - 2 - kNumStatic) % kNumDynamic != 0)
        throw Error(ErrorCode::MalformedRow, "framed header has " + std::to_string(header.size()) + " columns");
    const std::size_t buckets = (header.size() - 2 - kNumStatic) / kNumDynamic;
    if (text::trim(line) != framed_header(buckets))
        throw Error(ErrorCode::MalformedRow, "framed header does not match the canonical variable order");

    std::vector<FramedPatient> frames;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        auto fields = text::split(line);
        if (fields.size() != header.size())
            throw Error(ErrorCode::MalformedRow, "framed line " + std::to_string(line_no) + ": wrong column count");
        FramedPatient f;
        f.patient_id = std::string(fields[0]);
        auto label = text::parse_int(fields[1]);
        if (!label || (*label != 0 && *label != 1))
            throw Error(ErrorCode::InvalidLabel, "framed line " + std::to_string(line_no));
        f.label = static_cast<int>(*label);
        f.buckets = buckets;
        f.dynamic.resize(kNumDynamic * buckets);
        f.mask.assign(kNumDynamic * buckets, 1);
        f.static_mask.fill(1);
        for (std::size_t c = 0; c < f.dynamic.size() + kNumStatic; ++c) {
            auto v = text::parse_double(fields[2 + c]);
            if (!v) throw Error(ErrorCode::MalformedRow, "framed line " + std::to_string(line_no) + ": bad cell");
            if (c < f.dynamic.size())
                f.dynamic[c] = *v;
            else
                f.statics[c - f.dynamic.size()] = *v;
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

}  // namespace ppmf::framing
