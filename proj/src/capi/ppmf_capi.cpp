#include "ppmf/ppmf.h"

#include <exception>
#include <filesystem>
#include <new>
#include <string>
#include <vector>

#include "error.hpp"
#include "eval.hpp"
#include "experiment.hpp"
#include "framing.hpp"
#include "ingest.hpp"
#include "knn.hpp"
#include "methods.hpp"
#include "parallel.hpp"
#include "synth.hpp"
#include "text.hpp"
#include "vocabulary.hpp"
#include "weights.hpp"

struct ppmf_config {
    ppmf::experiment::RunConfig value;
};

struct ppmf_cohort {
    ppmf::ingest::RawCohort value;
    std::size_t dropped = 0;
};

struct ppmf_weights {
    ppmf::knn::FeatureWeights value;
};

namespace {

using namespace ppmf;

thread_local std::string last_error;

template <class Fn>
ppmf_status guard(Fn&& fn) noexcept {
    try {
        fn();
        last_error.clear();
        return PPMF_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return static_cast<ppmf_status>(static_cast<int>(e.code()));
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return PPMF_INTERNAL_ERROR;
    } catch (const std::filesystem::filesystem_error& e) {
        last_error = std::string("IoError: ") + e.what();
        return PPMF_IO_ERROR;
    } catch (const std::exception& e) {
        last_error = e.what();
        return PPMF_INTERNAL_ERROR;
    } catch (...) {
        last_error = "unknown failure";
        return PPMF_INTERNAL_ERROR;
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

std::string str(const char* s, const char* what) {
    require(s, what);
    return s;
}

std::vector<framing::FramedPatient> load_framed(const std::string& path) {
    auto in = text::open_in(path);
    return framing::read_framed(in);
}

void write_reports(const eval::ComparisonReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    {
        auto out = text::open_out((dir / "fold_metrics.csv").string());
        eval::write_fold_metrics(report.methods, out);
    }
    {
        auto out = text::open_out((dir / "report.json").string());
        out << report.to_json();
    }
    {
        auto out = text::open_out((dir / "report.txt").string());
        out << report.to_table();
    }
}

}  // namespace

extern "C" {

const char* ppmf_version(void) { return "0.1.0"; }

const char* ppmf_status_name(ppmf_status status) {
    switch (status) {
        case PPMF_OK: return "Ok";
        case PPMF_INTERNAL_ERROR: return "InternalError";
        default: return error_code_name(static_cast<ErrorCode>(status));
    }
}

const char* ppmf_last_error(void) { return last_error.c_str(); }

size_t ppmf_variable_count(void) { return kNumVariables; }

const char* ppmf_variable_name(size_t index) {
    return index < kNumVariables ? kVariableNames[index].data() : nullptr;
}

ppmf_status ppmf_config_new(ppmf_config** out) {
    return guard([&] {
        require(out, "out");
        *out = new ppmf_config{};
    });
}

void ppmf_config_free(ppmf_config* config) { delete config; }

ppmf_status ppmf_config_set(ppmf_config* config, const char* key, const char* value) {
    return guard([&] {
        require(config, "config");
        config->value.set(str(key, "key"), str(value, "value"));
    });
}

ppmf_status ppmf_config_load(ppmf_config* config, const char* path) {
    return guard([&] {
        require(config, "config");
        auto in = text::open_in(str(path, "path"));
        config->value.load(in);
    });
}

ppmf_status ppmf_config_save(const ppmf_config* config, const char* path) {
    return guard([&] {
        require(config, "config");
        auto out = text::open_out(str(path, "path"));
        config->value.save(out);
    });
}

ppmf_status ppmf_config_set_workers(ppmf_config* config, size_t workers) {
    return guard([&] {
        require(config, "config");
        config->value.workers = workers == 0 ? default_workers() : workers;
    });
}

ppmf_status ppmf_cohort_load(const char* events_path, const char* outcomes_path, ppmf_cohort** out) {
    return guard([&] {
        require(out, "out");
        auto loaded = ingest::load_cohort(str(events_path, "events_path"), str(outcomes_path, "outcomes_path"));
        *out = new ppmf_cohort{std::move(loaded.cohort), loaded.dropped_placeholders};
    });
}

ppmf_status ppmf_cohort_from_config(const ppmf_config* config, ppmf_cohort** out) {
    return guard([&] {
        require(config, "config");
        require(out, "out");
        const auto& c = config->value;
        if (!c.events.empty()) {
            auto loaded = ingest::load_cohort(c.events, c.outcomes);
            *out = new ppmf_cohort{std::move(loaded.cohort), loaded.dropped_placeholders};
        } else {
            *out = new ppmf_cohort{experiment::obtain_cohort(c), 0};
        }
    });
}

void ppmf_cohort_free(ppmf_cohort* cohort) { delete cohort; }

size_t ppmf_cohort_size(const ppmf_cohort* cohort) { return cohort ? cohort->value.size() : 0; }

size_t ppmf_cohort_positives(const ppmf_cohort* cohort) { return cohort ? cohort->value.positives() : 0; }

size_t ppmf_cohort_dropped_rows(const ppmf_cohort* cohort) { return cohort ? cohort->dropped : 0; }

ppmf_status ppmf_cohort_sparsity(const ppmf_cohort* cohort, const ppmf_config* config, double* out) {
    return guard([&] {
        require(cohort, "cohort");
        require(config, "config");
        require(out, "out");
        const auto layout = config->value.layout();
        layout.validate();
        *out = framing::sparsity(framing::bucketize_cohort(cohort->value, layout, config->value.workers));
    });
}

ppmf_status ppmf_cohort_save(const ppmf_cohort* cohort, const char* events_path, const char* outcomes_path) {
    return guard([&] {
        require(cohort, "cohort");
        auto events = text::open_out(str(events_path, "events_path"));
        ingest::write_events(cohort->value, events);
        auto outcomes = text::open_out(str(outcomes_path, "outcomes_path"));
        ingest::write_outcomes(cohort->value, outcomes);
    });
}

ppmf_status ppmf_weights_uniform(double value, ppmf_weights** out) {
    return guard([&] {
        require(out, "out");
        auto w = knn::FeatureWeights::uniform(value);
        w.validate();
        *out = new ppmf_weights{w};
    });
}

ppmf_status ppmf_weights_load(const char* path, ppmf_weights** out) {
    return guard([&] {
        require(out, "out");
        auto in = text::open_in(str(path, "path"));
        *out = new ppmf_weights{weights::load_weights(in).weights};
    });
}

void ppmf_weights_free(ppmf_weights* weights) { delete weights; }

ppmf_status ppmf_weights_save(const ppmf_weights* w, const char* path) {
    return guard([&] {
        require(w, "weights");
        auto out = text::open_out(str(path, "path"));
        weights::write_weights(w->value, out);
    });
}

ppmf_status ppmf_weights_get(const ppmf_weights* w, size_t index, double* out) {
    return guard([&] {
        require(w, "weights");
        require(out, "out");
        if (index >= kNumVariables) throw Error(ErrorCode::InvalidArgument, "variable index out of range");
        *out = w->value[index];
    });
}

ppmf_status ppmf_weights_set(ppmf_weights* w, size_t index, double value) {
    return guard([&] {
        require(w, "weights");
        if (index >= kNumVariables) throw Error(ErrorCode::InvalidArgument, "variable index out of range");
        auto next = w->value;
        next[index] = value;
        next.validate();
        w->value = next;
    });
}

ppmf_status ppmf_synth(const ppmf_config* config, const char* events_path, const char* outcomes_path,
                       const char* manifest_path) {
    return guard([&] {
        require(config, "config");
        auto spec = config->value.synth;
        spec.seed = config->value.seed;
        const auto generated = synth::generate(spec);
        auto events = text::open_out(str(events_path, "events_path"));
        ingest::write_events(generated.cohort, events);
        auto outcomes = text::open_out(str(outcomes_path, "outcomes_path"));
        ingest::write_outcomes(generated.cohort, outcomes);
        if (manifest_path != nullptr) {
            auto manifest = text::open_out(manifest_path);
            manifest << generated.manifest.to_json();
        }
    });
}

ppmf_status ppmf_frame(const ppmf_config* config, const ppmf_cohort* cohort, const char* values_path,
                       const char* mask_path, const char* stats_in, const char* stats_out, double* sparsity_out) {
    return guard([&] {
        require(config, "config");
        require(cohort, "cohort");
        const auto layout = config->value.layout();
        layout.validate();
        const auto raw = framing::bucketize_cohort(cohort->value, layout, config->value.workers);
        if (sparsity_out != nullptr) *sparsity_out = framing::sparsity(raw);

        framing::ScalingStats stats;
        if (stats_in != nullptr) {
            auto in = text::open_in(stats_in);
            stats = framing::ScalingStats::read(in);
            if (stats.buckets != layout.buckets())
                throw Error(ErrorCode::DimensionMismatch, "scaling statistics were fitted on " +
                                                              std::to_string(stats.buckets) + " buckets, layout has " +
                                                              std::to_string(layout.buckets()));
        } else {
            stats = framing::fit_scaling(raw);
        }
        std::vector<framing::FramedPatient> dense;
        dense.reserve(raw.size());
        for (const auto& f : raw) dense.push_back(framing::impute_and_scale(f, stats));

        auto values = text::open_out(str(values_path, "values_path"));
        auto mask = text::open_out(str(mask_path, "mask_path"));
        framing::write_framed(dense, values, mask);
        if (stats_out != nullptr) {
            auto out = text::open_out(stats_out);
            stats.write(out);
        }
    });
}

ppmf_status ppmf_train(const ppmf_config* config, const char* framed_path, const char* weights_path,
                       const char* trace_path) {
    return guard([&] {
        require(config, "config");
        const auto& c = config->value;
        c.validate();
        const auto frames = load_framed(str(framed_path, "framed_path"));
        const auto data = framing::to_dataset(frames);
        const auto active = eval::active_variables(c.features);

        knn::FeatureWeights w;
        std::optional<weights::TrainTrace> trace;
        switch (c.weighting) {
            case eval::Weighting::GradientDescent: {
                auto result = weights::train_gd(data, c.train_config());
                w = result.weights;
                trace = std::move(result.trace);
                break;
            }
            case eval::Weighting::None:
                for (std::size_t v = 0; v < kNumVariables; ++v) w[v] = active[v] ? 1.0 : 0.0;
                break;
            case eval::Weighting::Manual: {
                auto m = c.method("manual");
                if (!m.manual_weights)
                    throw Error(ErrorCode::BadConfig, "manual weighting needs manual_weights=<file>");
                w = *m.manual_weights;
                for (std::size_t v = 0; v < kNumVariables; ++v)
                    if (!active[v]) w[v] = 0.0;
                break;
            }
            case eval::Weighting::ChiSquare:
                w = weights::filter_weights(data, weights::FilterMethod::ChiSquare, active);
                break;
            case eval::Weighting::InformationGain:
                w = weights::filter_weights(data, weights::FilterMethod::InformationGain, active);
                break;
            case eval::Weighting::Gini:
                w = weights::filter_weights(data, weights::FilterMethod::Gini, active);
                break;
        }
        auto out = text::open_out(str(weights_path, "weights_path"));
        weights::write_weights(w, out);
        if (trace_path != nullptr) {
            if (!trace)
                throw Error(ErrorCode::BadConfig, "a training trace exists only for gradient-descent weighting");
            auto t = text::open_out(trace_path);
            weights::write_trace(*trace, t);
        }
    });
}

ppmf_status ppmf_predict(const ppmf_config* config, const char* train_path, const char* query_path,
                         const ppmf_weights* w, const char* out_path) {
    return guard([&] {
        require(config, "config");
        require(w, "weights");
        const auto& c = config->value;
        c.validate();
        const auto train_frames = load_framed(str(train_path, "train_path"));
        knn::Model model(framing::to_dataset(train_frames), w->value, c.k, c.mode, c.threshold);

        const bool loo = query_path == nullptr;
        const auto query_frames = loo ? train_frames : load_framed(query_path);
        const auto queries = framing::to_dataset(query_frames);
        if (queries.dims() != model.train().dims())
            throw Error(ErrorCode::DimensionMismatch, "query and training files use different bucket layouts");
        const auto predictions = model.predict(queries, loo, c.workers);

        auto out = text::open_out(str(out_path, "out_path"));
        out << "patient_id,score,label\n";
        for (std::size_t i = 0; i < predictions.size(); ++i)
            out << queries.id(i) << ',' << text::format_double(predictions[i].score) << ',' << predictions[i].label
                << '\n';
    });
}

ppmf_status ppmf_evaluate(const ppmf_config* config, const char* out_dir) {
    return guard([&] {
        require(config, "config");
        const auto dir = str(out_dir, "out_dir");
        const auto cohort = experiment::obtain_cohort(config->value);
        auto result = experiment::evaluate(cohort, config->value);
        std::vector<eval::MethodResult> methods{std::move(result)};
        write_reports(eval::compare(std::move(methods)), dir);
    });
}

ppmf_status ppmf_compare(const char* const* fold_metrics_paths, size_t n_paths, double alpha, const char* out_dir) {
    return guard([&] {
        require(fold_metrics_paths, "fold_metrics_paths");
        if (n_paths == 0) throw Error(ErrorCode::InvalidArgument, "no fold-metrics files given");
        if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::BadConfig, "alpha must lie in (0, 1)");
        std::vector<eval::MethodResult> methods;
        for (size_t i = 0; i < n_paths; ++i) {
            auto in = text::open_in(str(fold_metrics_paths[i], "fold-metrics path"));
            for (auto& m : eval::read_fold_metrics(in)) methods.push_back(std::move(m));
        }
        write_reports(eval::compare(std::move(methods), alpha), str(out_dir, "out_dir"));
    });
}

ppmf_status ppmf_experiment(const ppmf_config* config, const char* preset, const char* out_dir) {
    return guard([&] {
        require(config, "config");
        const auto dir = str(out_dir, "out_dir");
        write_reports(experiment::run_experiment(str(preset, "preset"), config->value), dir);
    });
}

}  // extern "C"
