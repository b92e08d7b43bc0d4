#include "experiment.hpp"

#include <istream>
#include <ostream>

#include "error.hpp"
#include "text.hpp"

namespace ppmf::experiment {
namespace {

double as_double(const std::string& key, const std::string& value) {
    auto v = text::parse_double(value);
    if (!v) throw Error(ErrorCode::BadConfig, key + ": '" + value + "' is not a number");
    return *v;
}

std::size_t as_count(const std::string& key, const std::string& value) {
    auto v = text::parse_int(value);
    if (!v || *v < 0) throw Error(ErrorCode::BadConfig, key + ": '" + value + "' is not a non-negative integer");
    return static_cast<std::size_t>(*v);
}

std::uint64_t as_seed(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw Error(ErrorCode::BadConfig, key + ": '" + value + "' is not an unsigned integer");
    return v;
}

eval::MethodSpec knn_method(const RunConfig& c, std::string name, eval::Representation rep, eval::Weighting w,
                            eval::FeatureSet f = eval::FeatureSet::All) {
    auto m = c.method(std::move(name));
    m.representation = rep;
    m.weighting = w;
    m.features = f;
    return m;
}

}  // namespace

std::vector<std::string> RunConfig::keys() {
    return {"events",         "outcomes",       "out_dir",
            "stats",          "manual_weights", "window_hours",
            "horizon_hours",  "representation", "weighting",
            "features",       "k",              "learning_rate",
            "max_epochs",     "min_relative_improvement",
            "patience",       "threshold",      "mode",
            "folds",          "seed",           "synth.n_patients",
            "synth.prevalence", "synth.informative", "synth.missing_rate",
            "synth.effect_size", "synth.static_effect", "synth.signal"};
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "events") events = value;
    else if (key == "outcomes") outcomes = value;
    else if (key == "out_dir") out_dir = value;
    else if (key == "stats") stats = value;
    else if (key == "manual_weights") manual_weights = value;
    else if (key == "window_hours") window_hours = static_cast<int>(as_count(key, value));
    else if (key == "horizon_hours") horizon_hours = static_cast<int>(as_count(key, value));
    else if (key == "representation") representation = eval::parse_representation(value);
    else if (key == "weighting") weighting = eval::parse_weighting(value);
    else if (key == "features") features = eval::parse_feature_set(value);
    else if (key == "k") k = as_count(key, value);
    else if (key == "learning_rate") learning_rate = as_double(key, value);
    else if (key == "max_epochs") max_epochs = as_count(key, value);
    else if (key == "min_relative_improvement") min_relative_improvement = as_double(key, value);
    else if (key == "patience") patience = as_count(key, value);
    else if (key == "threshold") threshold = as_double(key, value);
    else if (key == "mode") mode = eval::parse_mode(value);
    else if (key == "folds") folds = as_count(key, value);
    else if (key == "seed") seed = as_seed(key, value);
    else if (key == "workers") workers = as_count(key, value);
    else if (key == "synth.n_patients") synth.n_patients = as_count(key, value);
    else if (key == "synth.prevalence") synth.prevalence = as_double(key, value);
    else if (key == "synth.informative") synth.n_informative_variables = as_count(key, value);
    else if (key == "synth.missing_rate") synth.missing_rate = as_double(key, value);
    else if (key == "synth.effect_size") synth.effect_size = as_double(key, value);
    else if (key == "synth.static_effect") synth.static_effect = as_double(key, value);
    else if (key == "synth.signal") synth.signal = synth::parse_signal(value);
    else throw Error(ErrorCode::BadConfig, "unknown config key '" + key + "'");
}

void RunConfig::load(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::BadConfig, "config line " + std::to_string(line_no) + " lacks '='");
        set(std::string(text::trim(t.substr(0, eq))), std::string(text::trim(t.substr(eq + 1))));
    }
}

void RunConfig::save(std::ostream& out) const {
    out << "events=" << events << '\n'
        << "outcomes=" << outcomes << '\n'
        << "out_dir=" << out_dir << '\n'
        << "stats=" << stats << '\n'
        << "manual_weights=" << manual_weights << '\n'
        << "window_hours=" << window_hours << '\n'
        << "horizon_hours=" << horizon_hours << '\n'
        << "representation=" << eval::to_string(representation) << '\n'
        << "weighting=" << eval::to_string(weighting) << '\n'
        << "features=" << eval::to_string(features) << '\n'
        << "k=" << k << '\n'
        << "learning_rate=" << text::format_double(learning_rate) << '\n'
        << "max_epochs=" << max_epochs << '\n'
        << "min_relative_improvement=" << text::format_double(min_relative_improvement) << '\n'
        << "patience=" << patience << '\n'
        << "threshold=" << text::format_double(threshold) << '\n'
        << "mode=" << eval::to_string(mode) << '\n'
        << "folds=" << folds << '\n'
        << "seed=" << seed << '\n'
        << "synth.n_patients=" << synth.n_patients << '\n'
        << "synth.prevalence=" << text::format_double(synth.prevalence) << '\n'
        << "synth.informative=" << synth.n_informative_variables << '\n'
        << "synth.missing_rate=" << text::format_double(synth.missing_rate) << '\n'
        << "synth.effect_size=" << text::format_double(synth.effect_size) << '\n'
        << "synth.static_effect=" << text::format_double(synth.static_effect) << '\n'
        << "synth.signal=" << synth::to_string(synth.signal) << '\n';
}

void RunConfig::validate() const {
    layout().validate();
    if (k == 0) throw Error(ErrorCode::BadConfig, "k must be positive");
    if (folds < 2) throw Error(ErrorCode::BadConfig, "folds must be at least 2");
    if (!(threshold > 0.0 && threshold < 1.0)) throw Error(ErrorCode::BadConfig, "threshold must lie in (0, 1)");
    if (workers == 0) throw Error(ErrorCode::BadConfig, "workers must be positive");
    train_config().validate();
    if (events.empty() != outcomes.empty())
        throw Error(ErrorCode::BadConfig, "events and outcomes must be given together");
}

weights::TrainConfig RunConfig::train_config() const {
    weights::TrainConfig t;
    t.learning_rate = learning_rate;
    t.max_epochs = max_epochs;
    t.min_relative_improvement = min_relative_improvement;
    t.patience = patience;
    t.k = k;
    t.active = eval::active_variables(features);
    t.workers = workers;
    return t;
}

eval::MethodSpec RunConfig::method(const std::string& name) const {
    eval::MethodSpec m;
    m.name = name;
    m.representation = representation;
    m.weighting = weighting;
    m.features = features;
    m.k = k;
    m.mode = mode;
    m.threshold = threshold;
    m.learning_rate = learning_rate;
    m.max_epochs = max_epochs;
    m.min_relative_improvement = min_relative_improvement;
    m.patience = patience;
    if (!manual_weights.empty()) {
        auto in = text::open_in(manual_weights);
        m.manual_weights = weights::load_weights(in).weights;
    }
    return m;
}

ingest::RawCohort obtain_cohort(const RunConfig& config) {
    if (!config.events.empty()) return ingest::load_cohort(config.events, config.outcomes).cohort;
    auto spec = config.synth;
    spec.seed = config.seed;
    return synth::generate(spec).cohort;
}

std::vector<eval::MethodSpec> preset_methods(const std::string& preset, const RunConfig& c) {
    using eval::FeatureSet;
    using eval::Representation;
    using eval::Weighting;
    std::vector<eval::MethodSpec> methods;
    if (preset == "exp1") {
        methods.push_back(knn_method(c, "PPMF", Representation::TimeSeries, Weighting::GradientDescent));
        auto linear = c.method("LinearAggregates");
        linear.representation = Representation::Aggregation;
        linear.classifier = eval::Classifier::Logistic;
        methods.push_back(linear);
        auto majority = c.method("MajorityClass");
        majority.classifier = eval::Classifier::MajorityClass;
        methods.push_back(majority);
    } else if (preset == "exp2") {
        methods.push_back(knn_method(c, "PPMF", Representation::TimeSeries, Weighting::GradientDescent));
        methods.push_back(knn_method(c, "Aggregation", Representation::Aggregation, Weighting::GradientDescent));
        methods.push_back(knn_method(c, "StaticOnly", Representation::TimeSeries, Weighting::GradientDescent,
                                     FeatureSet::StaticOnly));
        methods.push_back(knn_method(c, "DynamicOnly", Representation::TimeSeries, Weighting::GradientDescent,
                                     FeatureSet::DynamicOnly));
    } else if (preset == "exp3") {
        methods.push_back(knn_method(c, "GradientDescent", Representation::TimeSeries, Weighting::GradientDescent));
        methods.push_back(knn_method(c, "ChiSquare", Representation::TimeSeries, Weighting::ChiSquare));
        methods.push_back(knn_method(c, "InformationGain", Representation::TimeSeries, Weighting::InformationGain));
        methods.push_back(knn_method(c, "Gini", Representation::TimeSeries, Weighting::Gini));
        if (!c.manual_weights.empty())
            methods.push_back(knn_method(c, "Manual", Representation::TimeSeries, Weighting::Manual));
        methods.push_back(knn_method(c, "NoWeights", Representation::TimeSeries, Weighting::None));
    } else {
        throw Error(ErrorCode::BadConfig, "unknown preset '" + preset + "' (expected exp1, exp2 or exp3)");
    }
    return methods;
}

eval::ComparisonReport run_methods(const ingest::RawCohort& cohort, const std::vector<eval::MethodSpec>& methods,
                                   const RunConfig& config) {
    config.validate();
    const auto all = eval::prepare(cohort, config.layout(), config.workers);
    const auto split = eval::split_dev_validation(all.labels(), config.seed);
    const auto validation = all.subset(split.validation);
    const auto folds = eval::kfold(validation.labels(), config.folds, config.seed);

    std::vector<eval::MethodResult> results;
    for (const auto& m : methods)
        results.push_back({m.name, eval::cross_validate(validation, m, folds, config.workers)});
    return eval::compare(std::move(results));
}

eval::ComparisonReport run_experiment(const std::string& preset, const RunConfig& config) {
    const auto methods = preset_methods(preset, config);
    return run_methods(obtain_cohort(config), methods, config);
}

eval::MethodResult evaluate(const ingest::RawCohort& cohort, const RunConfig& config) {
    config.validate();
    const auto all = eval::prepare(cohort, config.layout(), config.workers);
    const auto split = eval::split_dev_validation(all.labels(), config.seed);
    const auto validation = all.subset(split.validation);
    const auto folds = eval::kfold(validation.labels(), config.folds, config.seed);
    std::string name = std::string(eval::to_string(config.representation)) + "-" + eval::to_string(config.weighting) +
                       "-" + eval::to_string(config.features);
    auto method = config.method(name);
    return {name, eval::cross_validate(validation, method, folds, config.workers)};
}

}  // namespace ppmf::experiment
