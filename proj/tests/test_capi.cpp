// Exercises the shared library through its C header only, and the CLI as a
// subprocess.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <sys/wait.h>

#include <ppmf/ppmf.h>

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("ppmf_capi_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& path) {
    std::ifstream in(path);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

// Small, quick cohort: 120 patients, short training.
ppmf_config* small_config() {
    ppmf_config* c = nullptr;
    REQUIRE(ppmf_config_new(&c) == PPMF_OK);
    REQUIRE(ppmf_config_set(c, "synth.n_patients", "120") == PPMF_OK);
    REQUIRE(ppmf_config_set(c, "seed", "5") == PPMF_OK);
    REQUIRE(ppmf_config_set(c, "folds", "5") == PPMF_OK);
    REQUIRE(ppmf_config_set(c, "max_epochs", "4") == PPMF_OK);
    return c;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PPMF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("statuses, names and the roster") {
    CHECK(std::string(ppmf_status_name(PPMF_OK)) != "");
    CHECK(std::string(ppmf_status_name(PPMF_NEGATIVE_WEIGHT)) != std::string(ppmf_status_name(PPMF_BAD_CONFIG)));
    CHECK(ppmf_variable_count() == 40);
    CHECK(std::string(ppmf_variable_name(36)) == "Age");
    CHECK(std::string(ppmf_version()).size() > 0);

    ppmf_config* c = nullptr;
    REQUIRE(ppmf_config_new(&c) == PPMF_OK);
    CHECK(ppmf_config_set(c, "no_such_key", "1") == PPMF_BAD_CONFIG);
    CHECK(std::string(ppmf_last_error()).find("no_such_key") != std::string::npos);
    CHECK(ppmf_config_set(c, "k", "-3") == PPMF_BAD_CONFIG);
    CHECK(ppmf_config_load(c, "/nonexistent/ppmf.cfg") == PPMF_IO_ERROR);
    ppmf_config_free(c);
    ppmf_config_free(nullptr);
}

TEST_CASE("weights handles") {
    ppmf_weights* w = nullptr;
    REQUIRE(ppmf_weights_uniform(1.0, &w) == PPMF_OK);
    double x = 0;
    CHECK(ppmf_weights_get(w, 19, &x) == PPMF_OK);
    CHECK(x == 1.0);
    CHECK(ppmf_weights_set(w, 19, -0.5) == PPMF_NEGATIVE_WEIGHT);
    CHECK(ppmf_weights_set(w, 40, 1.0) == PPMF_INVALID_ARGUMENT);
    CHECK(ppmf_weights_set(w, 19, 2.5) == PPMF_OK);

    TempDir tmp;
    REQUIRE(ppmf_weights_save(w, (tmp / "w.csv").c_str()) == PPMF_OK);
    ppmf_weights* back = nullptr;
    REQUIRE(ppmf_weights_load((tmp / "w.csv").c_str(), &back) == PPMF_OK);
    CHECK(ppmf_weights_get(back, 19, &x) == PPMF_OK);
    CHECK(x == 2.5);
    CHECK(ppmf_weights_load((tmp / "missing.csv").c_str(), &back) == PPMF_IO_ERROR);
    ppmf_weights_free(back);
    ppmf_weights_free(w);
}

TEST_CASE("synth, frame, train and predict end to end") {
    TempDir tmp;
    ppmf_config* c = small_config();
    REQUIRE(ppmf_synth(c, (tmp / "events.csv").c_str(), (tmp / "outcomes.csv").c_str(),
                       (tmp / "manifest.json").c_str()) == PPMF_OK);
    CHECK(slurp(tmp / "manifest.json").find("informative_variables") != std::string::npos);

    ppmf_cohort* cohort = nullptr;
    REQUIRE(ppmf_cohort_load((tmp / "events.csv").c_str(), (tmp / "outcomes.csv").c_str(), &cohort) == PPMF_OK);
    CHECK(ppmf_cohort_size(cohort) == 120);
    CHECK(ppmf_cohort_positives(cohort) > 0);

    ppmf_cohort* again = nullptr;
    REQUIRE(ppmf_cohort_from_config(c, &again) == PPMF_OK);
    CHECK(ppmf_cohort_size(again) == 120);
    ppmf_cohort_free(again);

    double sparsity = -1;
    REQUIRE(ppmf_frame(c, cohort, (tmp / "framed.csv").c_str(), (tmp / "mask.csv").c_str(), nullptr,
                       (tmp / "stats.csv").c_str(), &sparsity) == PPMF_OK);
    double direct = -1;
    CHECK(ppmf_cohort_sparsity(cohort, c, &direct) == PPMF_OK);
    CHECK(sparsity == direct);
    CHECK(sparsity > 0.2);
    CHECK(sparsity < 0.36);

    // reusing the fitted statistics reproduces the same file
    REQUIRE(ppmf_frame(c, cohort, (tmp / "framed2.csv").c_str(), (tmp / "mask2.csv").c_str(),
                       (tmp / "stats.csv").c_str(), nullptr, nullptr) == PPMF_OK);
    CHECK(slurp(tmp / "framed.csv") == slurp(tmp / "framed2.csv"));

    REQUIRE(ppmf_train(c, (tmp / "framed.csv").c_str(), (tmp / "w.csv").c_str(), (tmp / "trace.csv").c_str()) ==
            PPMF_OK);
    CHECK(line_count(tmp / "trace.csv") >= 2);

    ppmf_weights* w = nullptr;
    REQUIRE(ppmf_weights_load((tmp / "w.csv").c_str(), &w) == PPMF_OK);
    REQUIRE(ppmf_predict(c, (tmp / "framed.csv").c_str(), nullptr, w, (tmp / "pred.csv").c_str()) == PPMF_OK);
    CHECK(line_count(tmp / "pred.csv") == 121);  // header + one row per patient
    REQUIRE(ppmf_predict(c, (tmp / "framed.csv").c_str(), (tmp / "framed2.csv").c_str(), w,
                         (tmp / "pred2.csv").c_str()) == PPMF_OK);
    CHECK(line_count(tmp / "pred2.csv") == 121);

    CHECK(ppmf_config_set(c, "k", "500") == PPMF_OK);
    CHECK(ppmf_predict(c, (tmp / "framed.csv").c_str(), nullptr, w, (tmp / "pred3.csv").c_str()) ==
          PPMF_K_TOO_LARGE);
    CHECK(ppmf_train(c, (tmp / "nothing.csv").c_str(), (tmp / "w2.csv").c_str(), nullptr) == PPMF_IO_ERROR);

    ppmf_weights_free(w);
    ppmf_cohort_free(cohort);
    ppmf_config_free(c);
}

TEST_CASE("malformed input files are validation errors") {
    TempDir tmp;
    std::ofstream(tmp / "events.csv") << "patient_id,minute,variable,value\np1,10,NotAVariable,3\n";
    std::ofstream(tmp / "outcomes.csv") << "patient_id,in_hospital_death\np1,0\n";
    ppmf_cohort* cohort = nullptr;
    CHECK(ppmf_cohort_load((tmp / "events.csv").c_str(), (tmp / "outcomes.csv").c_str(), &cohort) ==
          PPMF_UNKNOWN_VARIABLE);
    CHECK(cohort == nullptr);
}

TEST_CASE("evaluate, experiment and compare write reports") {
    TempDir tmp;
    ppmf_config* c = small_config();
    REQUIRE(ppmf_evaluate(c, (tmp / "eval").c_str()) == PPMF_OK);
    CHECK(line_count(tmp / "eval/fold_metrics.csv") == 6);
    CHECK(slurp(tmp / "eval/report.json").find("\"friedman\": null") != std::string::npos);

    REQUIRE(ppmf_experiment(c, "exp1", (tmp / "exp1").c_str()) == PPMF_OK);
    CHECK(line_count(tmp / "exp1/fold_metrics.csv") == 16);
    CHECK(slurp(tmp / "exp1/report.txt").find("MajorityClass") != std::string::npos);
    CHECK(ppmf_experiment(c, "exp7", (tmp / "exp7").c_str()) == PPMF_BAD_CONFIG);

    const std::string in = tmp / "exp1/fold_metrics.csv";
    const char* paths[] = {in.c_str()};
    REQUIRE(ppmf_compare(paths, 1, 0.05, (tmp / "cmp").c_str()) == PPMF_OK);
    CHECK(slurp(tmp / "cmp/report.json") == slurp(tmp / "exp1/report.json"));
    ppmf_config_free(c);
}

TEST_CASE("CLI exit codes") {
    TempDir tmp;
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("") == 1);
    CHECK(run_cli("synth --events " + (tmp / "e.csv") + " --outcomes " + (tmp / "o.csv") + " --patients 80 --seed 2") ==
          0);
    CHECK(run_cli("synth --events " + (tmp / "e.csv") + " --outcomes " + (tmp / "o.csv") + " --prevalence 2") == 1);
    CHECK(run_cli("frame --events " + (tmp / "e.csv") + " --outcomes " + (tmp / "o.csv") + " --out " + (tmp / "f.csv") +
                  " --mask " + (tmp / "m.csv")) == 0);
    CHECK(run_cli("frame --events " + (tmp / "none.csv") + " --outcomes " + (tmp / "o.csv") + " --out " +
                  (tmp / "f.csv") + " --mask " + (tmp / "m.csv")) == 2);
    CHECK(run_cli("train --framed " + (tmp / "f.csv") + " --weights-out " + (tmp / "w.csv") +
                  " --weighting chi2") == 0);
    CHECK(run_cli("train --framed " + (tmp / "f.csv") + " --weights-out " + (tmp / "w.csv") +
                  " --weighting sideways") == 1);
    CHECK(run_cli("predict --train " + (tmp / "f.csv") + " --weights " + (tmp / "w.csv") + " --out " +
                  (tmp / "p.csv")) == 0);
    CHECK(line_count(tmp / "p.csv") == 81);
    CHECK(run_cli("experiment exp4") == 1);
    CHECK(run_cli("compare " + (tmp / "absent.csv")) == 2);
}

}
