#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <vector>

#include "mclab/experiment.hpp"

using namespace mclab;

TEST_SUITE_BEGIN("experiment");

TEST_CASE("minimal config fills documented defaults") {
    auto cfg = parse_config(R"({"n1": 10, "n2": 12, "r": 2})");
    CHECK(cfg.n1 == 10);
    CHECK(cfg.n2 == 12);
    CHECK(cfg.r == 2);
    CHECK(cfg.matrix_model == MatrixModel::Haar);
    CHECK(cfg.sampling_model == SamplingModel::UniformNoReplace);
    CHECK(cfg.m_grid.empty());
    CHECK(cfg.p_grid.empty());
    CHECK(cfg.beta == 2.0);
    CHECK(cfg.trials == 100);
    CHECK(cfg.seed == 0);
    CHECK(cfg.recovery_tol == 1e-4);
    CHECK(cfg.solver_tol == 1e-8);
    CHECK(cfg.max_iterations == 5000);
    CHECK_FALSE(cfg.certify);
    CHECK(cfg.output_path.empty());
}

TEST_CASE("unknown keys are rejected by name") {
    CHECK_THROWS_WITH_AS(parse_config(R"({"n1": 4, "n2": 5, "r": 2, "rank": 2})"),
                         doctest::Contains("unknown key 'rank'"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"n1": 4, "n2": 5, "r": 2, "tolerances": {"recovery": 1e-3, "abs": 1e-6}})"),
        doctest::Contains("unknown tolerances key 'abs'"), ConfigError);
}

TEST_CASE("every violation is collected, not just the first") {
    try {
        parse_config(R"({"n1": -3, "n2": "wide", "beta": 0.5, "bogus": 1})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        auto has = [&](const char* needle) {
            return std::any_of(e.violations.begin(), e.violations.end(),
                               [&](const std::string& v) {
                                   return v.find(needle) != std::string::npos;
                               });
        };
        CHECK(e.violations.size() >= 5);
        CHECK(has("n1 must be at least 1"));
        CHECK(has("n2 must be an integer"));
        CHECK(has("r is required"));
        CHECK(has("beta must be greater than"));
        CHECK(has("unknown key 'bogus'"));
        // what() carries the same list for contexts that only see the exception
        for (const auto& v : e.violations)
            CHECK(std::string(e.what()).find(v) != std::string::npos);
    }
}

TEST_CASE("negative r names the offending field") {
    try {
        parse_config(R"({"n1": 4, "n2": 5, "r": -1})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.violations.size() == 1);
        CHECK(e.violations[0] == "r must be at least 1");
    }
}

TEST_CASE("grid strings expand to inclusive ranges") {
    auto cfg = parse_config(
        R"({"n1": 20, "n2": 20, "r": 2, "m_grid": "100:300:100"})");
    CHECK(cfg.m_grid == std::vector<int64_t>{100, 200, 300});
    auto cfgp = parse_config(
        R"({"n1": 8, "n2": 8, "r": 1, "sampling_model": "bernoulli",
            "p_grid": "0.2:1.0:0.4"})");
    REQUIRE(cfgp.p_grid.size() == 3);
    CHECK(cfgp.p_grid[0] == doctest::Approx(0.2));
    CHECK(cfgp.p_grid[1] == doctest::Approx(0.6));
    CHECK(cfgp.p_grid[2] == doctest::Approx(1.0));
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"n1": 20, "n2": 20, "r": 2, "m_grid": "300:100:50"})"),
        doctest::Contains("start:stop:step"), ConfigError);
}

TEST_CASE("grid cross-checks") {
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"n1": 10, "n2": 10, "r": 2, "sampling_model": "bernoulli",
                         "m_grid": [50], "p_grid": [0.5]})"),
        doctest::Contains("not both"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"n1": 10, "n2": 10, "r": 2, "m_grid": [60, 50]})"),
        doctest::Contains("strictly increasing"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"n1": 10, "n2": 10, "r": 2, "m_grid": [120]})"),
        doctest::Contains("cell count"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"n1": 10, "n2": 10, "r": 2, "p_grid": [0.5]})"),
        doctest::Contains("bernoulli"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"n1": 10, "n2": 10, "r": 2, "certify": true})"),
        doctest::Contains("with-replace"), ConfigError);
}

TEST_CASE("tolerances block overrides defaults") {
    auto cfg = parse_config(
        R"({"n1": 6, "n2": 7, "r": 2,
            "tolerances": {"recovery": 1e-3, "solver": 1e-9}})");
    CHECK(cfg.recovery_tol == 1e-3);
    CHECK(cfg.solver_tol == 1e-9);
}

TEST_CASE("config hash is stable and content-sensitive") {
    auto a = parse_config(R"({"n1": 10, "n2": 12, "r": 2})");
    auto b = parse_config(R"({ "r": 2, "n2": 12, "n1": 10 })");
    CHECK(config_hash(a).size() == 16);
    CHECK(config_hash(a) == config_hash(b));
    auto c = parse_config(R"({"n1": 10, "n2": 12, "r": 2, "seed": 7})");
    CHECK(config_hash(a) != config_hash(c));
    CHECK(config_hash(a).find_first_not_of("0123456789abcdef") == std::string::npos);
}

TEST_CASE("missing config file reports its path") {
    CHECK_THROWS_WITH_AS(parse_config_file("/tmp/mclab_no_such_config.json"),
                         doctest::Contains("cannot open"), ConfigError);
}

TEST_CASE("phase trials replay byte-identically") {
    auto cfg = parse_config(
        R"({"n1": 8, "n2": 8, "r": 2, "m_grid": [30, 44], "trials": 3,
            "seed": 11, "max_iterations": 600})");
    auto rec1 = run_phase_trials(cfg);
    auto rec2 = run_phase_trials(cfg);
    REQUIRE(rec1.size() == 6);
    for (size_t i = 1; i < rec1.size(); ++i) {
        const bool ordered = rec1[i - 1].m < rec1[i].m ||
                             (rec1[i - 1].m == rec1[i].m &&
                              rec1[i - 1].trial < rec1[i].trial);
        CHECK(ordered);
    }
    std::ostringstream csv1, csv2;
    write_phase_csv(csv1, cfg, rec1);
    write_phase_csv(csv2, cfg, rec2);
    const std::string text = csv1.str();
    CHECK(text == csv2.str());
    CHECK(text.rfind(
              "m,trial,seed,recovered,certified,rel_error,iterations,config_hash\n",
              0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}

TEST_CASE("bernoulli sweep uses nominal m and recovers at full coverage") {
    auto cfg = parse_config(
        R"({"n1": 8, "n2": 8, "r": 1, "sampling_model": "bernoulli",
            "p_grid": [0.4, 1.0], "trials": 2, "seed": 3})");
    auto points = run_phase_sweep(cfg);
    REQUIRE(points.size() == 2);
    CHECK(points[0].m == 26);
    CHECK(points[1].m == 64);
    // p = 1 observes everything, so the solver returns the matrix exactly
    CHECK(points[1].success_rate == 1.0);
    CHECK(points[1].mean_error <= 1e-10);
    for (const auto& pt : points) {
        CHECK(pt.trials == 2);
        CHECK(pt.success_rate >= 0.0);
        CHECK(pt.success_rate <= 1.0);
        CHECK(pt.cert_rate == 0.0);
    }
}

TEST_CASE("verify suite reports every inequality as holding") {
    auto cfg = parse_config(R"({"n1": 10, "n2": 12, "r": 2, "trials": 40, "seed": 5})");
    auto reports = run_verify_suite(cfg);
    REQUIRE(reports.size() == 7);
    const char* names[] = {"duplicate-count",  "near-isometry",
                           "inf-norm-deviation", "norm-contraction",
                           "operator-markov",  "golden-thompson",
                           "bernstein-scalar"};
    for (size_t i = 0; i < 7; ++i) {
        CHECK(reports[i].bound_name == names[i]);
        CHECK(bound_report_passes(reports[i]));
        CHECK_FALSE(reports[i].params.empty());
        CHECK(reports[i].trials >= 1);
    }
    // the scalar reduction is exact, not statistical
    CHECK(reports[6].empirical_exceed_frequency == 0.0);
    CHECK(reports[6].trials == 100);

    std::ostringstream csv;
    write_bound_csv(csv, cfg, reports);
    const std::string text = csv.str();
    CHECK(text.rfind(
              "bound_name,params,theoretical,empirical,trials,stderr,verdict,seed,config_hash\n",
              0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 8);
    CHECK(text.find("FAIL") == std::string::npos);
}

TEST_CASE("runners reject degenerate setups") {
    ExperimentConfig cfg;
    cfg.n1 = 10;
    cfg.n2 = 12;
    cfg.r = 2;
    cfg.trials = 0;
    CHECK_THROWS_AS(run_verify_suite(cfg), ConfigError);
    cfg.m_grid = {20};
    CHECK_THROWS_AS(run_phase_trials(cfg), ConfigError);
    cfg.trials = 1;
    cfg.m_grid.clear();
    CHECK_THROWS_WITH_AS(run_phase_trials(cfg), doctest::Contains("m_grid or p_grid"),
                         ConfigError);
}

TEST_SUITE_END();
