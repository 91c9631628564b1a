#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "mrlop/config.hpp"

using namespace mrlop;
using nlohmann::ordered_json;

TEST_CASE("config: plant parameters survive a json round-trip") {
    PlantParams p;
    p.battery_capacity = 400.0;
    p.pv_capacity = 512.5;
    p.export_credit = false;
    PlantParams back = plant_from_json(plant_to_json(p));
    CHECK(plant_to_json(back).dump() == plant_to_json(p).dump());
    CHECK(back.battery_capacity == doctest::Approx(400.0));
    CHECK_FALSE(back.export_credit);
}

TEST_CASE("config: run configuration round-trips exactly") {
    RunConfig cfg;
    cfg.strategy = Strategy::ML_RF2;
    cfg.t_end_hours = 72.0;
    cfg.seed = 99;
    cfg.x0 = PlantState{0.25, 82.0, 0.0};
    cfg.skip_exploratory = false;
    cfg.uncertainty.theta_soc = 0.02;
    cfg.cascade.high.budget_init = 12345;
    cfg.rule.n_price_hours = 6;

    const std::string a = run_config_to_json(cfg).dump();
    RunConfig back = run_config_from_json(run_config_to_json(cfg));
    const std::string b = run_config_to_json(back).dump();
    CHECK(a == b);
    CHECK(back.strategy == Strategy::ML_RF2);
    CHECK(back.seed == 99);
    CHECK(back.cascade.high.budget_init == 12345);
    CHECK(back.uncertainty.theta_soc == doctest::Approx(0.02));
}

TEST_CASE("config: overrides land on the right fields") {
    RunConfig cfg;
    ordered_json j = ordered_json::parse(R"({
        "strategy": "HR_ws",
        "seed": 42,
        "x0": {"soc": 0.1, "t_median_c": 71.0},
        "plant": {"battery_capacity": 400.0, "export_credit": false},
        "weights": {"gamma_day": 50.0},
        "cascade": {"low": {"pop_size": 24, "budget_default": 800}},
        "uncertainty": {"kind": "gb", "t_warmup_hours": 48.0},
        "rule": {"n_price_hours": 5},
        "skip_exploratory": true,
        "default_targets": {"soc": 0.3}
    })");
    apply_run_overrides(cfg, j);
    CHECK(cfg.strategy == Strategy::HR_ws);
    CHECK(cfg.seed == 42);
    CHECK(cfg.x0.soc == doctest::Approx(0.1));
    CHECK(cfg.x0.t_median == doctest::Approx(71.0));
    CHECK(cfg.plant.battery_capacity == doctest::Approx(400.0));
    CHECK_FALSE(cfg.plant.export_credit);
    CHECK(cfg.weights.gamma_day == doctest::Approx(50.0));
    CHECK(cfg.cascade.low.pop_size == 24);
    CHECK(cfg.cascade.low.budget_default == 800);
    CHECK(cfg.cascade.high.pop_size == 96);  // untouched defaults stay put
    CHECK(cfg.uncertainty.kind == ModelKind::gb);
    CHECK(cfg.uncertainty.t_warmup == doctest::Approx(48.0));
    CHECK(cfg.rule.n_price_hours == 5);
    CHECK(cfg.skip_exploratory);
    CHECK(cfg.default_targets.soc == doctest::Approx(0.3));
}

TEST_CASE("config: unknown keys and wrong types are rejected by name") {
    RunConfig cfg;
    try {
        apply_run_overrides(cfg, ordered_json::parse(R"({"plant": {"battery_kwh": 1.0}})"));
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("plant.battery_kwh") != std::string::npos);
    }

    CHECK_THROWS_AS(
        apply_run_overrides(cfg, ordered_json::parse(R"({"typo_key": 1})")),
        std::invalid_argument);
    CHECK_THROWS_AS(
        apply_run_overrides(cfg, ordered_json::parse(R"({"seed": -3})")),
        std::invalid_argument);
    CHECK_THROWS_AS(
        apply_run_overrides(cfg, ordered_json::parse(R"({"t_end_hours": "one day"})")),
        std::invalid_argument);
    CHECK_THROWS_AS(
        apply_run_overrides(cfg, ordered_json::parse(R"({"skip_exploratory": 1})")),
        std::invalid_argument);
    CHECK_THROWS_AS(
        apply_run_overrides(cfg,
                            ordered_json::parse(R"({"uncertainty": {"kind": "svm"}})")),
        std::invalid_argument);

    PlantParams p;
    CHECK_THROWS_AS(apply_plant_overrides(p, ordered_json::parse(R"({"cop": "three"})")),
                    std::invalid_argument);
}

TEST_CASE("config: experiment spec requires strategies and seeds") {
    auto ok = ordered_json::parse(R"({
        "strategies": ["MR_ws", "RULE"],
        "seeds": [1, 2, 3],
        "horizon_days": 7,
        "out_dir": "/tmp/xyz",
        "data": {"weather_days": 12, "jitter_frac": 0.1, "weather_seed": 7}
    })");
    auto spec = ExperimentSpec::from_json(ok);
    REQUIRE(spec.strategies.size() == 2);
    CHECK(spec.strategies[0] == Strategy::MR_ws);
    CHECK(spec.strategies[1] == Strategy::RULE);
    CHECK(spec.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(spec.horizon_days == doctest::Approx(7.0));
    CHECK(spec.out_dir == "/tmp/xyz");
    CHECK(spec.data.weather_days == 12);
    CHECK(spec.base.t_end_hours == doctest::Approx(168.0));  // derived from horizon

    auto no_strats = ok;
    no_strats.erase("strategies");
    CHECK_THROWS_AS(ExperimentSpec::from_json(no_strats), std::invalid_argument);

    auto empty_seeds = ok;
    empty_seeds["seeds"] = ordered_json::array();
    CHECK_THROWS_AS(ExperimentSpec::from_json(empty_seeds), std::invalid_argument);

    auto bad_strat = ok;
    bad_strat["strategies"] = {"MRWS"};
    CHECK_THROWS_AS(ExperimentSpec::from_json(bad_strat), std::invalid_argument);

    auto bad_days = ok;
    bad_days["horizon_days"] = -1;
    CHECK_THROWS_AS(ExperimentSpec::from_json(bad_days), std::invalid_argument);
}

TEST_CASE("config: overrides block feeds the shared run configuration") {
    auto spec = ExperimentSpec::from_json(ordered_json::parse(R"({
        "strategies": ["MR"],
        "seeds": [1],
        "overrides": {
            "plant": {"battery_capacity": 400.0},
            "cascade": {"exploratory": {"pop_size": 24, "budget_default": 500}}
        }
    })"));
    CHECK(spec.base.plant.battery_capacity == doctest::Approx(400.0));
    CHECK(spec.base.cascade.exploratory.pop_size == 24);
    CHECK(spec.base.cascade.exploratory.budget_default == 500);

    auto echoed = spec.echo();
    CHECK(echoed["strategies"][0] == "MR");
    CHECK(echoed["seeds"][0] == 1);
    CHECK(echoed["run_config"]["plant"]["battery_capacity"] == doctest::Approx(400.0));
}

TEST_CASE("config: file loading reports open and parse failures") {
    try {
        ExperimentSpec::from_file("/tmp/does_not_exist_mrlop.json");
        FAIL("expected runtime_error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("cannot open config file:") != std::string::npos);
    }

    const char* path = "/tmp/mrlop_bad_config.json";
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(ExperimentSpec::from_file(path), std::invalid_argument);
    std::remove(path);

    const char* good = "/tmp/mrlop_good_config.json";
    std::ofstream(good) << R"({"strategies": ["RULE"], "seeds": [4], "horizon_days": 2})";
    auto spec = ExperimentSpec::from_file(good);
    CHECK(spec.strategies[0] == Strategy::RULE);
    CHECK(spec.seeds[0] == 4);
    std::remove(good);
}

TEST_CASE("config: provider construction honours the data block") {
    ExperimentSpec spec;
    spec.strategies = {Strategy::RULE};
    spec.seeds = {1};
    spec.data.weather_days = 9;
    spec.data.jitter_frac = 0.1;
    spec.data.weather_seed = 7;
    auto provider = spec.make_provider();
    CHECK(provider.coverage_hours() == doctest::Approx(9 * 24.0));

    // CSV paths take precedence over the synthetic generator.
    namespace fs = std::filesystem;
    const fs::path wpath = "/tmp/mrlop_test_weather.csv";
    write_weather_csv(wpath.string(), synth_weather(4, 850.0));
    ExperimentSpec csv_spec = spec;
    csv_spec.data.weather_csv = wpath.string();
    auto csv_provider = csv_spec.make_provider();
    CHECK(csv_provider.coverage_hours() == doctest::Approx(4 * 24.0));
    fs::remove(wpath);
}
