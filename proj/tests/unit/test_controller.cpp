#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "mrlop/controller.hpp"

using namespace mrlop;

namespace {

ForecastProvider tiny_provider(int days = 6) {
    return ForecastProvider(default_seasonal_prices(), synth_weather(days, 1000.0, 0.1, 7),
                            LoadSchedule{}, ForecastConfig{});
}

// Small budgets so closed-loop tests stay fast. init == default unless a test
// wants to observe the post-reset boost.
RunConfig tiny_config(Strategy s, double days = 1.0) {
    RunConfig cfg;
    cfg.strategy = s;
    cfg.t_end_hours = days * 24.0;
    cfg.seed = 11;
    cfg.x0 = PlantState{0.5, 75.0, 0.0};
    cfg.cascade.exploratory = ResolutionConfig{2.0, 24, 8, 40, 40};
    cfg.cascade.low = ResolutionConfig{1.0, 24, 8, 50, 50};
    cfg.cascade.high = ResolutionConfig{0.5, 48, 8, 60, 60};
    return cfg;
}

}  // namespace

TEST_CASE("controller: strategy names round-trip") {
    const Strategy all[] = {Strategy::HR,     Strategy::HR_ws,  Strategy::MR,
                            Strategy::MR_ws,  Strategy::ML_RF1, Strategy::ML_RF2,
                            Strategy::ML_GB,  Strategy::RULE};
    for (Strategy s : all) {
        CHECK(strategy_from_name(strategy_name(s)) == s);
    }
    CHECK(std::string(strategy_name(Strategy::MR_ws)) == "MR_ws");
    CHECK(std::string(strategy_name(Strategy::ML_GB)) == "ML_GB");
    CHECK_THROWS_AS(strategy_from_name("mr_ws"), std::invalid_argument);
    CHECK_THROWS_AS(strategy_from_name(""), std::invalid_argument);

    CHECK_FALSE(strategy_uses_pool(Strategy::HR));
    CHECK_FALSE(strategy_uses_pool(Strategy::MR));
    CHECK_FALSE(strategy_uses_pool(Strategy::RULE));
    CHECK(strategy_uses_pool(Strategy::HR_ws));
    CHECK(strategy_uses_pool(Strategy::MR_ws));
    CHECK(strategy_uses_pool(Strategy::ML_RF1));
    CHECK(strategy_uses_pool(Strategy::ML_RF2));
    CHECK(strategy_uses_pool(Strategy::ML_GB));

    for (Strategy s : {Strategy::ML_RF1, Strategy::ML_RF2, Strategy::ML_GB}) {
        CHECK(strategy_uses_ml(s));
    }
    for (Strategy s : {Strategy::HR, Strategy::HR_ws, Strategy::MR, Strategy::MR_ws,
                       Strategy::RULE}) {
        CHECK_FALSE(strategy_uses_ml(s));
    }
}

TEST_CASE("controller: config validation rejects malformed runs") {
    auto cfg = tiny_config(Strategy::MR);
    CHECK_NOTHROW(cfg.validate());

    auto bad = cfg;
    bad.t_end_hours = 36.0;  // not a whole number of daily cycles
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.t_end_hours = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.strategy = Strategy::ML_GB;
    bad.skip_exploratory = true;  // ML needs the exploratory stage for training data
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.x0.soc = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.x0.t_median = 95.0;  // above the tank band
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.cascade.low = ResolutionConfig{1.0, 12, 8, 50, 50};  // 12 h tracking span
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("controller: one-day closed loop has the expected shape") {
    auto provider = tiny_provider();
    auto cfg = tiny_config(Strategy::MR);
    RunLog log = run(cfg, provider);

    CHECK(log.strategy == "MR");
    CHECK(log.seed == 11);
    CHECK(log.cycles_run == 1);
    REQUIRE(log.cycles.size() == 1);
    REQUIRE(log.trajectory.size() == 48);  // one day applied at 30 min steps

    const auto& c0 = log.cycles[0];
    CHECK(c0.cycle == 0);
    CHECK(c0.reset);    // cycle zero always counts as a tariff reset
    CHECK(c0.boosted);
    CHECK(c0.pool_size_at_solve == 0);
    CHECK(c0.t_reset_hours == doctest::Approx(0.0));
    CHECK(c0.evals_exploratory == 40);
    CHECK(c0.evals_low == 50);
    CHECK(c0.evals_high == 60);

    CHECK(log.trajectory.front().t_hours == doctest::Approx(0.0));
    CHECK(log.trajectory.back().t_hours == doctest::Approx(23.5));
    double traj_cost = 0.0;
    for (const auto& r : log.trajectory) traj_cost += r.cost_usd;
    CHECK(log.total_cost_usd == doctest::Approx(traj_cost).epsilon(1e-9));
    CHECK(log.total_cost_usd ==
          doctest::Approx(log.total_energy_cost_usd + log.total_shortfall_usd));

    CHECK(log.final_state.soc >= 0.0);
    CHECK(log.final_state.soc <= 1.0);
    CHECK(log.final_state.t_median >= cfg.plant.t_min - 1e-9);
    CHECK(log.final_state.t_median <= cfg.plant.t_max + 1e-9);
}

TEST_CASE("controller: evaluation ledger matches the per-cycle counts") {
    auto provider = tiny_provider();

    SUBCASE("MR_ws consumes every stage budget each cycle") {
        auto cfg = tiny_config(Strategy::MR_ws, 3.0);
        RunLog log = run(cfg, provider);
        EvalLedger recomputed = evaluation_accounting(log);
        CHECK(recomputed.total() == log.evals.total());
        CHECK(log.evals.exploratory == 3 * 40);
        CHECK(log.evals.low == 3 * 50);
        CHECK(log.evals.high == 3 * 60);
        CHECK(log.evals.total() == 3 * (40 + 50 + 60));
        // MR_ws never consults a surrogate, so no cause-attributed exploration
        CHECK(log.evals.exploratory_warmup == 0);
        CHECK(log.evals.exploratory_uncertainty == 0);
        CHECK(log.events.empty());
    }

    SUBCASE("HR spends the whole cycle budget in one high-resolution solve") {
        auto cfg = tiny_config(Strategy::HR, 2.0);
        RunLog log = run(cfg, provider);
        CHECK(log.evals.exploratory == 0);
        CHECK(log.evals.low == 0);
        CHECK(log.evals.high == 2 * (40 + 50 + 60));
        for (const auto& cl : log.cycles) {
            CHECK(cl.evals_high == 40 + 50 + 60);
        }
    }

    SUBCASE("skip_exploratory removes stage zero") {
        auto cfg = tiny_config(Strategy::MR_ws, 2.0);
        cfg.skip_exploratory = true;
        RunLog log = run(cfg, provider);
        CHECK(log.evals.exploratory == 0);
        CHECK(log.evals.low == 2 * 50);
        CHECK(log.evals.high == 2 * 60);
        for (const auto& cl : log.cycles) {
            CHECK(cl.targets.soc == doctest::Approx(cfg.default_targets.soc));
            CHECK(cl.targets.t_median == doctest::Approx(cfg.default_targets.t_median));
        }
    }
}

TEST_CASE("controller: post-reset cycles run the boosted budgets once") {
    auto provider = tiny_provider();
    auto cfg = tiny_config(Strategy::MR, 2.0);
    cfg.cascade.exploratory.budget_init = 80;
    cfg.cascade.high.budget_init = 200;
    RunLog log = run(cfg, provider);
    REQUIRE(log.cycles.size() == 2);

    CHECK(log.cycles[0].boosted);
    CHECK(log.cycles[0].evals_exploratory == 80);
    CHECK(log.cycles[0].evals_high == 200);

    CHECK_FALSE(log.cycles[1].reset);  // same season, same tariff vector
    CHECK_FALSE(log.cycles[1].boosted);
    CHECK(log.cycles[1].evals_exploratory == 40);
    CHECK(log.cycles[1].evals_high == 60);
}

TEST_CASE("controller: confident surrogate skips exploration after warm-up") {
    auto provider = tiny_provider();
    auto cfg = tiny_config(Strategy::ML_GB, 4.0);
    // Thresholds no realizable state can cross and an effectively infinite
    // staleness window: after the one warm-up solve the model always predicts.
    cfg.uncertainty.theta_soc = 10.0;
    cfg.uncertainty.theta_t_median = 1000.0;
    cfg.uncertainty.t_warmup = 24.0;
    cfg.uncertainty.t_periodic = 1e9;
    RunLog log = run(cfg, provider);
    REQUIRE(log.cycles.size() == 4);

    CHECK(log.cycles[0].path == PathTaken::compute);
    CHECK(log.cycles[0].cause == TriggerCause::warmup);
    CHECK(log.cycles[0].evals_exploratory == 40);
    for (int k = 1; k < 4; ++k) {
        CHECK(log.cycles[k].path == PathTaken::predict);
        CHECK(log.cycles[k].cause == TriggerCause::none);
        CHECK(log.cycles[k].evals_exploratory == 0);
        // tracking stages still run on the predicted targets
        CHECK(log.cycles[k].evals_low == 50);
        CHECK(log.cycles[k].evals_high == 60);
    }
    CHECK(log.evals.exploratory == 40);
    CHECK(log.evals.exploratory_warmup == 40);
    CHECK(log.evals.exploratory_uncertainty == 0);
    CHECK(log.events.empty());  // nothing was uncertainty-triggered
}

TEST_CASE("controller: rule strategy never touches the optimizer") {
    auto provider = tiny_provider();
    auto cfg = tiny_config(Strategy::RULE, 2.0);
    RunLog log = run(cfg, provider);
    CHECK(log.evals.total() == 0);
    CHECK(log.trajectory.size() == 96);
    CHECK(log.cycles.size() == 2);
}

TEST_CASE("controller: identical seeds reproduce the full log byte for byte") {
    auto provider = tiny_provider();
    auto cfg = tiny_config(Strategy::MR_ws, 2.0);
    const std::string a = run(cfg, provider).to_json().dump();
    const std::string b = run(cfg, provider).to_json().dump();
    CHECK(a == b);

    cfg.seed = 12;
    const std::string c = run(cfg, provider).to_json().dump();
    CHECK(a != c);
}

TEST_CASE("controller: results do not depend on the evaluator thread count") {
    auto provider = tiny_provider();
    auto cfg = tiny_config(Strategy::MR, 1.0);

    setenv("MRLOP_THREADS", "1", 1);
    const std::string serial = run(cfg, provider).to_json().dump();
    setenv("MRLOP_THREADS", "3", 1);
    const std::string threaded = run(cfg, provider).to_json().dump();
    unsetenv("MRLOP_THREADS");
    CHECK(serial == threaded);
}

TEST_CASE("controller: trajectory csv has header plus one row per step") {
    auto provider = tiny_provider();
    auto cfg = tiny_config(Strategy::RULE, 1.0);
    RunLog log = run(cfg, provider);

    namespace fs = std::filesystem;
    const fs::path path = "/tmp/mrlop_test_traj.csv";
    write_trajectory_csv(path.string(), log.trajectory);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t_hours,soc,t_median_c,q_prod_mw,p_grid_kw,price,cost_usd");
    int rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 48);
    fs::remove(path);
}
