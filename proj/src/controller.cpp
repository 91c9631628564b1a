#include "mrlop/controller.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "mrlop/config.hpp"
#include "mrlop/rng.hpp"

namespace mrlop {

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::HR: return "HR";
        case Strategy::HR_ws: return "HR_ws";
        case Strategy::MR: return "MR";
        case Strategy::MR_ws: return "MR_ws";
        case Strategy::ML_RF1: return "ML_RF1";
        case Strategy::ML_RF2: return "ML_RF2";
        case Strategy::ML_GB: return "ML_GB";
        case Strategy::RULE: return "RULE";
    }
    return "?";
}

Strategy strategy_from_name(const std::string& name) {
    for (Strategy s : {Strategy::HR, Strategy::HR_ws, Strategy::MR, Strategy::MR_ws,
                       Strategy::ML_RF1, Strategy::ML_RF2, Strategy::ML_GB, Strategy::RULE}) {
        if (name == strategy_name(s)) return s;
    }
    throw std::invalid_argument("unknown strategy: " + name);
}

bool strategy_uses_pool(Strategy s) {
    switch (s) {
        case Strategy::HR_ws:
        case Strategy::MR_ws:
        case Strategy::ML_RF1:
        case Strategy::ML_RF2:
        case Strategy::ML_GB: return true;
        default: return false;
    }
}

bool strategy_uses_ml(Strategy s) {
    return s == Strategy::ML_RF1 || s == Strategy::ML_RF2 || s == Strategy::ML_GB;
}

void RunConfig::validate() const {
    plant.validate();
    cascade.validate();
    uncertainty.validate();
    rule.validate();
    if (!(t_end_hours > 0.0)) throw std::invalid_argument("run: t_end_hours must be positive");
    double cycles = t_end_hours / 24.0;
    if (std::abs(cycles - std::llround(cycles)) > 1e-9) {
        throw std::invalid_argument("run: t_end_hours must be a multiple of 24");
    }
    double span = cascade.low.dt_hours * cascade.low.horizon_steps;
    if (std::abs(span - 24.0) > 1e-9) {
        throw std::invalid_argument("run: tracking horizon must span 24 h");
    }
    if (x0.soc < 0.0 || x0.soc > 1.0) throw std::invalid_argument("run: x0.soc out of [0,1]");
    if (x0.t_median < plant.t_min || x0.t_median > plant.t_max) {
        throw std::invalid_argument("run: x0.t_median outside tank band");
    }
    if (default_targets.soc < 0.0 || default_targets.soc > 1.0 ||
        default_targets.t_median < plant.t_min || default_targets.t_median > plant.t_max) {
        throw std::invalid_argument("run: default_targets outside physical range");
    }
    if (!(reset_epsilon > 0.0)) throw std::invalid_argument("run: reset_epsilon must be positive");
    if (skip_exploratory && strategy_uses_ml(strategy)) {
        throw std::invalid_argument(
            "run: skip_exploratory cannot be combined with an ML strategy");
    }
    if (weights.gamma_day < 0.0 || weights.gamma_soc < 0.0 || weights.gamma_t < 0.0) {
        throw std::invalid_argument("run: cost weights must be non-negative");
    }
}

namespace {

constexpr double kNeverComputed = -std::numeric_limits<double>::infinity();

// Per-cycle RNG stream slots, all derived from the run seed.
enum SeedSlot : std::uint64_t {
    kSeedExploratory = 0,
    kSeedLow = 1,
    kSeedBlend = 2,
    kSeedHigh = 3,
    kSeedEliteSample = 4,
};

std::uint64_t slot_seed(std::uint64_t run_seed, int cycle, SeedSlot slot) {
    return mix_seed(mix_seed(run_seed, static_cast<std::uint64_t>(cycle)), slot);
}

// HR_ws warm start: up to floor(S/2) pool entries drawn without replacement.
std::vector<std::vector<double>> sample_elites(const ElitePool& pool, int pop_size, Rng& rng) {
    const std::size_t want =
        std::min(pool.size(), static_cast<std::size_t>(pop_size / 2));
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<std::vector<double>> out;
    out.reserve(want);
    for (std::size_t i = 0; i < want; ++i) {
        std::size_t j = i + rng.index(idx.size() - i);
        std::swap(idx[i], idx[j]);
        out.push_back(pool.entries[idx[i]]);
    }
    return out;
}

}  // namespace

RunLog run(const RunConfig& cfg_in, const ForecastProvider& provider) {
    RunConfig cfg = cfg_in;
    cfg.plant.finalize();
    // The strategy name pins the surrogate family: RF with kappa 1 or 2, or
    // the quantile-GB pair. Config values for the other family are ignored.
    switch (cfg.strategy) {
        case Strategy::ML_RF1:
            cfg.uncertainty.kind = ModelKind::rf;
            cfg.uncertainty.kappa = 1.0;
            break;
        case Strategy::ML_RF2:
            cfg.uncertainty.kind = ModelKind::rf;
            cfg.uncertainty.kappa = 2.0;
            break;
        case Strategy::ML_GB:
            cfg.uncertainty.kind = ModelKind::gb;
            break;
        default: break;
    }
    cfg.validate();

    const int n_cycles = static_cast<int>(std::llround(cfg.t_end_hours / 24.0));
    const double need = cfg.t_end_hours + 48.0;
    if (provider.coverage_hours() + 1e-9 < need) {
        throw std::runtime_error("run: forecast covers " +
                                 std::to_string(provider.coverage_hours()) +
                                 " h but " + std::to_string(need) + " h are required");
    }

    const bool uses_ml = strategy_uses_ml(cfg.strategy);
    const bool uses_pool = strategy_uses_pool(cfg.strategy);
    const bool optimizes = cfg.strategy != Strategy::RULE;

    PlantState x = cfg.x0;
    ElitePool pool;
    ElitePool always_empty;  // MR blends against an empty pool every cycle
    TerminalTargetPredictor predictor(cfg.uncertainty,
                                      mix_seed(cfg.seed, 0x6d6c7072ULL));
    double t_reset = 0.0;
    double t_last_compute = kNeverComputed;
    std::vector<double> p_last;

    long long budget_expl = cfg.cascade.exploratory.budget_default;
    long long budget_low = cfg.cascade.low.budget_default;
    long long budget_high = cfg.cascade.high.budget_default;

    const Bounds high_bounds = control_bounds(cfg.cascade.high.horizon_steps, cfg.plant);

    RunLog log;
    log.strategy = strategy_name(cfg.strategy);
    log.seed = cfg.seed;
    log.t_end_hours = cfg.t_end_hours;
    log.config_echo = run_config_to_json(cfg);

    for (int k = 0; k < n_cycles; ++k) {
        const double t_k = 24.0 * k;
        std::vector<double> p_now = provider.reset_price_vector(t_k);
        const bool reset = (k == 0) || detect_reset(p_now, p_last, cfg.reset_epsilon);
        if (reset) {
            pool.clear();
            predictor.reset();
            t_reset = t_k;
            t_last_compute = kNeverComputed;
            budget_expl = cfg.cascade.exploratory.budget_init;
            budget_low = cfg.cascade.low.budget_init;
            budget_high = cfg.cascade.high.budget_init;
        }
        const bool boosted = reset;
        p_last = std::move(p_now);

        CycleLog cl;
        cl.cycle = k;
        cl.t_hours = t_k;
        cl.reset = reset;
        cl.boosted = boosted;
        cl.pool_size_at_solve = static_cast<int>(pool.size());
        cl.t_reset_hours = t_reset;

        std::vector<double> plan;
        ForecastSlice apply_slice;
        std::vector<Member> final_population;

        if (cfg.strategy == Strategy::RULE) {
            std::array<double, 24> day_prices{};
            for (int h = 0; h < 24; ++h) day_prices[h] = provider.price_at(t_k + h);
            plan = plan_day(day_prices, provider.load(), cfg.rule, cfg.plant,
                            tank_energy_from_temp(x.t_median, cfg.plant));
            apply_slice = provider.slice(t_k, 0.5, 48);
        } else {
            const ForecastSlice slice_high = provider.slice(
                t_k, cfg.cascade.high.dt_hours, cfg.cascade.high.horizon_steps);

            if (cfg.strategy == Strategy::HR || cfg.strategy == Strategy::HR_ws) {
                // Single-stage solve spending what the cascade strategies
                // spend across all their stages this cycle.
                const long long combined =
                    (cfg.skip_exploratory ? 0 : budget_expl) + budget_low + budget_high;
                std::vector<std::vector<double>> seeds;
                if (cfg.strategy == Strategy::HR_ws) {
                    Rng rng(slot_seed(cfg.seed, k, kSeedEliteSample));
                    seeds = sample_elites(pool, cfg.cascade.high.pop_size, rng);
                }
                CascadeResult res = solve_high_only(
                    x, cfg.default_targets, seeds, slice_high, cfg.plant, cfg.weights,
                    cfg.cascade.high, combined, slot_seed(cfg.seed, k, kSeedHigh));
                cl.targets = cfg.default_targets;
                cl.evals_high = res.evals_high;
                plan = std::move(res.best_high);
                final_population = std::move(res.final_population_high);
            } else {
                TerminalTargets targets = cfg.default_targets;
                bool explore = !cfg.skip_exploratory;
                TerminalTargetPredictor::Decision decision;
                if (uses_ml) {
                    const ForecastSlice feat_slice = provider.slice(t_k, 2.0, 24);
                    decision = predictor.decide(feat_slice.irradiance_w_m2, t_k, t_reset,
                                                t_last_compute);
                    cl.path = decision.path;
                    cl.cause = decision.cause;
                    explore = decision.path == PathTaken::compute;
                    if (!explore) {
                        targets = TerminalTargets{decision.soc->mean, decision.t_median->mean};
                    }
                }
                if (explore) {
                    const ForecastSlice slice_expl =
                        provider.slice(t_k, cfg.cascade.exploratory.dt_hours,
                                       cfg.cascade.exploratory.horizon_steps);
                    ExploratoryResult expl = solve_exploratory(
                        x, slice_expl, cfg.plant, cfg.weights, cfg.cascade.exploratory,
                        budget_expl, 24.0, slot_seed(cfg.seed, k, kSeedExploratory));
                    targets = expl.targets;
                    cl.evals_exploratory = expl.evals;
                    if (uses_ml) {
                        const ForecastSlice feat_slice = provider.slice(t_k, 2.0, 24);
                        predictor.add_observation(feat_slice.irradiance_w_m2, targets.soc,
                                                  targets.t_median);
                        t_last_compute = t_k;
                        if (decision.cause == TriggerCause::uncertainty) {
                            ExplorationEvent ev;
                            ev.t_hours = t_k;
                            ev.pred_soc = *decision.soc;
                            ev.pred_t_median = *decision.t_median;
                            ev.realized_soc = targets.soc;
                            ev.realized_t_median = targets.t_median;
                            ev.theta_soc = cfg.uncertainty.theta_soc;
                            ev.theta_t_median = cfg.uncertainty.theta_t_median;
                            cl.event_index = static_cast<int>(log.events.size());
                            log.events.push_back(ev);
                        }
                    }
                }
                cl.targets = targets;

                const ForecastSlice slice_low = provider.slice(
                    t_k, cfg.cascade.low.dt_hours, cfg.cascade.low.horizon_steps);
                const ElitePool& blend_pool =
                    (cfg.strategy == Strategy::MR) ? always_empty : pool;
                CascadeResult res = find_optimal_control(
                    x, targets, blend_pool, slice_low, slice_high, cfg.plant, cfg.weights,
                    cfg.cascade, budget_low, budget_high,
                    slot_seed(cfg.seed, k, kSeedLow), slot_seed(cfg.seed, k, kSeedHigh),
                    slot_seed(cfg.seed, k, kSeedBlend));
                cl.evals_low = res.evals_low;
                cl.evals_high = res.evals_high;
                plan = std::move(res.best_high);
                final_population = std::move(res.final_population_high);
            }
            apply_slice = provider.slice(t_k, cfg.cascade.high.dt_hours,
                                         cfg.cascade.high.horizon_steps);
        }

        if (optimizes && uses_pool) {
            pool.append(final_population, cfg.cascade.high.horizon_steps, high_bounds);
        }

        // Apply the plan open-loop for the full day.
        SimResult sim = simulate(x, plan, apply_slice, cfg.plant, cfg.weights);
        for (int i = 0; i < apply_slice.steps(); ++i) {
            TrajectoryRow row;
            row.t_hours = t_k + i * apply_slice.dt_hours;
            row.soc = sim.states[i].soc;  // end-of-step state
            row.t_median_c = sim.states[i].t_median;
            row.q_prod_mw = sim.states[i].q_prod;
            row.p_grid_kw = sim.outputs[i].p_grid_kw;
            row.price = apply_slice.prices_usd_per_kwh[i];
            row.cost_usd = sim.outputs[i].energy_cost_usd + sim.outputs[i].shortfall_usd;
            log.trajectory.push_back(row);
            cl.energy_cost_usd += sim.outputs[i].energy_cost_usd;
            cl.shortfall_usd += sim.outputs[i].shortfall_usd;
        }
        cl.cost_usd = cl.energy_cost_usd + cl.shortfall_usd;
        x = sim.states.back();

        log.total_energy_cost_usd += cl.energy_cost_usd;
        log.total_shortfall_usd += cl.shortfall_usd;
        log.cycles.push_back(cl);

        if (boosted) {
            budget_expl = cfg.cascade.exploratory.budget_default;
            budget_low = cfg.cascade.low.budget_default;
            budget_high = cfg.cascade.high.budget_default;
        }
    }

    log.cycles_run = n_cycles;
    log.total_cost_usd = log.total_energy_cost_usd + log.total_shortfall_usd;
    log.final_state = x;
    log.evals = evaluation_accounting(log);
    if (cfg.save_model_snapshots && uses_ml) {
        log.model_snapshot = predictor.snapshot();
    }
    return log;
}

EvalLedger evaluation_accounting(const RunLog& log) {
    EvalLedger ledger;
    for (const auto& cl : log.cycles) {
        ledger.exploratory += cl.evals_exploratory;
        switch (cl.cause) {
            case TriggerCause::warmup: ledger.exploratory_warmup += cl.evals_exploratory; break;
            case TriggerCause::periodic:
                ledger.exploratory_periodic += cl.evals_exploratory;
                break;
            case TriggerCause::uncertainty:
                ledger.exploratory_uncertainty += cl.evals_exploratory;
                break;
            case TriggerCause::none: break;
        }
        ledger.low += cl.evals_low;
        ledger.high += cl.evals_high;
    }
    return ledger;
}

nlohmann::ordered_json RunLog::to_json() const {
    nlohmann::ordered_json j;
    j["strategy"] = strategy;
    j["seed"] = seed;
    j["t_end_hours"] = t_end_hours;
    j["cycles_run"] = cycles_run;
    j["total_cost_usd"] = total_cost_usd;
    j["total_energy_cost_usd"] = total_energy_cost_usd;
    j["total_shortfall_usd"] = total_shortfall_usd;
    {
        nlohmann::ordered_json e;
        e["exploratory"] = evals.exploratory;
        e["exploratory_warmup"] = evals.exploratory_warmup;
        e["exploratory_periodic"] = evals.exploratory_periodic;
        e["exploratory_uncertainty"] = evals.exploratory_uncertainty;
        e["low"] = evals.low;
        e["high"] = evals.high;
        e["total"] = evals.total();
        j["evals"] = std::move(e);
    }
    {
        nlohmann::ordered_json f;
        f["soc"] = final_state.soc;
        f["t_median_c"] = final_state.t_median;
        f["q_prod_mw"] = final_state.q_prod;
        j["final_state"] = std::move(f);
    }
    j["cycles"] = nlohmann::ordered_json::array();
    for (const auto& c : cycles) {
        nlohmann::ordered_json jc;
        jc["cycle"] = c.cycle;
        jc["t_hours"] = c.t_hours;
        jc["reset"] = c.reset;
        jc["boosted"] = c.boosted;
        jc["pool_size_at_solve"] = c.pool_size_at_solve;
        jc["t_reset_hours"] = c.t_reset_hours;
        jc["path"] = path_name(c.path);
        jc["cause"] = cause_name(c.cause);
        jc["targets"] = {{"soc", c.targets.soc}, {"t_median_c", c.targets.t_median}};
        jc["evals_exploratory"] = c.evals_exploratory;
        jc["evals_low"] = c.evals_low;
        jc["evals_high"] = c.evals_high;
        jc["energy_cost_usd"] = c.energy_cost_usd;
        jc["shortfall_usd"] = c.shortfall_usd;
        jc["cost_usd"] = c.cost_usd;
        jc["event_index"] = c.event_index;
        j["cycles"].push_back(std::move(jc));
    }
    j["events"] = nlohmann::ordered_json::array();
    for (const auto& e : events) {
        nlohmann::ordered_json je;
        je["t_hours"] = e.t_hours;
        je["pred_soc_mean"] = e.pred_soc.mean;
        je["pred_soc_ucb"] = e.pred_soc.ucb;
        je["pred_t_median_mean"] = e.pred_t_median.mean;
        je["pred_t_median_ucb"] = e.pred_t_median.ucb;
        je["realized_soc"] = e.realized_soc;
        je["realized_t_median"] = e.realized_t_median;
        je["theta_soc"] = e.theta_soc;
        je["theta_t_median"] = e.theta_t_median;
        j["events"].push_back(std::move(je));
    }
    j["trajectory_columns"] = {"t_hours", "soc",   "t_median_c", "q_prod_mw",
                               "p_grid_kw", "price", "cost_usd"};
    j["trajectory"] = nlohmann::ordered_json::array();
    for (const auto& r : trajectory) {
        j["trajectory"].push_back({r.t_hours, r.soc, r.t_median_c, r.q_prod_mw,
                                   r.p_grid_kw, r.price, r.cost_usd});
    }
    j["config"] = config_echo;
    j["model_snapshot"] = model_snapshot.is_null() ? nlohmann::ordered_json(nullptr)
                                                   : model_snapshot;
    return j;
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t_hours,soc,t_median_c,q_prod_mw,p_grid_kw,price,cost_usd\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      r.t_hours, r.soc, r.t_median_c, r.q_prod_mw, r.p_grid_kw, r.price,
                      r.cost_usd);
        out << buf;
    }
}

}  // namespace mrlop
