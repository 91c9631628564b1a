#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"

#include "mrlop/baseline.hpp"
#include "mrlop/cascade.hpp"
#include "mrlop/forecast.hpp"
#include "mrlop/plant.hpp"
#include "mrlop/surrogate.hpp"

namespace mrlop {

enum class Strategy { HR, HR_ws, MR, MR_ws, ML_RF1, ML_RF2, ML_GB, RULE };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);  // throws std::invalid_argument

bool strategy_uses_pool(Strategy s);
bool strategy_uses_ml(Strategy s);

struct RunConfig {
    Strategy strategy = Strategy::MR_ws;
    double t_end_hours = 7 * 24.0;
    std::uint64_t seed = 1;
    PlantState x0{};

    PlantParams plant{};
    CostWeights weights{};
    CascadeConfig cascade{};
    UncertaintyConfig uncertainty{};
    RuleParams rule{};
    ForecastConfig forecast{};

    // Ablation mode: skip the exploratory stage and fall back to
    // default_targets (applies to MR / MR_ws; HR / HR_ws never run it).
    bool skip_exploratory = false;
    TerminalTargets default_targets{0.0, 70.0};

    double reset_epsilon = 1e-8;
    bool save_model_snapshots = false;

    void validate() const;
};

struct CycleLog {
    int cycle = 0;
    double t_hours = 0.0;
    bool reset = false;
    bool boosted = false;  // budgets at their post-reset values this cycle
    int pool_size_at_solve = 0;
    double t_reset_hours = 0.0;
    PathTaken path = PathTaken::compute;  // meaningful for ML strategies
    TriggerCause cause = TriggerCause::none;
    TerminalTargets targets{};
    long long evals_exploratory = 0;
    long long evals_low = 0;
    long long evals_high = 0;
    double energy_cost_usd = 0.0;
    double shortfall_usd = 0.0;
    double cost_usd = 0.0;  // energy + shortfall over the applied day
    int event_index = -1;   // into RunLog::events when the uncertainty trigger fired
};

struct TrajectoryRow {
    double t_hours = 0.0;
    double soc = 0.0;
    double t_median_c = 0.0;
    double q_prod_mw = 0.0;
    double p_grid_kw = 0.0;
    double price = 0.0;
    double cost_usd = 0.0;
};

// Evaluation totals split by stage; exploratory further split by trigger
// cause for the ML accounting.
struct EvalLedger {
    long long exploratory = 0;
    long long exploratory_warmup = 0;
    long long exploratory_periodic = 0;
    long long exploratory_uncertainty = 0;
    long long low = 0;
    long long high = 0;
    long long total() const { return exploratory + low + high; }
};

struct RunLog {
    std::string strategy;
    std::uint64_t seed = 0;
    double t_end_hours = 0.0;
    int cycles_run = 0;
    double total_cost_usd = 0.0;
    double total_energy_cost_usd = 0.0;
    double total_shortfall_usd = 0.0;
    EvalLedger evals{};
    PlantState final_state{};
    std::vector<CycleLog> cycles;
    std::vector<ExplorationEvent> events;
    std::vector<TrajectoryRow> trajectory;  // one row per applied 30 min step
    nlohmann::ordered_json config_echo;     // effective configuration
    nlohmann::ordered_json model_snapshot;  // optional surrogate audit dump

    nlohmann::ordered_json to_json() const;
};

// Receding-horizon closed loop: one 24 h cycle per iteration, plan chosen by
// the strategy, first day applied at 30 min resolution.
RunLog run(const RunConfig& cfg, const ForecastProvider& provider);

// Recomputes the ledger from per-cycle counts (consistency check and report
// input).
EvalLedger evaluation_accounting(const RunLog& log);

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows);

}  // namespace mrlop
