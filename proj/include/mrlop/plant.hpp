#pragma once

#include <optional>
#include <vector>

#include "mrlop/forecast.hpp"

namespace mrlop {

// Physical and economic parameters of the pilot plant. Field names mirror the
// JSON document keys accepted by from_json.
struct PlantParams {
    double pv_capacity = 306.2;        // kW peak at g_ref
    double hp_capacity_th = 862.2;     // kW thermal ceiling of the heat pump
    double battery_capacity = 1124.8;  // kWh
    double battery_power_nom = 400.0;  // kW
    double tank_capacity = 1911.0;     // kWh between t_min and t_max
    double cop = 3.0;
    double eta_charge = 0.95;
    double eta_discharge = 0.95;
    double u_nom = 12.0;       // kg/s nominal mass flow
    double alpha_nom = 0.2;    // pump dead-band fraction of u_nom
    double t_min = 70.0;       // deg C, tank empty
    double t_max = 90.0;       // deg C, tank full
    double u_tank = 0.4;       // W/(m^2 K) tank loss coefficient
    double tank_area = 0.0;    // m^2; 0 means derive from capacity at finalize()
    double t_ambient = 20.0;   // deg C
    double cp_water = 4186.0;  // J/(kg K)
    double delta_t_nominal = 20.0;  // K condenser temperature lift
    double g_ref = 1000.0;          // W/m^2 reference irradiance
    bool export_credit = true;      // credit grid export at the import price

    // Fills tank_area from the capacity when unset (cylinder with height equal
    // to its diameter, lateral plus two end faces).
    void finalize();
    void validate() const;  // throws std::invalid_argument
    double derived_tank_area() const;
};

struct PlantState {
    double soc = 0.0;         // battery state of charge, [0, 1]
    double t_median = 70.0;   // deg C tank median temperature
    double q_prod = 0.0;      // MW heat delivered to the load last step
};

struct ControlStep {
    double u_pum = 0.0;  // kg/s requested mass flow
    double u_bat = 0.0;  // battery throttle in [-1, 1], positive charges
};

struct CostWeights {
    double gamma_day = 1000.0;  // USD/MW unmet active-hours load, per step
    double gamma_soc = 5000.0;  // USD per unit of terminal SoC deviation
    double gamma_t = 5.0;       // USD per K of terminal temperature deviation
};

struct TerminalTargets {
    double soc = 0.0;
    double t_median = 70.0;
};

enum class Stage { exploratory = 0, low = 1, high = 2 };

// One exogenous sample (zero-order hold over a step).
struct ExogenousSample {
    double price_usd_per_kwh = 0.0;
    double ghi_w_m2 = 0.0;
    double load_mw = 0.0;
};

struct StepOutputs {
    double p_grid_kw = 0.0;       // positive = import
    double energy_cost_usd = 0.0;
    double shortfall_usd = 0.0;
};

struct SimResult {
    std::vector<PlantState> states;    // x_1 .. x_H
    std::vector<StepOutputs> outputs;  // per step
    double stage_cost_usd = 0.0;       // sum of energy + shortfall
    double terminal_cost_usd = 0.0;
    double total_cost_usd = 0.0;
};

// Pump dead band: flows below alpha_nom * u_nom do not move water.
double project_pump(double u_pum, const PlantParams& p);

// Battery power setpoint (kW, positive charging) realizable over dt given the
// state of charge, capped at nominal power.
double project_battery(double u_bat, double soc, double dt_hours, const PlantParams& p);

// Tank helpers (energy reference: 0 kWh at t_min, capacity at t_max).
double tank_energy_from_temp(double t_median, const PlantParams& p);
double tank_temp_from_energy(double energy_kwh, const PlantParams& p);

// One plant step under zero-order-hold control and exogenous inputs.
std::pair<PlantState, StepOutputs> step(const PlantState& x, const ControlStep& u,
                                        const ExogenousSample& w, double dt_hours,
                                        const PlantParams& p, const CostWeights& weights);

// Absolute-deviation terminal penalty; exploratory solves carry no terminal
// term.
double terminal_cost(const PlantState& x_end, const TerminalTargets& targets,
                     const CostWeights& weights, Stage stage);

// Rolls the plant over a slice under an interleaved decision vector
// [u_pum_0, u_bat_0, u_pum_1, ...]; |controls| must equal 2 * slice.steps().
// Passing no targets (or Stage::exploratory) omits the terminal term.
SimResult simulate(const PlantState& x0, const std::vector<double>& controls,
                   const ForecastSlice& slice, const PlantParams& p,
                   const CostWeights& weights,
                   const std::optional<TerminalTargets>& targets = std::nullopt,
                   Stage stage = Stage::exploratory);

// Cost-only fast path used by the optimizer's objective; no trajectory kept.
double evaluate_cost(const PlantState& x0, const double* controls, int horizon_steps,
                     const ForecastSlice& slice, const PlantParams& p,
                     const CostWeights& weights, const TerminalTargets* targets,
                     Stage stage);

}  // namespace mrlop
