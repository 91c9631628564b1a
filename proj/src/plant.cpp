#include "mrlop/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mrlop {

void PlantParams::finalize() {
    if (tank_area == 0.0) tank_area = derived_tank_area();
}

double PlantParams::derived_tank_area() const {
    // Water mass holding tank_capacity between t_min and t_max, shaped as a
    // cylinder with height equal to its diameter; area = lateral + two ends.
    const double mass_kg = tank_capacity * 3.6e6 / (cp_water * (t_max - t_min));
    const double volume_m3 = mass_kg / 1000.0;
    const double diameter = std::cbrt(4.0 * volume_m3 / std::numbers::pi);
    return 1.5 * std::numbers::pi * diameter * diameter;
}

void PlantParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw std::invalid_argument(std::string("plant: ") + name +
                                                    " must be positive");
    };
    positive(pv_capacity, "pv_capacity");
    positive(hp_capacity_th, "hp_capacity_th");
    positive(battery_capacity, "battery_capacity");
    positive(battery_power_nom, "battery_power_nom");
    positive(tank_capacity, "tank_capacity");
    positive(cop, "cop");
    positive(u_nom, "u_nom");
    positive(cp_water, "cp_water");
    positive(delta_t_nominal, "delta_t_nominal");
    positive(g_ref, "g_ref");
    if (!(eta_charge > 0.0 && eta_charge <= 1.0) || !(eta_discharge > 0.0 && eta_discharge <= 1.0)) {
        throw std::invalid_argument("plant: efficiencies must be in (0, 1]");
    }
    if (!(alpha_nom > 0.0 && alpha_nom < 1.0)) {
        throw std::invalid_argument("plant: alpha_nom must be in (0, 1)");
    }
    if (!(t_min < t_max)) throw std::invalid_argument("plant: need t_min < t_max");
    if (!(u_tank >= 0.0)) throw std::invalid_argument("plant: u_tank must be non-negative");
    if (!(tank_area >= 0.0)) throw std::invalid_argument("plant: tank_area must be non-negative");
}

double project_pump(double u_pum, const PlantParams& p) {
    double u = std::clamp(u_pum, 0.0, p.u_nom);
    return (u < p.alpha_nom * p.u_nom) ? 0.0 : u;
}

double project_battery(double u_bat, double soc, double dt_hours, const PlantParams& p) {
    // The throttle scales the power the battery can actually absorb or emit
    // over this step (so full throttle exactly fills or drains it), then the
    // nominal rating clips the result.
    double u = std::clamp(u_bat, -1.0, 1.0);
    double p_avail = (u >= 0.0)
                         ? (1.0 - soc) * p.battery_capacity / (dt_hours * p.eta_charge)
                         : soc * p.battery_capacity * p.eta_discharge / dt_hours;
    return std::clamp(u * p_avail, -p.battery_power_nom, p.battery_power_nom);
}

double tank_energy_from_temp(double t_median, const PlantParams& p) {
    double frac = (t_median - p.t_min) / (p.t_max - p.t_min);
    return std::clamp(frac, 0.0, 1.0) * p.tank_capacity;
}

double tank_temp_from_energy(double energy_kwh, const PlantParams& p) {
    double frac = std::clamp(energy_kwh / p.tank_capacity, 0.0, 1.0);
    return p.t_min + frac * (p.t_max - p.t_min);
}

std::pair<PlantState, StepOutputs> step(const PlantState& x, const ControlStep& u,
                                        const ExogenousSample& w, double dt_hours,
                                        const PlantParams& p, const CostWeights& weights) {
    if (!(dt_hours > 0.0)) throw std::invalid_argument("step: dt must be positive");

    // Heat pump thermal output from the realized mass flow, capped by the
    // condenser rating; electric draw via the COP.
    const double flow = project_pump(u.u_pum, p);
    const double q_hp_kw = std::min(flow * p.cp_water * p.delta_t_nominal / 1000.0,
                                    p.hp_capacity_th);
    const double p_hp_kw = q_hp_kw / p.cop;

    // PV scales linearly with irradiance.
    const double p_pv_kw = p.pv_capacity * w.ghi_w_m2 / p.g_ref;

    // Battery: realizable power, then SoC update with efficiency on the
    // matching side of the meter.
    const double p_bat_kw = project_battery(u.u_bat, x.soc, dt_hours, p);
    double soc = x.soc;
    if (p_bat_kw > 0.0) {
        soc += p_bat_kw * dt_hours * p.eta_charge / p.battery_capacity;
    } else if (p_bat_kw < 0.0) {
        soc += p_bat_kw * dt_hours / (p.eta_discharge * p.battery_capacity);
    }
    soc = std::clamp(soc, 0.0, 1.0);

    // Tank: heat-pump surplus charges it, load deficit drains it, standby
    // loss proportional to fill level; curtail charge at a full tank.
    const double load_kw = w.load_mw * 1000.0;
    double tank_kwh = tank_energy_from_temp(x.t_median, p);
    const double standby_kw =
        p.u_tank * p.tank_area * (x.t_median - p.t_ambient) / 1000.0 *
        (tank_kwh / p.tank_capacity);
    tank_kwh -= standby_kw * dt_hours;
    double inflow_kw = std::max(0.0, q_hp_kw - load_kw);
    double deficit_kw = std::max(0.0, load_kw - q_hp_kw);
    double avail_kw = std::max(0.0, tank_kwh) / dt_hours;
    double discharge_kw = std::min(deficit_kw, avail_kw);
    tank_kwh += (inflow_kw - discharge_kw) * dt_hours;
    tank_kwh = std::clamp(tank_kwh, 0.0, p.tank_capacity);

    // Heat delivered to the load; anything beyond it was curtailed or stored.
    const double q_prod_mw = std::min(w.load_mw, (q_hp_kw + discharge_kw) / 1000.0);

    PlantState next;
    next.soc = soc;
    next.t_median = tank_temp_from_energy(tank_kwh, p);
    next.q_prod = q_prod_mw;

    StepOutputs out;
    out.p_grid_kw = p_hp_kw + std::max(0.0, p_bat_kw) - std::max(0.0, -p_bat_kw) - p_pv_kw;
    double billed_kw = p.export_credit ? out.p_grid_kw : std::max(0.0, out.p_grid_kw);
    out.energy_cost_usd = w.price_usd_per_kwh * dt_hours * billed_kw;
    out.shortfall_usd = weights.gamma_day * std::max(0.0, w.load_mw - q_prod_mw);
    return {next, out};
}

double terminal_cost(const PlantState& x_end, const TerminalTargets& targets,
                     const CostWeights& weights, Stage stage) {
    if (stage == Stage::exploratory) return 0.0;
    return weights.gamma_soc * std::abs(x_end.soc - targets.soc) +
           weights.gamma_t * std::abs(x_end.t_median - targets.t_median);
}

SimResult simulate(const PlantState& x0, const std::vector<double>& controls,
                   const ForecastSlice& slice, const PlantParams& p,
                   const CostWeights& weights, const std::optional<TerminalTargets>& targets,
                   Stage stage) {
    const int H = slice.steps();
    if (static_cast<int>(controls.size()) != 2 * H) {
        throw std::invalid_argument("simulate: control vector must have 2 * steps entries");
    }
    SimResult out;
    out.states.reserve(H);
    out.outputs.reserve(H);
    PlantState x = x0;
    for (int k = 0; k < H; ++k) {
        ControlStep u{controls[2 * k], controls[2 * k + 1]};
        ExogenousSample w{slice.prices_usd_per_kwh[k], slice.irradiance_w_m2[k],
                          slice.load_target_mw[k]};
        auto [next, o] = step(x, u, w, slice.dt_hours, p, weights);
        out.stage_cost_usd += o.energy_cost_usd + o.shortfall_usd;
        out.states.push_back(next);
        out.outputs.push_back(o);
        x = next;
    }
    if (targets && stage != Stage::exploratory) {
        out.terminal_cost_usd = terminal_cost(x, *targets, weights, stage);
    }
    out.total_cost_usd = out.stage_cost_usd + out.terminal_cost_usd;
    return out;
}

double evaluate_cost(const PlantState& x0, const double* controls, int horizon_steps,
                     const ForecastSlice& slice, const PlantParams& p,
                     const CostWeights& weights, const TerminalTargets* targets,
                     Stage stage) {
    PlantState x = x0;
    double total = 0.0;
    for (int k = 0; k < horizon_steps; ++k) {
        ControlStep u{controls[2 * k], controls[2 * k + 1]};
        ExogenousSample w{slice.prices_usd_per_kwh[k], slice.irradiance_w_m2[k],
                          slice.load_target_mw[k]};
        auto [next, o] = step(x, u, w, slice.dt_hours, p, weights);
        total += o.energy_cost_usd + o.shortfall_usd;
        x = next;
    }
    if (targets && stage != Stage::exploratory) {
        total += terminal_cost(x, *targets, weights, stage);
    }
    return total;
}

}  // namespace mrlop
