#pragma once

#include <array>
#include <vector>

#include "mrlop/forecast.hpp"
#include "mrlop/plant.hpp"

namespace mrlop {

// Rule-based comparison controller parameters.
struct RuleParams {
    double c_gas = 0.039;     // USD/kWh gas price
    double eta_boiler = 0.9;  // boiler efficiency the heat pump competes with
    int n_price_hours = 4;    // battery charge/discharge window length

    void validate() const;
};

// Break-even electricity price against a gas boiler: c_gas * COP / eta_boiler.
double price_threshold(const RuleParams& rule, const PlantParams& plant);

// Plans one day (48 half-hour steps, interleaved [u_pum, u_bat] pairs) from
// the day's hourly prices:
//   - heat pump at nominal flow during active hours;
//   - tank pre-charge at nominal flow in the cheapest off-hours priced below
//     the gas break-even, until the projected tank energy reaches capacity
//     (projection starts at tank_energy0_kwh, standby loss ignored);
//   - battery charges in the n cheapest hours of the day and discharges in
//     the n most expensive active hours, the two sets disjoint (ties resolved
//     toward the earlier hour).
std::vector<double> plan_day(const std::array<double, 24>& prices_usd_per_kwh,
                             const LoadSchedule& schedule, const RuleParams& rule,
                             const PlantParams& plant, double tank_energy0_kwh = 0.0);

}  // namespace mrlop
