#include "mrlop/baseline.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mrlop {

void RuleParams::validate() const {
    if (!(c_gas >= 0.0)) throw std::invalid_argument("rule: c_gas must be non-negative");
    if (!(eta_boiler > 0.0)) throw std::invalid_argument("rule: eta_boiler must be positive");
    if (n_price_hours < 0 || n_price_hours > 24) {
        throw std::invalid_argument("rule: n_price_hours must be in [0, 24]");
    }
}

double price_threshold(const RuleParams& rule, const PlantParams& plant) {
    return rule.c_gas * plant.cop / rule.eta_boiler;
}

namespace {

// Hours sorted by (price, hour): ascending prices, earlier hour wins ties.
std::vector<int> hours_by_price_asc(const std::array<double, 24>& prices) {
    std::vector<int> hours(24);
    std::iota(hours.begin(), hours.end(), 0);
    std::stable_sort(hours.begin(), hours.end(),
                     [&](int a, int b) { return prices[a] < prices[b]; });
    return hours;
}

}  // namespace

std::vector<double> plan_day(const std::array<double, 24>& prices_usd_per_kwh,
                             const LoadSchedule& schedule, const RuleParams& rule,
                             const PlantParams& plant, double tank_energy0_kwh) {
    rule.validate();
    schedule.validate();

    auto active = [&](int hour) { return schedule.active_at(static_cast<double>(hour)); };

    // Battery charging: n globally cheapest hours.
    const auto asc = hours_by_price_asc(prices_usd_per_kwh);
    std::array<bool, 24> charge{};
    int picked = 0;
    for (int h : asc) {
        if (picked >= rule.n_price_hours) break;
        charge[h] = true;
        ++picked;
    }
    // Battery discharging: n most expensive active hours not already used for
    // charging (descending price, earlier hour on ties).
    std::vector<int> desc(asc.rbegin(), asc.rend());
    std::stable_sort(desc.begin(), desc.end(), [&](int a, int b) {
        if (prices_usd_per_kwh[a] != prices_usd_per_kwh[b]) {
            return prices_usd_per_kwh[a] > prices_usd_per_kwh[b];
        }
        return a < b;
    });
    std::array<bool, 24> discharge{};
    picked = 0;
    for (int h : desc) {
        if (picked >= rule.n_price_hours) break;
        if (!active(h) || charge[h]) continue;
        discharge[h] = true;
        ++picked;
    }

    // Tank pre-charge: cheapest off-hours below the gas break-even price, one
    // at a time until the projected end-of-hour energy reaches capacity.
    const double threshold = price_threshold(rule, plant);
    const double q_hp_nom_kw = std::min(plant.u_nom * plant.cp_water * plant.delta_t_nominal /
                                            1000.0,
                                        plant.hp_capacity_th);
    std::array<bool, 24> tank_charge{};
    double projected_kwh = tank_energy0_kwh;
    for (int h : asc) {
        if (projected_kwh >= plant.tank_capacity) break;
        if (active(h)) continue;
        if (!(prices_usd_per_kwh[h] < threshold)) continue;
        tank_charge[h] = true;
        projected_kwh += q_hp_nom_kw;  // one hour of nominal thermal output
    }

    std::vector<double> plan(2 * 48);
    for (int s = 0; s < 48; ++s) {
        const int h = s / 2;
        const bool pump_on = active(h) || tank_charge[h];
        plan[2 * s] = pump_on ? plant.u_nom : 0.0;
        plan[2 * s + 1] = charge[h] ? 1.0 : (discharge[h] ? -1.0 : 0.0);
    }
    return plan;
}

}  // namespace mrlop
