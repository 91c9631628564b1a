#pragma once

#include <cstdint>
#include <vector>

#include "mrlop/jade.hpp"
#include "mrlop/plant.hpp"
#include "mrlop/rng.hpp"

namespace mrlop {

// One optimization resolution: step size, horizon, population, and budgets.
// budget_init applies on the first cycle after a tariff reset, budget_default
// afterwards.
struct ResolutionConfig {
    double dt_hours = 1.0;
    int horizon_steps = 24;
    int pop_size = 96;
    long long budget_default = 5000;
    long long budget_init = 5000;

    void validate() const;
};

struct CascadeConfig {
    ResolutionConfig exploratory{2.0, 24, 48, 4000, 4000};
    ResolutionConfig low{1.0, 24, 96, 5000, 5000};
    ResolutionConfig high{0.5, 48, 96, 5000, 20000};

    void validate() const;
};

// Warm-start repository: final high-resolution populations of past cycles.
struct ElitePool {
    std::vector<std::vector<double>> entries;  // each of dimension 2 * H_high

    std::size_t size() const { return entries.size(); }
    void clear() { entries.clear(); }
    // Validates dimension and channel bounds before appending.
    void append(const std::vector<Member>& population, int horizon_steps,
                const Bounds& bounds);
};

// Refines an interleaved decision vector from a coarse horizon to a finer
// one: per channel, coarse values are samples at step-start times, linearly
// interpolated at the fine step-start times with the last value held beyond
// the final coarse node; results are clipped to the fine channel bounds.
std::vector<double> interpolate_controls(const std::vector<double>& coarse,
                                         int coarse_steps, int fine_steps,
                                         const Bounds& fine_bounds);

// Initial population for the high-resolution stage: up to floor(S/2) elites
// sampled from the pool without replacement, then the best interpolated
// low-resolution solutions (ranked by their low-resolution cost), then fresh
// uniform random vectors if slots remain.
std::vector<std::vector<double>> blend_initial_population(
    const ElitePool& pool, const std::vector<std::vector<double>>& interp_low_sorted,
    int pop_size, const Bounds& bounds, Rng& rng);

// Per-channel bounds for an interleaved horizon of the given length.
Bounds control_bounds(int horizon_steps, const PlantParams& p);

struct ExploratoryResult {
    std::vector<double> best;            // dim 2 * H_exploratory
    std::vector<PlantState> trajectory;  // x_0 .. x_H under the best plan
    TerminalTargets targets;             // trajectory state at the target time
    int target_index = 0;                // index into trajectory
    double best_cost = 0.0;
    long long evals = 0;
};

// Stage 0: coarse solve without terminal penalty; the optimal state at
// target_hours into the horizon becomes the terminal target for the tracking
// stages.
ExploratoryResult solve_exploratory(const PlantState& x0, const ForecastSlice& slice,
                                    const PlantParams& p, const CostWeights& weights,
                                    const ResolutionConfig& cfg, long long budget,
                                    double target_hours, std::uint64_t seed);

struct CascadeResult {
    std::vector<double> best_high;       // dim 2 * H_high
    double best_cost_high = 0.0;
    std::vector<Member> final_population_high;
    long long evals_low = 0;
    long long evals_high = 0;
};

// Stages 1 + 2: low-resolution solve from scratch, interpolate its final
// population, blend with pool elites, refine at high resolution.
CascadeResult find_optimal_control(const PlantState& x0, const TerminalTargets& targets,
                                   const ElitePool& pool, const ForecastSlice& slice_low,
                                   const ForecastSlice& slice_high, const PlantParams& p,
                                   const CostWeights& weights, const CascadeConfig& cfg,
                                   long long budget_low, long long budget_high,
                                   std::uint64_t seed_low, std::uint64_t seed_high,
                                   std::uint64_t seed_blend);

// Single-stage solve at the high resolution (HR / HR_ws strategies); seeds
// are injected into the initial population.
CascadeResult solve_high_only(const PlantState& x0, const TerminalTargets& targets,
                              const std::vector<std::vector<double>>& seeds,
                              const ForecastSlice& slice_high, const PlantParams& p,
                              const CostWeights& weights, const ResolutionConfig& cfg,
                              long long budget, std::uint64_t seed);

}  // namespace mrlop
