#include "mrlop/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mrlop {

void ResolutionConfig::validate() const {
    if (!(dt_hours > 0.0) || horizon_steps <= 0) {
        throw std::invalid_argument("resolution: dt and horizon must be positive");
    }
    if (pop_size < 4) throw std::invalid_argument("resolution: pop_size must be >= 4");
    if (budget_default < pop_size || budget_init < budget_default) {
        throw std::invalid_argument("resolution: need budget_init >= budget_default >= pop_size");
    }
}

void CascadeConfig::validate() const {
    exploratory.validate();
    low.validate();
    high.validate();
    const double span_low = low.dt_hours * low.horizon_steps;
    const double span_high = high.dt_hours * high.horizon_steps;
    if (std::abs(span_low - span_high) > 1e-9) {
        throw std::invalid_argument("cascade: low and high stages must cover the same span");
    }
    if (exploratory.dt_hours * exploratory.horizon_steps < span_low) {
        throw std::invalid_argument("cascade: exploratory span must cover the tracking span");
    }
    if (high.horizon_steps < low.horizon_steps) {
        throw std::invalid_argument("cascade: high stage must be at least as fine as low");
    }
}

void ElitePool::append(const std::vector<Member>& population, int horizon_steps,
                       const Bounds& bounds) {
    const std::size_t want = 2 * static_cast<std::size_t>(horizon_steps);
    for (const auto& m : population) {
        if (m.x.size() != want) {
            throw std::invalid_argument("elite pool: entry dimension mismatch");
        }
        for (std::size_t j = 0; j < want; ++j) {
            if (m.x[j] < bounds.lo[j] || m.x[j] > bounds.hi[j]) {
                throw std::invalid_argument("elite pool: entry outside bounds");
            }
        }
        entries.push_back(m.x);
    }
}

Bounds control_bounds(int horizon_steps, const PlantParams& p) {
    Bounds b;
    b.lo.resize(2 * static_cast<std::size_t>(horizon_steps));
    b.hi.resize(2 * static_cast<std::size_t>(horizon_steps));
    for (int k = 0; k < horizon_steps; ++k) {
        b.lo[2 * k] = 0.0;
        b.hi[2 * k] = p.u_nom;
        b.lo[2 * k + 1] = -1.0;
        b.hi[2 * k + 1] = 1.0;
    }
    return b;
}

std::vector<double> interpolate_controls(const std::vector<double>& coarse, int coarse_steps,
                                         int fine_steps, const Bounds& fine_bounds) {
    if (static_cast<int>(coarse.size()) != 2 * coarse_steps) {
        throw std::invalid_argument("interpolate: coarse vector dimension mismatch");
    }
    if (fine_steps < coarse_steps) {
        throw std::invalid_argument("interpolate: fine horizon must be at least the coarse one");
    }
    if (fine_bounds.dim() != 2 * static_cast<std::size_t>(fine_steps)) {
        throw std::invalid_argument("interpolate: bounds dimension mismatch");
    }
    // Both horizons cover the same span, so coarse node i sits at fine
    // position i * fine/coarse; interpolate channel-wise at fine step starts
    // and hold the last node's value past it.
    std::vector<double> out(2 * static_cast<std::size_t>(fine_steps));
    const double ratio = static_cast<double>(coarse_steps) / static_cast<double>(fine_steps);
    for (int j = 0; j < fine_steps; ++j) {
        const double pos = j * ratio;
        const int i = static_cast<int>(std::floor(pos));
        const double frac = pos - i;
        for (int c = 0; c < 2; ++c) {
            double v;
            if (i + 1 < coarse_steps) {
                v = (1.0 - frac) * coarse[2 * i + c] + frac * coarse[2 * (i + 1) + c];
            } else {
                v = coarse[2 * (coarse_steps - 1) + c];
            }
            out[2 * j + c] = fine_bounds.clip(v, 2 * j + c);
        }
    }
    return out;
}

std::vector<std::vector<double>> blend_initial_population(
    const ElitePool& pool, const std::vector<std::vector<double>>& interp_low_sorted,
    int pop_size, const Bounds& bounds, Rng& rng) {
    const std::size_t S = static_cast<std::size_t>(pop_size);
    const std::size_t n_elites = std::min(pool.size(), S / 2);
    std::vector<std::vector<double>> out;
    out.reserve(S);

    // Elites: uniform sample without replacement (partial Fisher-Yates).
    if (n_elites > 0) {
        std::vector<std::size_t> idx(pool.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t k = 0; k < n_elites; ++k) {
            std::size_t pick = k + rng.index(idx.size() - k);
            std::swap(idx[k], idx[pick]);
            out.push_back(pool.entries[idx[k]]);
        }
    }
    // Best interpolated low-resolution solutions fill most remaining slots.
    for (std::size_t k = 0; k < interp_low_sorted.size() && out.size() < S; ++k) {
        out.push_back(interp_low_sorted[k]);
    }
    // Fresh random vectors only if the low-resolution population was smaller
    // than the high-resolution one (never the case at default settings).
    while (out.size() < S) {
        std::vector<double> x(bounds.dim());
        for (std::size_t j = 0; j < bounds.dim(); ++j) {
            x[j] = rng.uniform(bounds.lo[j], bounds.hi[j]);
        }
        out.push_back(std::move(x));
    }
    return out;
}

ExploratoryResult solve_exploratory(const PlantState& x0, const ForecastSlice& slice,
                                    const PlantParams& p, const CostWeights& weights,
                                    const ResolutionConfig& cfg, long long budget,
                                    double target_hours, std::uint64_t seed) {
    if (slice.steps() != cfg.horizon_steps || slice.dt_hours != cfg.dt_hours) {
        throw std::invalid_argument("exploratory: slice does not match resolution config");
    }
    const int target_index = static_cast<int>(std::llround(target_hours / cfg.dt_hours));
    if (target_index <= 0 || target_index > cfg.horizon_steps) {
        throw std::invalid_argument("exploratory: target time outside the horizon");
    }

    Bounds bounds = control_bounds(cfg.horizon_steps, p);
    const int H = cfg.horizon_steps;
    Objective obj = [&](const double* u, std::size_t) {
        return evaluate_cost(x0, u, H, slice, p, weights, nullptr, Stage::exploratory);
    };
    SolverParams sp;
    sp.pop_size = cfg.pop_size;
    sp.budget = budget;
    sp.seed = seed;
    OptimizeResult best = jade_optimize(obj, bounds, sp);

    ExploratoryResult out;
    out.best = best.best;
    out.best_cost = best.best_cost;
    out.evals = best.evals_used;
    SimResult sim = simulate(x0, best.best, slice, p, weights);
    out.trajectory.reserve(H + 1);
    out.trajectory.push_back(x0);
    out.trajectory.insert(out.trajectory.end(), sim.states.begin(), sim.states.end());
    out.target_index = target_index;
    out.targets = TerminalTargets{out.trajectory[target_index].soc,
                                  out.trajectory[target_index].t_median};
    return out;
}

namespace {

CascadeResult run_high_stage(const PlantState& x0, const TerminalTargets& targets,
                             const std::vector<std::vector<double>>& seeds,
                             const ForecastSlice& slice_high, const PlantParams& p,
                             const CostWeights& weights, const ResolutionConfig& cfg,
                             long long budget, std::uint64_t seed) {
    Bounds bounds = control_bounds(cfg.horizon_steps, p);
    const int H = cfg.horizon_steps;
    Objective obj = [&](const double* u, std::size_t) {
        return evaluate_cost(x0, u, H, slice_high, p, weights, &targets, Stage::high);
    };
    SolverParams sp;
    sp.pop_size = cfg.pop_size;
    sp.budget = budget;
    sp.seed = seed;
    OptimizeResult r = jade_optimize(obj, bounds, sp, seeds);

    CascadeResult out;
    out.best_high = std::move(r.best);
    out.best_cost_high = r.best_cost;
    out.final_population_high = std::move(r.final_population);
    out.evals_high = r.evals_used;
    return out;
}

}  // namespace

CascadeResult find_optimal_control(const PlantState& x0, const TerminalTargets& targets,
                                   const ElitePool& pool, const ForecastSlice& slice_low,
                                   const ForecastSlice& slice_high, const PlantParams& p,
                                   const CostWeights& weights, const CascadeConfig& cfg,
                                   long long budget_low, long long budget_high,
                                   std::uint64_t seed_low, std::uint64_t seed_high,
                                   std::uint64_t seed_blend) {
    if (slice_low.steps() != cfg.low.horizon_steps || slice_low.dt_hours != cfg.low.dt_hours ||
        slice_high.steps() != cfg.high.horizon_steps ||
        slice_high.dt_hours != cfg.high.dt_hours) {
        throw std::invalid_argument("cascade: slices do not match resolution configs");
    }

    // Stage 1: low resolution from a fresh random population.
    Bounds bounds_low = control_bounds(cfg.low.horizon_steps, p);
    const int H_low = cfg.low.horizon_steps;
    Objective obj_low = [&](const double* u, std::size_t) {
        return evaluate_cost(x0, u, H_low, slice_low, p, weights, &targets, Stage::low);
    };
    SolverParams sp_low;
    sp_low.pop_size = cfg.low.pop_size;
    sp_low.budget = budget_low;
    sp_low.seed = seed_low;
    OptimizeResult low = jade_optimize(obj_low, bounds_low, sp_low);

    // Rank the final low-resolution population by its stage-1 cost, then lift
    // every member to the fine grid.
    std::vector<std::size_t> order(low.final_population.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return low.final_population[a].cost < low.final_population[b].cost;
    });
    Bounds bounds_high = control_bounds(cfg.high.horizon_steps, p);
    std::vector<std::vector<double>> interp_sorted;
    interp_sorted.reserve(order.size());
    for (std::size_t i : order) {
        interp_sorted.push_back(interpolate_controls(low.final_population[i].x,
                                                     cfg.low.horizon_steps,
                                                     cfg.high.horizon_steps, bounds_high));
    }

    Rng blend_rng(seed_blend);
    std::vector<std::vector<double>> init =
        blend_initial_population(pool, interp_sorted, cfg.high.pop_size, bounds_high, blend_rng);

    CascadeResult out = run_high_stage(x0, targets, init, slice_high, p, weights, cfg.high,
                                       budget_high, seed_high);
    out.evals_low = low.evals_used;
    return out;
}

CascadeResult solve_high_only(const PlantState& x0, const TerminalTargets& targets,
                              const std::vector<std::vector<double>>& seeds,
                              const ForecastSlice& slice_high, const PlantParams& p,
                              const CostWeights& weights, const ResolutionConfig& cfg,
                              long long budget, std::uint64_t seed) {
    if (slice_high.steps() != cfg.horizon_steps || slice_high.dt_hours != cfg.dt_hours) {
        throw std::invalid_argument("high-only solve: slice does not match resolution config");
    }
    return run_high_stage(x0, targets, seeds, slice_high, p, weights, cfg, budget, seed);
}

}  // namespace mrlop
