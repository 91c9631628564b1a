#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace mrlop {

// Box bounds per decision dimension.
struct Bounds {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const { return lo.size(); }
    void validate() const;  // sizes match, lo <= hi, finite
    double clip(double v, std::size_t j) const;
};

struct SolverParams {
    int pop_size = 96;
    long long budget = 5000;   // exact number of objective evaluations to spend
    double p_greedy = 0.05;    // fraction of population eligible as p-best
    double c_adapt = 0.1;      // adaptation rate for mu_F / mu_CR
    bool use_archive = true;   // external archive, capacity = pop_size
    std::uint64_t seed = 0;
    bool parallel_eval = true;  // honor MRLOP_THREADS inside a generation

    void validate(std::size_t dim) const;
};

struct Member {
    std::vector<double> x;
    double cost = 0.0;
};

struct OptimizeResult {
    std::vector<double> best;
    double best_cost = 0.0;
    std::vector<Member> final_population;     // unsorted (member order)
    long long evals_used = 0;                 // always equals params.budget
    std::vector<double> best_history;         // best-so-far after init and each generation
};

using Objective = std::function<double(const double*, std::size_t)>;

// Adaptive differential evolution (JADE: current-to-pbest/1 mutation with an
// external archive, binomial crossover, Cauchy/normal self-adaptation of F and
// CR). Seeds, when given, replace the first entries of the random initial
// population and must lie within bounds. The budget is consumed exactly; the
// final generation is truncated to the remaining evaluation count.
OptimizeResult jade_optimize(const Objective& objective, const Bounds& bounds,
                             const SolverParams& params,
                             const std::vector<std::vector<double>>& initial_seeds = {});

}  // namespace mrlop
