#include "mrlop/jade.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mrlop/parallel.hpp"
#include "mrlop/rng.hpp"

namespace mrlop {

void Bounds::validate() const {
    if (lo.size() != hi.size() || lo.empty()) {
        throw std::invalid_argument("bounds: lo/hi size mismatch or empty");
    }
    for (std::size_t j = 0; j < lo.size(); ++j) {
        if (!(lo[j] <= hi[j]) || !std::isfinite(lo[j]) || !std::isfinite(hi[j])) {
            throw std::invalid_argument("bounds: need finite lo <= hi at dim " +
                                        std::to_string(j));
        }
    }
}

double Bounds::clip(double v, std::size_t j) const { return std::clamp(v, lo[j], hi[j]); }

void SolverParams::validate(std::size_t dim) const {
    if (pop_size < 4) throw std::invalid_argument("solver: pop_size must be >= 4");
    if (!(p_greedy > 0.0 && p_greedy <= 1.0)) {
        throw std::invalid_argument("solver: p_greedy must be in (0, 1]");
    }
    if (!(c_adapt >= 0.0 && c_adapt <= 1.0)) {
        throw std::invalid_argument("solver: c_adapt must be in [0, 1]");
    }
    if (budget < pop_size) {
        throw std::invalid_argument("solver: budget below pop_size, cannot evaluate the "
                                    "initial population");
    }
    if (dim == 0) throw std::invalid_argument("solver: zero-dimensional problem");
}

namespace {

// Best member under (cost, index) ordering, so ties are deterministic.
std::size_t argmin_cost(const std::vector<double>& costs) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < costs.size(); ++i) {
        if (costs[i] < costs[best]) best = i;
    }
    return best;
}

}  // namespace

OptimizeResult jade_optimize(const Objective& objective, const Bounds& bounds,
                             const SolverParams& params,
                             const std::vector<std::vector<double>>& initial_seeds) {
    bounds.validate();
    const std::size_t D = bounds.dim();
    params.validate(D);
    const std::size_t NP = static_cast<std::size_t>(params.pop_size);
    if (initial_seeds.size() > NP) {
        throw std::invalid_argument("solver: more seeds than population slots");
    }
    for (const auto& s : initial_seeds) {
        if (s.size() != D) throw std::invalid_argument("solver: seed dimension mismatch");
        for (std::size_t j = 0; j < D; ++j) {
            if (s[j] < bounds.lo[j] || s[j] > bounds.hi[j]) {
                throw std::invalid_argument("solver: seed outside bounds at dim " +
                                            std::to_string(j));
            }
        }
    }

    Rng rng(params.seed);
    std::vector<std::vector<double>> pop(NP, std::vector<double>(D));
    std::vector<double> cost(NP);
    for (std::size_t i = 0; i < NP; ++i) {
        if (i < initial_seeds.size()) {
            pop[i] = initial_seeds[i];
        } else {
            for (std::size_t j = 0; j < D; ++j) {
                pop[i][j] = rng.uniform(bounds.lo[j], bounds.hi[j]);
            }
        }
    }

    auto evaluate = [&](const std::vector<std::vector<double>>& xs, std::vector<double>& out,
                        std::size_t count) {
        parallel_for(count, params.parallel_eval,
                     [&](std::size_t i) { out[i] = objective(xs[i].data(), D); });
    };

    long long remaining = params.budget;
    evaluate(pop, cost, NP);
    remaining -= static_cast<long long>(NP);

    OptimizeResult res;
    std::size_t best_i = argmin_cost(cost);
    res.best = pop[best_i];
    res.best_cost = cost[best_i];
    res.best_history.push_back(res.best_cost);

    double mu_f = 0.5, mu_cr = 0.5;
    std::vector<std::vector<double>> archive;
    std::vector<std::size_t> order(NP);
    std::vector<std::vector<double>> trials(NP, std::vector<double>(D));
    std::vector<double> trial_cost(NP);
    std::vector<double> f_used(NP), cr_used(NP);

    while (remaining > 0) {
        // The last generation may be partial so the budget is spent exactly.
        const std::size_t m = static_cast<std::size_t>(
            std::min<long long>(remaining, static_cast<long long>(NP)));

        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
        const std::size_t pbest_count = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(params.p_greedy * double(NP))));

        // Trial generation is sequential: RNG consumption must not depend on
        // evaluation scheduling.
        for (std::size_t i = 0; i < m; ++i) {
            double f;
            do {
                f = rng.cauchy(mu_f, 0.1);
            } while (f <= 0.0);
            f = std::min(f, 1.0);
            double cr = std::clamp(rng.normal(mu_cr, 0.1), 0.0, 1.0);
            f_used[i] = f;
            cr_used[i] = cr;

            const std::size_t pbest = order[rng.index(pbest_count)];
            std::size_t r1;
            do {
                r1 = rng.index(NP);
            } while (r1 == i);
            const std::size_t ext = NP + (params.use_archive ? archive.size() : 0);
            std::size_t r2;
            do {
                r2 = rng.index(ext);
            } while (r2 == i || r2 == r1);
            const std::vector<double>& x2 = r2 < NP ? pop[r2] : archive[r2 - NP];

            const std::size_t jrand = rng.index(D);
            const std::vector<double>& xi = pop[i];
            std::vector<double>& u = trials[i];
            for (std::size_t j = 0; j < D; ++j) {
                if (j == jrand || rng.uniform() < cr) {
                    double v = xi[j] + f * (pop[pbest][j] - xi[j]) + f * (pop[r1][j] - x2[j]);
                    u[j] = bounds.clip(v, j);
                } else {
                    u[j] = xi[j];
                }
            }
        }

        evaluate(trials, trial_cost, m);
        remaining -= static_cast<long long>(m);

        // Selection and adaptation statistics in member-index order.
        double sum_f = 0.0, sum_f2 = 0.0, sum_cr = 0.0;
        std::size_t n_success = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (trial_cost[i] < cost[i]) {
                if (params.use_archive) archive.push_back(pop[i]);
                pop[i] = trials[i];
                cost[i] = trial_cost[i];
                sum_f += f_used[i];
                sum_f2 += f_used[i] * f_used[i];
                sum_cr += cr_used[i];
                ++n_success;
            }
        }
        while (archive.size() > NP) {
            archive.erase(archive.begin() + static_cast<long>(rng.index(archive.size())));
        }
        if (n_success > 0) {
            mu_f = (1.0 - params.c_adapt) * mu_f + params.c_adapt * (sum_f2 / sum_f);
            mu_cr = (1.0 - params.c_adapt) * mu_cr +
                    params.c_adapt * (sum_cr / static_cast<double>(n_success));
        }

        best_i = argmin_cost(cost);
        if (cost[best_i] < res.best_cost) {
            res.best = pop[best_i];
            res.best_cost = cost[best_i];
        }
        res.best_history.push_back(res.best_cost);
    }

    res.final_population.resize(NP);
    for (std::size_t i = 0; i < NP; ++i) {
        res.final_population[i] = Member{pop[i], cost[i]};
    }
    res.evals_used = params.budget;
    return res;
}

}  // namespace mrlop
