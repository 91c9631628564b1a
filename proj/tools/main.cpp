#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mrlop/analytics.hpp"
#include "mrlop/config.hpp"
#include "mrlop/controller.hpp"
#include "mrlop/jade.hpp"

namespace fs = std::filesystem;
using namespace mrlop;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            const std::vector<std::uint64_t>& seed_override, bool dry_run) {
    if (!fs::exists(config_path)) {
        std::cerr << "error: config file not found: " << config_path << "\n";
        return 2;
    }
    ExperimentSpec spec = ExperimentSpec::from_file(config_path);
    if (!out_override.empty()) spec.out_dir = out_override;
    if (!seed_override.empty()) spec.seeds = seed_override;
    for (const std::string* csv : {&spec.data.prices_csv, &spec.data.weather_csv}) {
        if (!csv->empty() && !fs::exists(*csv)) {
            std::cerr << "error: data file not found: " << *csv << "\n";
            return 2;
        }
    }
    if (dry_run) {
        std::cout << spec.echo().dump(2) << "\n";
        return 0;
    }

    ForecastProvider provider = spec.make_provider();
    int failures = 0;
    for (Strategy strategy : spec.strategies) {
        for (std::uint64_t seed : spec.seeds) {
            RunConfig cfg = spec.base;
            cfg.strategy = strategy;
            cfg.seed = seed;
            const fs::path dir =
                fs::path(spec.out_dir) / strategy_name(strategy) / ("seed" + std::to_string(seed));
            try {
                RunLog log = run(cfg, provider);
                fs::create_directories(dir);
                write_text(dir / "runlog.json", log.to_json().dump(2) + "\n");
                write_text(dir / "effective_config.json", log.config_echo.dump(2) + "\n");
                write_trajectory_csv((dir / "trajectory.csv").string(), log.trajectory);
                std::printf("[run] %-7s seed %-4" PRIu64 " cost %.2f USD  evals %lld  -> %s\n",
                            strategy_name(strategy), seed, log.total_cost_usd,
                            log.evals.total(), dir.string().c_str());
                std::fflush(stdout);
            } catch (const std::exception& e) {
                ++failures;
                std::cerr << "run failed: " << strategy_name(strategy) << " seed " << seed
                          << ": " << e.what() << "\n";
            }
        }
    }
    if (failures > 0) {
        std::cerr << failures << " run(s) failed\n";
        return 1;
    }
    return 0;
}

int cmd_report(const std::string& dir, std::string out_dir) {
    if (!fs::exists(dir)) {
        std::cerr << "error: directory not found: " << dir << "\n";
        return 2;
    }
    if (out_dir.empty()) out_dir = (fs::path(dir) / "report").string();
    auto runs = collect_run_logs(dir);
    auto report = build_report(runs);
    write_report(report, out_dir);
    std::cout << "aggregated " << runs.size() << " run(s)\n";
    for (const auto& [strategy, s] : report.at("cost_stats").items()) {
        std::printf("  %-7s n=%-3d mean %.2f USD  median %.2f  min %.2f  max %.2f\n",
                    strategy.c_str(), s.at("n").get<int>(), s.at("mean").get<double>(),
                    s.at("median").get<double>(), s.at("min").get<double>(),
                    s.at("max").get<double>());
    }
    std::cout << "report written to " << out_dir << "\n";
    return 0;
}

double sphere(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

double rosenbrock(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        s += 100.0 * a * a + b * b;
    }
    return s;
}

int cmd_bench(const std::string& suite, int dim, int pop, long long budget, int n_seeds) {
    const bool is_sphere = suite == "sphere";
    Bounds bounds;
    bounds.lo.assign(dim, is_sphere ? -5.0 : -2.048);
    bounds.hi.assign(dim, is_sphere ? 5.0 : 2.048);
    Objective f = is_sphere ? Objective(sphere) : Objective(rosenbrock);

    int converged = 0, monotone = 0;
    double best_sum = 0.0, best_min = 1e300, best_max = -1e300;
    for (int s = 1; s <= n_seeds; ++s) {
        SolverParams params;
        params.pop_size = pop;
        params.budget = budget;
        params.seed = static_cast<std::uint64_t>(s);
        OptimizeResult res = jade_optimize(f, bounds, params);
        bool mono = true;
        for (std::size_t i = 1; i < res.best_history.size(); ++i) {
            if (res.best_history[i] > res.best_history[i - 1]) mono = false;
        }
        if (mono) ++monotone;
        if (res.best_cost < 1e-3) ++converged;
        best_sum += res.best_cost;
        best_min = std::min(best_min, res.best_cost);
        best_max = std::max(best_max, res.best_cost);
        std::printf("seed %-3d best %.6e %s\n", s, res.best_cost, mono ? "monotone" : "NON-MONOTONE");
    }
    std::printf("%s %d-dim pop %d budget %lld: %d/%d < 1e-3, %d/%d monotone, "
                "best mean %.3e min %.3e max %.3e\n",
                suite.c_str(), dim, pop, budget, converged, n_seeds, monotone, n_seeds,
                best_sum / n_seeds, best_min, best_max);
    return 0;
}

int cmd_synth_data(const std::string& out_dir, int days, double peak, double jitter,
                   std::uint64_t seed) {
    fs::create_directories(out_dir);
    const fs::path prices_path = fs::path(out_dir) / "prices.csv";
    const fs::path weather_path = fs::path(out_dir) / "weather.csv";
    write_price_csv(prices_path.string(), default_seasonal_prices());
    write_weather_csv(weather_path.string(), synth_weather(days, peak, jitter, seed));
    std::cout << "wrote " << prices_path.string() << "\n";
    std::cout << "wrote " << weather_path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-resolution receding-horizon plant controller harness"};
    app.require_subcommand(1);

    std::string config_path, out_dir, report_dir;
    std::vector<std::uint64_t> seeds;
    bool dry_run = false;

    auto* run_cmd = app.add_subcommand("run", "Execute the strategy/seed grid of an experiment");
    run_cmd->add_option("--config", config_path, "Experiment JSON")->required();
    run_cmd->add_option("--out", out_dir, "Output directory (overrides the config)");
    run_cmd->add_option("--seeds", seeds, "Seed list (overrides the config)")->delimiter(',');
    run_cmd->add_flag("--dry-run", dry_run, "Echo the effective config and exit");

    auto* report_cmd = app.add_subcommand("report", "Aggregate run logs into tables");
    report_cmd->add_option("dir", report_dir, "Directory containing run logs")->required();
    report_cmd->add_option("--out", out_dir, "Report output directory");

    std::string suite = "sphere";
    int dim = 10, pop = 48, n_seeds = 20;
    long long budget = 5000;
    auto* bench_cmd = app.add_subcommand("bench", "Evolutionary solver sanity benchmarks");
    bench_cmd->add_option("suite", suite, "sphere | rosenbrock")
        ->check(CLI::IsMember({"sphere", "rosenbrock"}));
    bench_cmd->add_option("--dim", dim, "Problem dimension");
    bench_cmd->add_option("--pop", pop, "Population size");
    bench_cmd->add_option("--budget", budget, "Evaluation budget");
    bench_cmd->add_option("--seeds", n_seeds, "Number of seeds");

    std::string synth_out = "data";
    int days = 400;
    double peak = 1000.0, jitter = 0.0;
    std::uint64_t wseed = 0;
    auto* synth_cmd = app.add_subcommand("synth-data", "Write synthetic tariff and weather CSVs");
    synth_cmd->add_option("--out", synth_out, "Output directory");
    synth_cmd->add_option("--days", days, "Weather horizon in days");
    synth_cmd->add_option("--peak", peak, "Clear-sky peak irradiance W/m^2");
    synth_cmd->add_option("--jitter", jitter, "Daily amplitude jitter fraction");
    synth_cmd->add_option("--seed", wseed, "Weather jitter seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(config_path, out_dir, seeds, dry_run);
        if (report_cmd->parsed()) return cmd_report(report_dir, out_dir);
        if (bench_cmd->parsed()) return cmd_bench(suite, dim, pop, budget, n_seeds);
        if (synth_cmd->parsed()) return cmd_synth_data(synth_out, days, peak, jitter, wseed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
