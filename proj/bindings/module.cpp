#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <stdexcept>

#include "mrlop/analytics.hpp"
#include "mrlop/baseline.hpp"
#include "mrlop/cascade.hpp"
#include "mrlop/config.hpp"
#include "mrlop/controller.hpp"
#include "mrlop/jade.hpp"
#include "mrlop/surrogate.hpp"

namespace py = pybind11;
using namespace mrlop;

namespace {

ForecastSlice make_slice(const std::vector<double>& prices, const std::vector<double>& ghi,
                         const std::vector<double>& load, double dt, double origin) {
    if (prices.size() != ghi.size() || prices.size() != load.size()) {
        throw std::invalid_argument("prices, irradiance and load must have equal length");
    }
    ForecastSlice s;
    s.prices_usd_per_kwh = prices;
    s.irradiance_w_m2 = ghi;
    s.load_target_mw = load;
    s.dt_hours = dt;
    s.origin_hour = origin;
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Receding-horizon storage-plant controller: plant model, adaptive "
              "differential evolution, surrogates, rule baseline and run harness";

    py::class_<PlantParams>(m, "PlantParams")
        .def(py::init<>())
        .def_readwrite("pv_capacity", &PlantParams::pv_capacity)
        .def_readwrite("hp_capacity_th", &PlantParams::hp_capacity_th)
        .def_readwrite("battery_capacity", &PlantParams::battery_capacity)
        .def_readwrite("battery_power_nom", &PlantParams::battery_power_nom)
        .def_readwrite("tank_capacity", &PlantParams::tank_capacity)
        .def_readwrite("cop", &PlantParams::cop)
        .def_readwrite("eta_charge", &PlantParams::eta_charge)
        .def_readwrite("eta_discharge", &PlantParams::eta_discharge)
        .def_readwrite("u_nom", &PlantParams::u_nom)
        .def_readwrite("alpha_nom", &PlantParams::alpha_nom)
        .def_readwrite("t_min", &PlantParams::t_min)
        .def_readwrite("t_max", &PlantParams::t_max)
        .def_readwrite("u_tank", &PlantParams::u_tank)
        .def_readwrite("tank_area", &PlantParams::tank_area)
        .def_readwrite("t_ambient", &PlantParams::t_ambient)
        .def_readwrite("cp_water", &PlantParams::cp_water)
        .def_readwrite("delta_t_nominal", &PlantParams::delta_t_nominal)
        .def_readwrite("g_ref", &PlantParams::g_ref)
        .def_readwrite("export_credit", &PlantParams::export_credit)
        .def("finalize", &PlantParams::finalize)
        .def("validate", &PlantParams::validate);

    py::class_<PlantState>(m, "PlantState")
        .def(py::init<>())
        .def_readwrite("soc", &PlantState::soc)
        .def_readwrite("t_median", &PlantState::t_median)
        .def_readwrite("q_prod", &PlantState::q_prod);

    m.def("project_pump", &project_pump, py::arg("u_pum"), py::arg("plant"));
    m.def("project_battery", &project_battery, py::arg("u_bat"), py::arg("soc"),
          py::arg("dt_hours"), py::arg("plant"));
    m.def("tank_energy_from_temp", &tank_energy_from_temp, py::arg("t_median"),
          py::arg("plant"));
    m.def("tank_temp_from_energy", &tank_temp_from_energy, py::arg("energy_kwh"),
          py::arg("plant"));

    m.def(
        "terminal_cost",
        [](double soc, double t_median, double target_soc, double target_t, double gamma_soc,
           double gamma_t) {
            PlantState x;
            x.soc = soc;
            x.t_median = t_median;
            CostWeights w;
            w.gamma_soc = gamma_soc;
            w.gamma_t = gamma_t;
            return terminal_cost(x, TerminalTargets{target_soc, target_t}, w, Stage::high);
        },
        py::arg("soc"), py::arg("t_median"), py::arg("target_soc"), py::arg("target_t"),
        py::arg("gamma_soc") = 5000.0, py::arg("gamma_t") = 5.0);

    m.def(
        "simulate",
        [](const PlantState& x0, const std::vector<double>& controls,
           const std::vector<double>& prices, const std::vector<double>& ghi,
           const std::vector<double>& load, double dt, PlantParams plant,
           std::optional<std::pair<double, double>> targets) {
            plant.finalize();
            plant.validate();
            const ForecastSlice slice = make_slice(prices, ghi, load, dt, 0.0);
            std::optional<TerminalTargets> t;
            if (targets) t = TerminalTargets{targets->first, targets->second};
            const SimResult r =
                simulate(x0, controls, slice, plant, CostWeights{}, t, Stage::high);
            py::dict out;
            std::vector<double> soc, temp, q_prod, p_grid, cost;
            for (const auto& s : r.states) {
                soc.push_back(s.soc);
                temp.push_back(s.t_median);
                q_prod.push_back(s.q_prod);
            }
            for (const auto& o : r.outputs) {
                p_grid.push_back(o.p_grid_kw);
                cost.push_back(o.energy_cost_usd + o.shortfall_usd);
            }
            out["soc"] = soc;
            out["t_median_c"] = temp;
            out["q_prod_mw"] = q_prod;
            out["p_grid_kw"] = p_grid;
            out["step_cost_usd"] = cost;
            out["stage_cost_usd"] = r.stage_cost_usd;
            out["terminal_cost_usd"] = r.terminal_cost_usd;
            out["total_cost_usd"] = r.total_cost_usd;
            return out;
        },
        py::arg("x0"), py::arg("controls"), py::arg("prices"), py::arg("irradiance"),
        py::arg("load"), py::arg("dt_hours"), py::arg("plant") = PlantParams{},
        py::arg("targets") = py::none(),
        "Roll the plant over one horizon under an interleaved [u_pum, u_bat] plan");

    m.def(
        "optimize",
        [](const std::function<double(std::vector<double>)>& f, std::vector<double> lo,
           std::vector<double> hi, int pop_size, long long budget, std::uint64_t seed,
           double p_greedy, double c_adapt, bool use_archive,
           std::vector<std::vector<double>> seeds) {
            Bounds b;
            b.lo = std::move(lo);
            b.hi = std::move(hi);
            SolverParams params;
            params.pop_size = pop_size;
            params.budget = budget;
            params.seed = seed;
            params.p_greedy = p_greedy;
            params.c_adapt = c_adapt;
            params.use_archive = use_archive;
            params.parallel_eval = false;  // Python objectives hold the GIL
            Objective obj = [&f](const double* x, std::size_t n) {
                return f(std::vector<double>(x, x + n));
            };
            OptimizeResult r = jade_optimize(obj, b, params, seeds);
            py::dict out;
            out["best"] = r.best;
            out["best_cost"] = r.best_cost;
            out["evals"] = r.evals_used;
            out["history"] = r.best_history;
            return out;
        },
        py::arg("objective"), py::arg("lower"), py::arg("upper"), py::arg("pop_size") = 48,
        py::arg("budget") = 5000, py::arg("seed") = 1, py::arg("p_greedy") = 0.05,
        py::arg("c_adapt") = 0.1, py::arg("use_archive") = true,
        py::arg("seeds") = std::vector<std::vector<double>>{},
        "Adaptive differential evolution (current-to-pbest/1 with external archive)");

    m.def("pinball_loss", &pinball_loss, py::arg("z"), py::arg("zhat"), py::arg("alpha"));
    m.def(
        "quantile",
        [](std::vector<double> v, double alpha) { return quantile_linear(std::move(v), alpha); },
        py::arg("values"), py::arg("alpha"));

    py::class_<RandomForest>(m, "RandomForest")
        .def_static(
            "fit",
            [](const std::vector<std::vector<double>>& X, const std::vector<double>& y,
               int n_trees, std::uint64_t seed) { return RandomForest::fit(X, y, n_trees, seed); },
            py::arg("X"), py::arg("y"), py::arg("n_trees") = 200, py::arg("seed") = 1)
        .def(
            "predict",
            [](const RandomForest& rf, const std::vector<double>& x) {
                auto p = rf.predict(x);
                return std::make_pair(p.mean, p.std);
            },
            py::arg("x"), "Returns (mean, spread) over the trees");

    py::class_<GradientBoosting>(m, "GradientBoosting")
        .def_static(
            "fit",
            [](const std::vector<std::vector<double>>& X, const std::vector<double>& y,
               const std::string& loss, double alpha, int n_stages, double learning_rate,
               int max_depth) {
                GBLoss l;
                if (loss == "squared") l = GBLoss::squared;
                else if (loss == "quantile") l = GBLoss::quantile;
                else throw std::invalid_argument("loss must be 'squared' or 'quantile'");
                return GradientBoosting::fit(X, y, l, alpha, n_stages, learning_rate, max_depth);
            },
            py::arg("X"), py::arg("y"), py::arg("loss") = "squared", py::arg("alpha") = 0.95,
            py::arg("n_stages") = 100, py::arg("learning_rate") = 0.1, py::arg("max_depth") = 3)
        .def("predict", &GradientBoosting::predict, py::arg("x"));

    m.def(
        "plan_day",
        [](const std::vector<double>& prices, double tank_energy0, PlantParams plant) {
            if (prices.size() != 24) throw std::invalid_argument("need 24 hourly prices");
            plant.finalize();
            plant.validate();
            std::array<double, 24> arr{};
            std::copy(prices.begin(), prices.end(), arr.begin());
            return plan_day(arr, LoadSchedule{}, RuleParams{}, plant, tank_energy0);
        },
        py::arg("prices"), py::arg("tank_energy0_kwh") = 0.0,
        py::arg("plant") = PlantParams{},
        "Rule-based 24 h plan (48 half-hour interleaved [u_pum, u_bat] pairs)");

    m.def(
        "synth_weather",
        [](int days, double peak, double jitter, std::uint64_t seed) {
            WeatherSeries w = synth_weather(days, peak, jitter, seed);
            return std::make_pair(w.timestamps_h, w.ghi_w_m2);
        },
        py::arg("days"), py::arg("peak_ghi") = 1000.0, py::arg("jitter_frac") = 0.0,
        py::arg("seed") = 0, "Returns (hours, ghi_w_m2) of the synthetic irradiance series");

    m.def("detect_reset", &detect_reset, py::arg("current"), py::arg("previous"),
          py::arg("epsilon") = 1e-8);

    m.def(
        "run_single",
        [](const std::string& spec_json, const std::string& strategy, std::uint64_t seed) {
            ExperimentSpec spec =
                ExperimentSpec::from_json(nlohmann::ordered_json::parse(spec_json));
            RunConfig cfg = spec.base;
            cfg.strategy = strategy_from_name(strategy);
            cfg.seed = seed;
            ForecastProvider provider = spec.make_provider();
            RunLog log;
            {
                py::gil_scoped_release release;
                log = run(cfg, provider);
            }
            return log.to_json().dump();
        },
        py::arg("spec_json"), py::arg("strategy"), py::arg("seed"),
        "Execute one closed-loop run from an experiment JSON document; returns the "
        "run log as a JSON string");
}
