#include "mrlop/config.hpp"

#include <fstream>
#include <stdexcept>

namespace mrlop {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& ctx, const std::string& what) {
    throw std::invalid_argument("config: " + ctx + ": " + what);
}

double as_num(const ordered_json& v, const std::string& ctx) {
    if (!v.is_number()) bad(ctx, "expected a number");
    return v.get<double>();
}

long long as_int(const ordered_json& v, const std::string& ctx) {
    if (!v.is_number_integer()) bad(ctx, "expected an integer");
    return v.get<long long>();
}

std::uint64_t as_uint(const ordered_json& v, const std::string& ctx) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        bad(ctx, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

bool as_bool(const ordered_json& v, const std::string& ctx) {
    if (!v.is_boolean()) bad(ctx, "expected a boolean");
    return v.get<bool>();
}

std::string as_str(const ordered_json& v, const std::string& ctx) {
    if (!v.is_string()) bad(ctx, "expected a string");
    return v.get<std::string>();
}

const ordered_json& as_obj(const ordered_json& v, const std::string& ctx) {
    if (!v.is_object()) bad(ctx, "expected an object");
    return v;
}

void apply_resolution(ResolutionConfig& r, const ordered_json& j, const std::string& ctx) {
    for (const auto& [key, v] : as_obj(j, ctx).items()) {
        const std::string c = ctx + "." + key;
        if (key == "dt_hours") r.dt_hours = as_num(v, c);
        else if (key == "horizon_steps") r.horizon_steps = static_cast<int>(as_int(v, c));
        else if (key == "pop_size") r.pop_size = static_cast<int>(as_int(v, c));
        else if (key == "budget_default") r.budget_default = as_int(v, c);
        else if (key == "budget_init") r.budget_init = as_int(v, c);
        else bad(c, "unknown key");
    }
}

ordered_json resolution_to_json(const ResolutionConfig& r) {
    ordered_json j;
    j["dt_hours"] = r.dt_hours;
    j["horizon_steps"] = r.horizon_steps;
    j["pop_size"] = r.pop_size;
    j["budget_default"] = r.budget_default;
    j["budget_init"] = r.budget_init;
    return j;
}

void apply_uncertainty(UncertaintyConfig& u, const ordered_json& j, const std::string& ctx) {
    for (const auto& [key, v] : as_obj(j, ctx).items()) {
        const std::string c = ctx + "." + key;
        if (key == "kind") {
            const std::string s = as_str(v, c);
            if (s == "rf") u.kind = ModelKind::rf;
            else if (s == "gb") u.kind = ModelKind::gb;
            else bad(c, "expected \"rf\" or \"gb\"");
        } else if (key == "kappa") u.kappa = as_num(v, c);
        else if (key == "alpha") u.alpha = as_num(v, c);
        else if (key == "theta_soc") u.theta_soc = as_num(v, c);
        else if (key == "theta_t_median") u.theta_t_median = as_num(v, c);
        else if (key == "t_warmup_hours") u.t_warmup = as_num(v, c);
        else if (key == "t_periodic_hours") u.t_periodic = as_num(v, c);
        else if (key == "rf_trees") u.rf_trees = static_cast<int>(as_int(v, c));
        else if (key == "gb_stages") u.gb_stages = static_cast<int>(as_int(v, c));
        else if (key == "gb_learning_rate") u.gb_learning_rate = as_num(v, c);
        else if (key == "gb_max_depth") u.gb_max_depth = static_cast<int>(as_int(v, c));
        else bad(c, "unknown key");
    }
}

ordered_json uncertainty_to_json(const UncertaintyConfig& u) {
    ordered_json j;
    j["kind"] = (u.kind == ModelKind::rf) ? "rf" : "gb";
    j["kappa"] = u.kappa;
    j["alpha"] = u.alpha;
    j["theta_soc"] = u.theta_soc;
    j["theta_t_median"] = u.theta_t_median;
    j["t_warmup_hours"] = u.t_warmup;
    j["t_periodic_hours"] = u.t_periodic;
    j["rf_trees"] = u.rf_trees;
    j["gb_stages"] = u.gb_stages;
    j["gb_learning_rate"] = u.gb_learning_rate;
    j["gb_max_depth"] = u.gb_max_depth;
    return j;
}

}  // namespace

void apply_plant_overrides(PlantParams& p, const ordered_json& j) {
    for (const auto& [key, v] : as_obj(j, "plant").items()) {
        const std::string c = "plant." + key;
        if (key == "pv_capacity") p.pv_capacity = as_num(v, c);
        else if (key == "hp_capacity_th") p.hp_capacity_th = as_num(v, c);
        else if (key == "battery_capacity") p.battery_capacity = as_num(v, c);
        else if (key == "battery_power_nom") p.battery_power_nom = as_num(v, c);
        else if (key == "tank_capacity") p.tank_capacity = as_num(v, c);
        else if (key == "cop") p.cop = as_num(v, c);
        else if (key == "eta_charge") p.eta_charge = as_num(v, c);
        else if (key == "eta_discharge") p.eta_discharge = as_num(v, c);
        else if (key == "u_nom") p.u_nom = as_num(v, c);
        else if (key == "alpha_nom") p.alpha_nom = as_num(v, c);
        else if (key == "t_min") p.t_min = as_num(v, c);
        else if (key == "t_max") p.t_max = as_num(v, c);
        else if (key == "u_tank") p.u_tank = as_num(v, c);
        else if (key == "tank_area") p.tank_area = as_num(v, c);
        else if (key == "t_ambient") p.t_ambient = as_num(v, c);
        else if (key == "cp_water") p.cp_water = as_num(v, c);
        else if (key == "delta_t_nominal") p.delta_t_nominal = as_num(v, c);
        else if (key == "g_ref") p.g_ref = as_num(v, c);
        else if (key == "export_credit") p.export_credit = as_bool(v, c);
        else bad(c, "unknown key");
    }
}

ordered_json plant_to_json(const PlantParams& p) {
    ordered_json j;
    j["pv_capacity"] = p.pv_capacity;
    j["hp_capacity_th"] = p.hp_capacity_th;
    j["battery_capacity"] = p.battery_capacity;
    j["battery_power_nom"] = p.battery_power_nom;
    j["tank_capacity"] = p.tank_capacity;
    j["cop"] = p.cop;
    j["eta_charge"] = p.eta_charge;
    j["eta_discharge"] = p.eta_discharge;
    j["u_nom"] = p.u_nom;
    j["alpha_nom"] = p.alpha_nom;
    j["t_min"] = p.t_min;
    j["t_max"] = p.t_max;
    j["u_tank"] = p.u_tank;
    j["tank_area"] = p.tank_area;
    j["t_ambient"] = p.t_ambient;
    j["cp_water"] = p.cp_water;
    j["delta_t_nominal"] = p.delta_t_nominal;
    j["g_ref"] = p.g_ref;
    j["export_credit"] = p.export_credit;
    return j;
}

PlantParams plant_from_json(const ordered_json& j) {
    PlantParams p;
    apply_plant_overrides(p, j);
    return p;
}

void apply_run_overrides(RunConfig& cfg, const ordered_json& j) {
    for (const auto& [key, v] : as_obj(j, "run").items()) {
        const std::string c = "run." + key;
        if (key == "strategy") cfg.strategy = strategy_from_name(as_str(v, c));
        else if (key == "t_end_hours") cfg.t_end_hours = as_num(v, c);
        else if (key == "seed") cfg.seed = as_uint(v, c);
        else if (key == "x0") {
            for (const auto& [xk, xv] : as_obj(v, c).items()) {
                const std::string xc = c + "." + xk;
                if (xk == "soc") cfg.x0.soc = as_num(xv, xc);
                else if (xk == "t_median_c") cfg.x0.t_median = as_num(xv, xc);
                else if (xk == "q_prod_mw") cfg.x0.q_prod = as_num(xv, xc);
                else bad(xc, "unknown key");
            }
        } else if (key == "plant") apply_plant_overrides(cfg.plant, v);
        else if (key == "weights") {
            for (const auto& [wk, wv] : as_obj(v, c).items()) {
                const std::string wc = c + "." + wk;
                if (wk == "gamma_day") cfg.weights.gamma_day = as_num(wv, wc);
                else if (wk == "gamma_soc") cfg.weights.gamma_soc = as_num(wv, wc);
                else if (wk == "gamma_t") cfg.weights.gamma_t = as_num(wv, wc);
                else bad(wc, "unknown key");
            }
        } else if (key == "cascade") {
            for (const auto& [ck, cv] : as_obj(v, c).items()) {
                const std::string cc = c + "." + ck;
                if (ck == "exploratory") apply_resolution(cfg.cascade.exploratory, cv, cc);
                else if (ck == "low") apply_resolution(cfg.cascade.low, cv, cc);
                else if (ck == "high") apply_resolution(cfg.cascade.high, cv, cc);
                else bad(cc, "unknown key");
            }
        } else if (key == "uncertainty") apply_uncertainty(cfg.uncertainty, v, c);
        else if (key == "rule") {
            for (const auto& [rk, rv] : as_obj(v, c).items()) {
                const std::string rc = c + "." + rk;
                if (rk == "c_gas_usd_per_kwh") cfg.rule.c_gas = as_num(rv, rc);
                else if (rk == "eta_boiler") cfg.rule.eta_boiler = as_num(rv, rc);
                else if (rk == "n_price_hours")
                    cfg.rule.n_price_hours = static_cast<int>(as_int(rv, rc));
                else bad(rc, "unknown key");
            }
        } else if (key == "forecast") {
            for (const auto& [fk, fv] : as_obj(v, c).items()) {
                const std::string fc = c + "." + fk;
                if (fk == "season_lookahead") cfg.forecast.season_lookahead = as_bool(fv, fc);
                else bad(fc, "unknown key");
            }
        } else if (key == "skip_exploratory") cfg.skip_exploratory = as_bool(v, c);
        else if (key == "default_targets") {
            for (const auto& [tk, tv] : as_obj(v, c).items()) {
                const std::string tc = c + "." + tk;
                if (tk == "soc") cfg.default_targets.soc = as_num(tv, tc);
                else if (tk == "t_median_c") cfg.default_targets.t_median = as_num(tv, tc);
                else bad(tc, "unknown key");
            }
        } else if (key == "reset_epsilon") cfg.reset_epsilon = as_num(v, c);
        else if (key == "save_model_snapshots") cfg.save_model_snapshots = as_bool(v, c);
        else bad(c, "unknown key");
    }
}

ordered_json run_config_to_json(const RunConfig& cfg) {
    ordered_json j;
    j["strategy"] = strategy_name(cfg.strategy);
    j["t_end_hours"] = cfg.t_end_hours;
    j["seed"] = cfg.seed;
    j["x0"] = {{"soc", cfg.x0.soc},
               {"t_median_c", cfg.x0.t_median},
               {"q_prod_mw", cfg.x0.q_prod}};
    j["plant"] = plant_to_json(cfg.plant);
    j["weights"] = {{"gamma_day", cfg.weights.gamma_day},
                    {"gamma_soc", cfg.weights.gamma_soc},
                    {"gamma_t", cfg.weights.gamma_t}};
    ordered_json casc;
    casc["exploratory"] = resolution_to_json(cfg.cascade.exploratory);
    casc["low"] = resolution_to_json(cfg.cascade.low);
    casc["high"] = resolution_to_json(cfg.cascade.high);
    j["cascade"] = std::move(casc);
    j["uncertainty"] = uncertainty_to_json(cfg.uncertainty);
    j["rule"] = {{"c_gas_usd_per_kwh", cfg.rule.c_gas},
                 {"eta_boiler", cfg.rule.eta_boiler},
                 {"n_price_hours", cfg.rule.n_price_hours}};
    j["forecast"] = {{"season_lookahead", cfg.forecast.season_lookahead}};
    j["skip_exploratory"] = cfg.skip_exploratory;
    j["default_targets"] = {{"soc", cfg.default_targets.soc},
                            {"t_median_c", cfg.default_targets.t_median}};
    j["reset_epsilon"] = cfg.reset_epsilon;
    j["save_model_snapshots"] = cfg.save_model_snapshots;
    return j;
}

RunConfig run_config_from_json(const ordered_json& j) {
    RunConfig cfg;
    apply_run_overrides(cfg, j);
    return cfg;
}

ExperimentSpec ExperimentSpec::from_json(const ordered_json& doc) {
    ExperimentSpec spec;
    bool have_strategies = false, have_seeds = false;
    for (const auto& [key, v] : as_obj(doc, "spec").items()) {
        const std::string c = "spec." + key;
        if (key == "strategies") {
            if (!v.is_array() || v.empty()) bad(c, "expected a non-empty array");
            for (const auto& s : v) spec.strategies.push_back(strategy_from_name(as_str(s, c)));
            have_strategies = true;
        } else if (key == "seeds") {
            if (!v.is_array() || v.empty()) bad(c, "expected a non-empty array");
            for (const auto& s : v) spec.seeds.push_back(as_uint(s, c));
            have_seeds = true;
        } else if (key == "horizon_days") {
            spec.horizon_days = as_num(v, c);
            if (!(spec.horizon_days > 0)) bad(c, "must be positive");
        } else if (key == "out_dir") spec.out_dir = as_str(v, c);
        else if (key == "data") {
            for (const auto& [dk, dv] : as_obj(v, c).items()) {
                const std::string dc = c + "." + dk;
                if (dk == "prices_csv") spec.data.prices_csv = as_str(dv, dc);
                else if (dk == "weather_csv") spec.data.weather_csv = as_str(dv, dc);
                else if (dk == "weather_days")
                    spec.data.weather_days = static_cast<int>(as_int(dv, dc));
                else if (dk == "peak_ghi") spec.data.peak_ghi = as_num(dv, dc);
                else if (dk == "jitter_frac") spec.data.jitter_frac = as_num(dv, dc);
                else if (dk == "weather_seed") spec.data.weather_seed = as_uint(dv, dc);
                else bad(dc, "unknown key");
            }
        } else if (key == "overrides") apply_run_overrides(spec.base, v);
        else bad(c, "unknown key");
    }
    if (!have_strategies) bad("spec.strategies", "required");
    if (!have_seeds) bad("spec.seeds", "required");
    spec.base.t_end_hours = spec.horizon_days * 24.0;
    return spec;
}

ExperimentSpec ExperimentSpec::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw std::invalid_argument("config: " + path + ": " + e.what());
    }
    return from_json(doc);
}

ordered_json ExperimentSpec::echo() const {
    ordered_json j;
    j["strategies"] = ordered_json::array();
    for (Strategy s : strategies) j["strategies"].push_back(strategy_name(s));
    j["seeds"] = seeds;
    j["horizon_days"] = horizon_days;
    j["out_dir"] = out_dir;
    ordered_json d;
    d["prices_csv"] = data.prices_csv;
    d["weather_csv"] = data.weather_csv;
    d["weather_days"] = data.weather_days;
    d["peak_ghi"] = data.peak_ghi;
    d["jitter_frac"] = data.jitter_frac;
    d["weather_seed"] = data.weather_seed;
    j["data"] = std::move(d);
    j["run_config"] = run_config_to_json(base);
    return j;
}

ForecastProvider ExperimentSpec::make_provider() const {
    std::array<PriceProfile, 4> prices = data.prices_csv.empty()
                                             ? default_seasonal_prices()
                                             : load_price_csv(data.prices_csv);
    WeatherSeries weather = data.weather_csv.empty()
                                ? synth_weather(data.weather_days, data.peak_ghi,
                                                data.jitter_frac, data.weather_seed)
                                : load_weather_csv(data.weather_csv);
    return ForecastProvider(prices, std::move(weather), LoadSchedule{}, base.forecast);
}

}  // namespace mrlop
