#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"

#include "mrlop/controller.hpp"

namespace mrlop {

// Data source for an experiment: CSV paths or synthetic generation knobs.
struct DataSpec {
    std::string prices_csv;   // empty = built-in seasonal tariffs
    std::string weather_csv;  // empty = synthetic irradiance
    int weather_days = 400;
    double peak_ghi = 1000.0;
    double jitter_frac = 0.0;
    std::uint64_t weather_seed = 0;
};

// A batch of runs: strategies x seeds over a shared horizon and plant setup.
struct ExperimentSpec {
    std::vector<Strategy> strategies;
    std::vector<std::uint64_t> seeds;
    double horizon_days = 7.0;
    std::string out_dir = "runs";
    DataSpec data{};
    RunConfig base{};  // strategy/seed fields overwritten per run

    static ExperimentSpec from_json(const nlohmann::ordered_json& doc);
    static ExperimentSpec from_file(const std::string& path);

    // Effective configuration after defaults and overrides; echoed into every
    // run log so a log fully determines its run.
    nlohmann::ordered_json echo() const;

    ForecastProvider make_provider() const;
};

// Strict parsers: unknown keys and type mismatches raise std::invalid_argument
// naming the offending key.
void apply_plant_overrides(PlantParams& p, const nlohmann::ordered_json& j);
void apply_run_overrides(RunConfig& cfg, const nlohmann::ordered_json& j);

nlohmann::ordered_json plant_to_json(const PlantParams& p);
PlantParams plant_from_json(const nlohmann::ordered_json& j);

// Full round-trippable run configuration (echoed into every run log).
nlohmann::ordered_json run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::ordered_json& j);

}  // namespace mrlop
