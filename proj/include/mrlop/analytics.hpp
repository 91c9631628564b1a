#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"

#include "mrlop/surrogate.hpp"

namespace mrlop {

// Per-target view of an exploration event: prediction, upper bound, realized.
struct EventSample {
    double yhat = 0.0;
    double ucb = 0.0;
    double y = 0.0;
};

// Share of uncertainty-triggered explorations whose realized target actually
// exceeded its threshold. Throws std::invalid_argument on an empty set.
double precision_pct(const std::vector<double>& realized, double theta);

// Same, against the union of both target thresholds (system precision).
double system_precision_pct(const std::vector<double>& realized_soc,
                            const std::vector<double>& realized_t, double theta_soc,
                            double theta_t);

// Prediction-interval coverage probability: share of events with y <= ucb.
double picp_pct(const std::vector<EventSample>& events);

// Normalized mean interval width: mean(ucb - yhat) / range, in percent.
double nmiw_pct(const std::vector<EventSample>& events, double range);

struct CostStats {
    int n = 0;
    double mean = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::optional<double> std;      // sample std (n-1); absent for n = 1
    std::optional<double> std_pct;  // 100 * std / mean
};

CostStats cost_stats(std::vector<double> per_run_totals);

// Report assembly from serialized run logs (one JSON document per run, laid
// out as <out>/<strategy>/seed<k>/runlog.json by the CLI).
struct RunRecord {
    std::string strategy;
    std::uint64_t seed = 0;
    nlohmann::ordered_json log;
};

std::vector<RunRecord> collect_run_logs(const std::string& root_dir);

// Builds the full report document: cost statistics, evaluation ledgers and
// uncertainty metrics per strategy.
nlohmann::ordered_json build_report(const std::vector<RunRecord>& runs);

// Writes report.json plus cost_stats.csv, eval_ledger.csv and
// uncertainty_metrics.csv under out_dir.
void write_report(const nlohmann::ordered_json& report, const std::string& out_dir);

}  // namespace mrlop
