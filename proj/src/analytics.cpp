#include "mrlop/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace mrlop {

namespace fs = std::filesystem;

double precision_pct(const std::vector<double>& realized, double theta) {
    if (realized.empty()) {
        throw std::invalid_argument("precision: no uncertainty-triggered events");
    }
    std::size_t tp = 0;
    for (double y : realized) {
        if (y > theta) ++tp;
    }
    return 100.0 * static_cast<double>(tp) / static_cast<double>(realized.size());
}

double system_precision_pct(const std::vector<double>& realized_soc,
                            const std::vector<double>& realized_t, double theta_soc,
                            double theta_t) {
    if (realized_soc.size() != realized_t.size()) {
        throw std::invalid_argument("system precision: per-target event counts differ");
    }
    if (realized_soc.empty()) {
        throw std::invalid_argument("system precision: no uncertainty-triggered events");
    }
    std::size_t tp = 0;
    for (std::size_t i = 0; i < realized_soc.size(); ++i) {
        if (realized_soc[i] > theta_soc || realized_t[i] > theta_t) ++tp;
    }
    return 100.0 * static_cast<double>(tp) / static_cast<double>(realized_soc.size());
}

double picp_pct(const std::vector<EventSample>& events) {
    if (events.empty()) throw std::invalid_argument("picp: empty event set");
    std::size_t covered = 0;
    for (const auto& e : events) {
        if (e.y <= e.ucb) ++covered;
    }
    return 100.0 * static_cast<double>(covered) / static_cast<double>(events.size());
}

double nmiw_pct(const std::vector<EventSample>& events, double range) {
    if (events.empty()) throw std::invalid_argument("nmiw: empty event set");
    if (!(range > 0.0)) throw std::invalid_argument("nmiw: range must be positive");
    double width = 0.0;
    for (const auto& e : events) width += e.ucb - e.yhat;
    return 100.0 * width / (range * static_cast<double>(events.size()));
}

CostStats cost_stats(std::vector<double> per_run_totals) {
    if (per_run_totals.empty()) throw std::invalid_argument("cost_stats: no runs");
    CostStats out;
    out.n = static_cast<int>(per_run_totals.size());
    std::sort(per_run_totals.begin(), per_run_totals.end());
    out.min = per_run_totals.front();
    out.max = per_run_totals.back();
    double sum = 0.0;
    for (double v : per_run_totals) sum += v;
    out.mean = sum / out.n;
    const std::size_t mid = per_run_totals.size() / 2;
    out.median = (per_run_totals.size() % 2 == 1)
                     ? per_run_totals[mid]
                     : 0.5 * (per_run_totals[mid - 1] + per_run_totals[mid]);
    if (out.n > 1) {
        double ss = 0.0;
        for (double v : per_run_totals) ss += (v - out.mean) * (v - out.mean);
        out.std = std::sqrt(ss / (out.n - 1));
        if (out.mean != 0.0) out.std_pct = 100.0 * *out.std / out.mean;
    }
    return out;
}

std::vector<RunRecord> collect_run_logs(const std::string& root_dir) {
    if (!fs::is_directory(root_dir)) {
        throw std::runtime_error("report: not a directory: " + root_dir);
    }
    std::vector<RunRecord> out;
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root_dir)) {
        if (entry.is_regular_file() && entry.path().filename() == "runlog.json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());  // directory order is not deterministic
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw std::runtime_error("report: cannot open " + f.string());
        RunRecord rec;
        rec.log = nlohmann::ordered_json::parse(in);
        rec.strategy = rec.log.at("strategy").get<std::string>();
        rec.seed = rec.log.at("seed").get<std::uint64_t>();
        out.push_back(std::move(rec));
    }
    if (out.empty()) {
        throw std::runtime_error("report: no runlog.json found under " + root_dir);
    }
    return out;
}

namespace {

// Normalization ranges for interval widths (SoC is a fraction; temperature
// spans the tank's 20 K operating band).
constexpr double kRangeSoc = 1.0;
constexpr double kRangeTemp = 20.0;

nlohmann::ordered_json stats_to_json(const CostStats& s) {
    nlohmann::ordered_json j;
    j["n"] = s.n;
    j["mean"] = s.mean;
    j["median"] = s.median;
    j["min"] = s.min;
    j["max"] = s.max;
    if (s.std) {
        j["std"] = *s.std;
        j["std_pct"] = *s.std_pct;
    } else {
        j["std"] = nullptr;
        j["std_pct"] = nullptr;
    }
    return j;
}

std::string csv_num(const nlohmann::ordered_json& v) {
    if (v.is_null()) return "";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v.get<double>());
    return buf;
}

}  // namespace

nlohmann::ordered_json build_report(const std::vector<RunRecord>& runs) {
    // Group by strategy, preserving first-seen order.
    std::vector<std::string> strategies;
    for (const auto& r : runs) {
        if (std::find(strategies.begin(), strategies.end(), r.strategy) == strategies.end()) {
            strategies.push_back(r.strategy);
        }
    }

    nlohmann::ordered_json report;
    report["n_runs"] = runs.size();
    report["cost_stats"] = nlohmann::ordered_json::object();
    report["eval_ledger"] = nlohmann::ordered_json::object();
    report["uncertainty_metrics"] = nlohmann::ordered_json::object();

    for (const auto& strategy : strategies) {
        std::vector<double> costs, totals, ucb_only;
        nlohmann::ordered_json per_run = nlohmann::ordered_json::array();
        for (const auto& r : runs) {
            if (r.strategy != strategy) continue;
            costs.push_back(r.log.at("total_cost_usd").get<double>());
            const auto& ev = r.log.at("evals");
            totals.push_back(ev.at("total").get<double>());
            ucb_only.push_back(ev.at("exploratory_uncertainty").get<double>());

            // Per-run uncertainty metrics over recorded exploration events.
            nlohmann::ordered_json m;
            m["seed"] = r.seed;
            const auto& events = r.log.at("events");
            m["n_events"] = events.size();
            if (!events.empty()) {
                std::vector<double> y_soc, y_t;
                std::vector<EventSample> s_soc, s_t;
                double th_soc = 0.0, th_t = 0.0;
                for (const auto& e : events) {
                    y_soc.push_back(e.at("realized_soc").get<double>());
                    y_t.push_back(e.at("realized_t_median").get<double>());
                    s_soc.push_back(EventSample{e.at("pred_soc_mean").get<double>(),
                                                e.at("pred_soc_ucb").get<double>(),
                                                y_soc.back()});
                    s_t.push_back(EventSample{e.at("pred_t_median_mean").get<double>(),
                                              e.at("pred_t_median_ucb").get<double>(),
                                              y_t.back()});
                    th_soc = e.at("theta_soc").get<double>();
                    th_t = e.at("theta_t_median").get<double>();
                }
                m["precision_soc"] = precision_pct(y_soc, th_soc);
                m["picp_soc"] = picp_pct(s_soc);
                m["nmiw_soc"] = nmiw_pct(s_soc, kRangeSoc);
                m["precision_t_median"] = precision_pct(y_t, th_t);
                m["picp_t_median"] = picp_pct(s_t);
                m["nmiw_t_median"] = nmiw_pct(s_t, kRangeTemp);
                m["precision_system"] = system_precision_pct(y_soc, y_t, th_soc, th_t);
            }
            per_run.push_back(std::move(m));
        }
        report["cost_stats"][strategy] = stats_to_json(cost_stats(costs));
        nlohmann::ordered_json ledger;
        ledger["total"] = stats_to_json(cost_stats(totals));
        ledger["high_ucb_only"] = stats_to_json(cost_stats(ucb_only));
        report["eval_ledger"][strategy] = std::move(ledger);
        report["uncertainty_metrics"][strategy] = std::move(per_run);
    }
    return report;
}

void write_report(const nlohmann::ordered_json& report, const std::string& out_dir) {
    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "report.json");
        if (!out) throw std::runtime_error("report: cannot write " + out_dir + "/report.json");
        out << report.dump(2) << '\n';
    }
    {
        std::ofstream out(fs::path(out_dir) / "cost_stats.csv");
        out << "strategy,n,mean,median,min,max,std,std_pct\n";
        for (const auto& [strategy, s] : report.at("cost_stats").items()) {
            out << strategy << ',' << s.at("n").get<int>() << ',' << csv_num(s.at("mean"))
                << ',' << csv_num(s.at("median")) << ',' << csv_num(s.at("min")) << ','
                << csv_num(s.at("max")) << ',' << csv_num(s.at("std")) << ','
                << csv_num(s.at("std_pct")) << '\n';
        }
    }
    {
        std::ofstream out(fs::path(out_dir) / "eval_ledger.csv");
        out << "strategy,metric,total,high_ucb_only\n";
        for (const auto& [strategy, ledger] : report.at("eval_ledger").items()) {
            for (const char* metric : {"mean", "std", "min", "max"}) {
                out << strategy << ',' << metric << ','
                    << csv_num(ledger.at("total").at(metric)) << ','
                    << csv_num(ledger.at("high_ucb_only").at(metric)) << '\n';
            }
        }
    }
    {
        std::ofstream out(fs::path(out_dir) / "uncertainty_metrics.csv");
        out << "strategy,seed,n_events,precision_soc,picp_soc,nmiw_soc,"
               "precision_t_median,picp_t_median,nmiw_t_median,precision_system\n";
        for (const auto& [strategy, rows] : report.at("uncertainty_metrics").items()) {
            for (const auto& m : rows) {
                out << strategy << ',' << m.at("seed").get<std::uint64_t>() << ','
                    << m.at("n_events").get<int>();
                if (m.contains("precision_soc")) {
                    for (const char* k : {"precision_soc", "picp_soc", "nmiw_soc",
                                          "precision_t_median", "picp_t_median",
                                          "nmiw_t_median", "precision_system"}) {
                        out << ',' << csv_num(m.at(k));
                    }
                } else {
                    out << ",,,,,,,";
                }
                out << '\n';
            }
        }
    }
}

}  // namespace mrlop
