#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"

namespace mrlop {

// Pinball (quantile) loss at level alpha.
double pinball_loss(double z, double zhat, double alpha);

// Type-7 (linear interpolation) quantile of a sample, alpha in [0, 1].
double quantile_linear(std::vector<double> values, double alpha);

struct TreeConfig {
    int max_depth = -1;  // -1 = unlimited
    int min_leaf = 1;    // minimum samples per leaf
    int mtry = 0;        // features tried per split; 0 = all
};

// Binary CART regression tree, variance-reduction splits, midpoint thresholds.
class RegressionTree {
public:
    void fit(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
             const std::vector<int>& sample_idx, const TreeConfig& cfg, std::uint64_t seed);

    double predict(const std::vector<double>& x) const { return values_[leaf_index(x)]; }
    int leaf_index(const std::vector<double>& x) const;

    // TreeBoost support: leaves are addressable so a booster can overwrite
    // their values after fitting the structure to gradients.
    int node_count() const { return static_cast<int>(feature_.size()); }
    bool is_leaf(int node) const { return feature_[node] < 0; }
    void set_value(int node, double v) { values_[node] = v; }

    nlohmann::ordered_json to_json() const;
    static RegressionTree from_json(const nlohmann::ordered_json& j);

private:
    // Flat node arrays; feature < 0 marks a leaf.
    std::vector<int> feature_;
    std::vector<double> threshold_;
    std::vector<int> left_, right_;
    std::vector<double> values_;

    struct BuildCtx;
    int build(BuildCtx& ctx, std::vector<int>& idx, int begin, int end, int depth);
};

// Bagged forest; prediction spread (population standard deviation across
// trees) is the uncertainty signal.
class RandomForest {
public:
    static RandomForest fit(const std::vector<std::vector<double>>& X,
                            const std::vector<double>& y, int n_trees,
                            std::uint64_t seed, TreeConfig cfg = {});

    struct Prediction {
        double mean = 0.0;
        double std = 0.0;
    };
    Prediction predict(const std::vector<double>& x) const;

    int tree_count() const { return static_cast<int>(trees_.size()); }
    nlohmann::ordered_json to_json() const;
    static RandomForest from_json(const nlohmann::ordered_json& j);

private:
    std::vector<RegressionTree> trees_;
};

enum class GBLoss { squared, quantile };

// Gradient boosting with depth-limited CART stages and TreeBoost leaf
// updates. Squared loss predicts the conditional mean; quantile loss the
// conditional alpha-quantile (upper confidence bound when alpha > 0.5).
class GradientBoosting {
public:
    static GradientBoosting fit(const std::vector<std::vector<double>>& X,
                                const std::vector<double>& y, GBLoss loss,
                                double alpha = 0.95, int n_stages = 100,
                                double learning_rate = 0.1, int max_depth = 3);

    double predict(const std::vector<double>& x) const;

    int stage_count() const { return static_cast<int>(trees_.size()); }
    nlohmann::ordered_json to_json() const;
    static GradientBoosting from_json(const nlohmann::ordered_json& j);

private:
    double init_ = 0.0;
    double learning_rate_ = 0.1;
    std::vector<RegressionTree> trees_;
};

enum class ModelKind { rf, gb };
enum class PathTaken { predict, compute };
enum class TriggerCause { none, warmup, periodic, uncertainty };

const char* path_name(PathTaken p);
const char* cause_name(TriggerCause c);

struct UncertaintyConfig {
    ModelKind kind = ModelKind::rf;
    double kappa = 2.0;           // RF: UCB = mean + kappa * std
    double alpha = 0.95;          // GB: upper quantile level
    double theta_soc = 0.01;      // SoC uncertainty threshold
    double theta_t_median = 71.0; // deg C temperature UCB threshold
    double t_warmup = 240.0;      // hours of forced exploration after a reset
    double t_periodic = 120.0;    // max hours between explorations
    int rf_trees = 200;
    int gb_stages = 100;
    double gb_learning_rate = 0.1;
    int gb_max_depth = 3;

    void validate() const;
};

struct TargetPrediction {
    double mean = 0.0;
    double ucb = 0.0;
};

// UCB threshold test: exploration is warranted when the SoC upper bound
// leaves the greedy-discharge band or the temperature upper bound crosses the
// configured ceiling.
bool ucb_uncertain(const TargetPrediction& soc, const TargetPrediction& t_median,
                   const UncertaintyConfig& cfg);

// Logged whenever the uncertainty trigger fires: predictions before the
// exploration, the realized optimum after it, and the thresholds in force.
struct ExplorationEvent {
    double t_hours = 0.0;
    TargetPrediction pred_soc;
    TargetPrediction pred_t_median;
    double realized_soc = 0.0;
    double realized_t_median = 0.0;
    double theta_soc = 0.0;
    double theta_t_median = 0.0;
};

// Online predictor of exploratory terminal targets from a daylight-window
// irradiance feature vector. Owns one model per target; retrains from scratch
// on every new observation.
class TerminalTargetPredictor {
public:
    TerminalTargetPredictor(UncertaintyConfig cfg, std::uint64_t seed);

    struct Decision {
        PathTaken path = PathTaken::compute;
        TriggerCause cause = TriggerCause::none;              // set on compute
        std::optional<TargetPrediction> soc;                  // set when models exist
        std::optional<TargetPrediction> t_median;
    };

    // Chooses between predicting targets and recomputing them. t_reset is the
    // time of the last tariff reset, t_last_compute the last exploration (or
    // negative infinity when none happened yet).
    Decision decide(const std::vector<double>& features, double t_hours, double t_reset,
                    double t_last_compute) const;

    void add_observation(const std::vector<double>& features, double soc, double t_median);
    void reset();  // drops datasets and models (tariff reset)

    int observation_count() const { return static_cast<int>(targets_soc_.size()); }
    const UncertaintyConfig& config() const { return cfg_; }

    // Dataset plus fitted-model snapshot for audit.
    nlohmann::ordered_json snapshot() const;

private:
    void retrain();
    TargetPrediction predict_target(int which, const std::vector<double>& features) const;

    UncertaintyConfig cfg_;
    std::uint64_t seed_;
    std::vector<std::vector<double>> features_;
    std::vector<double> targets_soc_, targets_t_;
    std::optional<RandomForest> rf_soc_, rf_t_;
    std::optional<GradientBoosting> gb_mean_soc_, gb_ucb_soc_, gb_mean_t_, gb_ucb_t_;
};

}  // namespace mrlop
