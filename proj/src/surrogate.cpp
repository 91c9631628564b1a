#include "mrlop/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mrlop/rng.hpp"

namespace mrlop {

double pinball_loss(double z, double zhat, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("pinball_loss: alpha must be in (0, 1)");
    }
    const double d = z - zhat;
    return std::max(alpha * d, (alpha - 1.0) * d);
}

double quantile_linear(std::vector<double> values, double alpha) {
    if (values.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("quantile: alpha must be in [0, 1]");
    }
    std::sort(values.begin(), values.end());
    const double h = alpha * (static_cast<double>(values.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

// ---------------------------------------------------------------------------
// CART

struct RegressionTree::BuildCtx {
    const std::vector<std::vector<double>>& X;
    const std::vector<double>& y;
    TreeConfig cfg;
    Rng rng;
    std::vector<int> features;                      // candidate scratch
    std::vector<std::pair<double, int>> sorted;     // (value, sample) scratch
};

int RegressionTree::build(BuildCtx& ctx, std::vector<int>& idx, int begin, int end,
                          int depth) {
    const int n = end - begin;
    double sum = 0.0;
    for (int i = begin; i < end; ++i) sum += ctx.y[idx[i]];
    const double mean = sum / n;

    const int node = node_count();
    feature_.push_back(-1);
    threshold_.push_back(0.0);
    left_.push_back(-1);
    right_.push_back(-1);
    values_.push_back(mean);

    bool all_equal = true;
    for (int i = begin; i < end && all_equal; ++i) {
        all_equal = ctx.y[idx[i]] == ctx.y[idx[begin]];
    }
    if (n < 2 * ctx.cfg.min_leaf || all_equal ||
        (ctx.cfg.max_depth >= 0 && depth >= ctx.cfg.max_depth)) {
        return node;
    }

    const int d = static_cast<int>(ctx.X[0].size());
    const int mtry = (ctx.cfg.mtry <= 0 || ctx.cfg.mtry >= d) ? d : ctx.cfg.mtry;
    ctx.features.resize(d);
    std::iota(ctx.features.begin(), ctx.features.end(), 0);
    if (mtry < d) {
        // Partial Fisher-Yates; candidate order is part of the deterministic
        // tie-break (first best split encountered wins).
        for (int k = 0; k < mtry; ++k) {
            int pick = k + static_cast<int>(ctx.rng.index(d - k));
            std::swap(ctx.features[k], ctx.features[pick]);
        }
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    for (int fi = 0; fi < mtry; ++fi) {
        const int f = ctx.features[fi];
        ctx.sorted.clear();
        for (int i = begin; i < end; ++i) {
            ctx.sorted.emplace_back(ctx.X[idx[i]][f], idx[i]);
        }
        std::sort(ctx.sorted.begin(), ctx.sorted.end());
        double sum_left = 0.0, sq_left = 0.0;
        double sum_all = 0.0, sq_all = 0.0;
        for (const auto& [v, s] : ctx.sorted) {
            sum_all += ctx.y[s];
            sq_all += ctx.y[s] * ctx.y[s];
        }
        for (int s = 0; s < n - 1; ++s) {
            const double yv = ctx.y[ctx.sorted[s].second];
            sum_left += yv;
            sq_left += yv * yv;
            const int nl = s + 1, nr = n - nl;
            if (nl < ctx.cfg.min_leaf || nr < ctx.cfg.min_leaf) continue;
            if (!(ctx.sorted[s].first < ctx.sorted[s + 1].first)) continue;
            const double sum_right = sum_all - sum_left;
            const double sq_right = sq_all - sq_left;
            // Variance reduction == minimizing summed child SSE.
            const double score = (sq_left - sum_left * sum_left / nl) +
                                 (sq_right - sum_right * sum_right / nr);
            if (score < best_score) {
                best_score = score;
                best_feature = f;
                best_threshold = 0.5 * (ctx.sorted[s].first + ctx.sorted[s + 1].first);
            }
        }
    }
    if (best_feature < 0) return node;  // no informative split among candidates

    auto mid = std::stable_partition(idx.begin() + begin, idx.begin() + end, [&](int s) {
        return ctx.X[s][best_feature] <= best_threshold;
    });
    const int split = static_cast<int>(mid - idx.begin());
    if (split == begin || split == end) return node;  // degenerate, keep leaf

    feature_[node] = best_feature;
    threshold_[node] = best_threshold;
    const int l = build(ctx, idx, begin, split, depth + 1);
    left_[node] = l;
    const int r = build(ctx, idx, split, end, depth + 1);
    right_[node] = r;
    return node;
}

void RegressionTree::fit(const std::vector<std::vector<double>>& X,
                         const std::vector<double>& y, const std::vector<int>& sample_idx,
                         const TreeConfig& cfg, std::uint64_t seed) {
    if (X.empty() || X.size() != y.size()) {
        throw std::invalid_argument("tree: empty dataset or X/y size mismatch");
    }
    if (sample_idx.empty()) throw std::invalid_argument("tree: empty sample index set");
    feature_.clear();
    threshold_.clear();
    left_.clear();
    right_.clear();
    values_.clear();
    BuildCtx ctx{X, y, cfg, Rng(seed), {}, {}};
    std::vector<int> idx = sample_idx;
    build(ctx, idx, 0, static_cast<int>(idx.size()), 0);
}

int RegressionTree::leaf_index(const std::vector<double>& x) const {
    int node = 0;
    while (feature_[node] >= 0) {
        node = x[feature_[node]] <= threshold_[node] ? left_[node] : right_[node];
    }
    return node;
}

nlohmann::ordered_json RegressionTree::to_json() const {
    nlohmann::ordered_json j;
    j["feature"] = feature_;
    j["threshold"] = threshold_;
    j["left"] = left_;
    j["right"] = right_;
    j["value"] = values_;
    return j;
}

RegressionTree RegressionTree::from_json(const nlohmann::ordered_json& j) {
    RegressionTree t;
    t.feature_ = j.at("feature").get<std::vector<int>>();
    t.threshold_ = j.at("threshold").get<std::vector<double>>();
    t.left_ = j.at("left").get<std::vector<int>>();
    t.right_ = j.at("right").get<std::vector<int>>();
    t.values_ = j.at("value").get<std::vector<double>>();
    return t;
}

// ---------------------------------------------------------------------------
// Random forest

RandomForest RandomForest::fit(const std::vector<std::vector<double>>& X,
                               const std::vector<double>& y, int n_trees, std::uint64_t seed,
                               TreeConfig cfg) {
    if (X.empty() || X.size() != y.size()) {
        throw std::invalid_argument("forest: empty dataset or X/y size mismatch");
    }
    if (n_trees < 1) throw std::invalid_argument("forest: need at least one tree");
    const int n = static_cast<int>(X.size());
    const int d = static_cast<int>(X[0].size());
    if (cfg.mtry <= 0) cfg.mtry = (d + 2) / 3;  // ceil(d/3)

    RandomForest out;
    out.trees_.resize(n_trees);
    for (int t = 0; t < n_trees; ++t) {
        const std::uint64_t child = mix_seed(seed, static_cast<std::uint64_t>(t));
        Rng boot(mix_seed(child, 1));
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = static_cast<int>(boot.index(n));
        out.trees_[t].fit(X, y, idx, cfg, mix_seed(child, 2));
    }
    return out;
}

RandomForest::Prediction RandomForest::predict(const std::vector<double>& x) const {
    const double n = static_cast<double>(trees_.size());
    double mean = 0.0;
    std::vector<double> preds;
    preds.reserve(trees_.size());
    for (const auto& t : trees_) {
        preds.push_back(t.predict(x));
        mean += preds.back();
    }
    mean /= n;
    double var = 0.0;
    for (double p : preds) var += (p - mean) * (p - mean);
    return Prediction{mean, std::sqrt(var / n)};  // population spread across trees
}

nlohmann::ordered_json RandomForest::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = "rf";
    j["trees"] = nlohmann::ordered_json::array();
    for (const auto& t : trees_) j["trees"].push_back(t.to_json());
    return j;
}

RandomForest RandomForest::from_json(const nlohmann::ordered_json& j) {
    RandomForest f;
    for (const auto& t : j.at("trees")) f.trees_.push_back(RegressionTree::from_json(t));
    return f;
}

// ---------------------------------------------------------------------------
// Gradient boosting

GradientBoosting GradientBoosting::fit(const std::vector<std::vector<double>>& X,
                                       const std::vector<double>& y, GBLoss loss, double alpha,
                                       int n_stages, double learning_rate, int max_depth) {
    if (X.empty() || X.size() != y.size()) {
        throw std::invalid_argument("gb: empty dataset or X/y size mismatch");
    }
    if (n_stages < 0) throw std::invalid_argument("gb: negative stage count");
    if (loss == GBLoss::quantile && !(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("gb: quantile alpha must be in (0, 1)");
    }
    const int n = static_cast<int>(X.size());

    GradientBoosting out;
    out.learning_rate_ = learning_rate;
    out.init_ = (loss == GBLoss::squared)
                    ? std::accumulate(y.begin(), y.end(), 0.0) / n
                    : quantile_linear(y, 0.5);  // median start for quantile loss
    if (learning_rate == 0.0) n_stages = 0;     // stages would not change anything

    std::vector<double> F(n, out.init_);
    std::vector<double> g(n);
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    TreeConfig cfg{max_depth, 1, 0};

    out.trees_.reserve(n_stages);
    for (int stage = 0; stage < n_stages; ++stage) {
        for (int i = 0; i < n; ++i) {
            g[i] = (loss == GBLoss::squared) ? y[i] - F[i]
                                             : (y[i] > F[i] ? alpha : alpha - 1.0);
        }
        RegressionTree tree;
        tree.fit(X, g, all, cfg, 0);

        // TreeBoost leaf update: replace each leaf's value with the loss
        // minimizer over the residuals that land in it.
        std::vector<int> leaf_of(n);
        std::vector<std::vector<double>> residuals(tree.node_count());
        for (int i = 0; i < n; ++i) {
            leaf_of[i] = tree.leaf_index(X[i]);
            residuals[leaf_of[i]].push_back(y[i] - F[i]);
        }
        for (int node = 0; node < tree.node_count(); ++node) {
            if (!tree.is_leaf(node) || residuals[node].empty()) continue;
            double v = (loss == GBLoss::squared)
                           ? std::accumulate(residuals[node].begin(), residuals[node].end(),
                                             0.0) /
                                 static_cast<double>(residuals[node].size())
                           : quantile_linear(residuals[node], alpha);
            tree.set_value(node, v);
        }
        for (int i = 0; i < n; ++i) F[i] += learning_rate * tree.predict(X[i]);
        out.trees_.push_back(std::move(tree));
    }
    return out;
}

double GradientBoosting::predict(const std::vector<double>& x) const {
    double v = init_;
    for (const auto& t : trees_) v += learning_rate_ * t.predict(x);
    return v;
}

nlohmann::ordered_json GradientBoosting::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = "gb";
    j["init"] = init_;
    j["learning_rate"] = learning_rate_;
    j["trees"] = nlohmann::ordered_json::array();
    for (const auto& t : trees_) j["trees"].push_back(t.to_json());
    return j;
}

GradientBoosting GradientBoosting::from_json(const nlohmann::ordered_json& j) {
    GradientBoosting g;
    g.init_ = j.at("init").get<double>();
    g.learning_rate_ = j.at("learning_rate").get<double>();
    for (const auto& t : j.at("trees")) g.trees_.push_back(RegressionTree::from_json(t));
    return g;
}

// ---------------------------------------------------------------------------
// Bypass decision

const char* path_name(PathTaken p) { return p == PathTaken::predict ? "predict" : "compute"; }

const char* cause_name(TriggerCause c) {
    switch (c) {
        case TriggerCause::none: return "none";
        case TriggerCause::warmup: return "warmup";
        case TriggerCause::periodic: return "periodic";
        case TriggerCause::uncertainty: return "uncertainty";
    }
    return "?";
}

void UncertaintyConfig::validate() const {
    if (!(kappa > 0.0)) throw std::invalid_argument("uncertainty: kappa must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("uncertainty: alpha must be in (0, 1)");
    }
    if (t_warmup < 0.0 || !(t_periodic > 0.0)) {
        throw std::invalid_argument("uncertainty: need t_warmup >= 0 and t_periodic > 0");
    }
    if (rf_trees < 1 || gb_stages < 1 || gb_max_depth < 1 || gb_learning_rate < 0.0) {
        throw std::invalid_argument("uncertainty: invalid model hyperparameters");
    }
}

bool ucb_uncertain(const TargetPrediction& soc, const TargetPrediction& t_median,
                   const UncertaintyConfig& cfg) {
    return soc.ucb >= cfg.theta_soc || t_median.ucb >= cfg.theta_t_median;
}

TerminalTargetPredictor::TerminalTargetPredictor(UncertaintyConfig cfg, std::uint64_t seed)
    : cfg_(cfg), seed_(seed) {
    cfg_.validate();
}

void TerminalTargetPredictor::reset() {
    features_.clear();
    targets_soc_.clear();
    targets_t_.clear();
    rf_soc_.reset();
    rf_t_.reset();
    gb_mean_soc_.reset();
    gb_ucb_soc_.reset();
    gb_mean_t_.reset();
    gb_ucb_t_.reset();
}

TargetPrediction TerminalTargetPredictor::predict_target(
    int which, const std::vector<double>& features) const {
    TargetPrediction out;
    if (cfg_.kind == ModelKind::rf) {
        const auto& model = which == 0 ? *rf_soc_ : *rf_t_;
        auto p = model.predict(features);
        out.mean = p.mean;
        out.ucb = p.mean + cfg_.kappa * p.std;
    } else {
        const auto& mean_model = which == 0 ? *gb_mean_soc_ : *gb_mean_t_;
        const auto& ucb_model = which == 0 ? *gb_ucb_soc_ : *gb_ucb_t_;
        out.mean = mean_model.predict(features);
        out.ucb = ucb_model.predict(features);
    }
    return out;
}

TerminalTargetPredictor::Decision TerminalTargetPredictor::decide(
    const std::vector<double>& features, double t_hours, double t_reset,
    double t_last_compute) const {
    Decision d;
    if (t_hours - t_reset < cfg_.t_warmup) {
        d.path = PathTaken::compute;
        d.cause = TriggerCause::warmup;
        return d;
    }
    // Staleness gap: recompute once the last exploration is more than
    // t_periodic old, so quiet stretches still get a fresh solve.
    if (t_hours - t_last_compute > cfg_.t_periodic) {
        d.path = PathTaken::compute;
        d.cause = TriggerCause::periodic;
        return d;
    }
    const bool have_models =
        cfg_.kind == ModelKind::rf ? (rf_soc_.has_value() && rf_t_.has_value())
                                   : (gb_mean_soc_.has_value() && gb_ucb_soc_.has_value() &&
                                      gb_mean_t_.has_value() && gb_ucb_t_.has_value());
    if (!have_models) {
        // Cold start outside any warm-up window still has to compute.
        d.path = PathTaken::compute;
        d.cause = TriggerCause::warmup;
        return d;
    }
    d.soc = predict_target(0, features);
    d.t_median = predict_target(1, features);
    if (ucb_uncertain(*d.soc, *d.t_median, cfg_)) {
        d.path = PathTaken::compute;
        d.cause = TriggerCause::uncertainty;
        return d;
    }
    d.path = PathTaken::predict;
    d.cause = TriggerCause::none;
    return d;
}

void TerminalTargetPredictor::add_observation(const std::vector<double>& features, double soc,
                                              double t_median) {
    if (!features_.empty() && features.size() != features_[0].size()) {
        throw std::invalid_argument("predictor: feature dimension changed");
    }
    features_.push_back(features);
    targets_soc_.push_back(soc);
    targets_t_.push_back(t_median);
    retrain();
}

void TerminalTargetPredictor::retrain() {
    const auto n = static_cast<std::uint64_t>(features_.size());
    if (cfg_.kind == ModelKind::rf) {
        rf_soc_ = RandomForest::fit(features_, targets_soc_, cfg_.rf_trees,
                                    mix_seed(seed_, 2 * n));
        rf_t_ = RandomForest::fit(features_, targets_t_, cfg_.rf_trees,
                                  mix_seed(seed_, 2 * n + 1));
    } else {
        gb_mean_soc_ = GradientBoosting::fit(features_, targets_soc_, GBLoss::squared, 0.5,
                                             cfg_.gb_stages, cfg_.gb_learning_rate,
                                             cfg_.gb_max_depth);
        gb_ucb_soc_ = GradientBoosting::fit(features_, targets_soc_, GBLoss::quantile,
                                            cfg_.alpha, cfg_.gb_stages, cfg_.gb_learning_rate,
                                            cfg_.gb_max_depth);
        gb_mean_t_ = GradientBoosting::fit(features_, targets_t_, GBLoss::squared, 0.5,
                                           cfg_.gb_stages, cfg_.gb_learning_rate,
                                           cfg_.gb_max_depth);
        gb_ucb_t_ = GradientBoosting::fit(features_, targets_t_, GBLoss::quantile, cfg_.alpha,
                                          cfg_.gb_stages, cfg_.gb_learning_rate,
                                          cfg_.gb_max_depth);
    }
}

nlohmann::ordered_json TerminalTargetPredictor::snapshot() const {
    nlohmann::ordered_json j;
    j["model_kind"] = cfg_.kind == ModelKind::rf ? "rf" : "gb";
    j["n_observations"] = observation_count();
    j["features"] = features_;
    j["targets_soc"] = targets_soc_;
    j["targets_t_median"] = targets_t_;
    j["models"] = nlohmann::ordered_json::object();
    if (cfg_.kind == ModelKind::rf) {
        if (rf_soc_) j["models"]["soc"] = rf_soc_->to_json();
        if (rf_t_) j["models"]["t_median"] = rf_t_->to_json();
    } else {
        if (gb_mean_soc_) j["models"]["soc_mean"] = gb_mean_soc_->to_json();
        if (gb_ucb_soc_) j["models"]["soc_ucb"] = gb_ucb_soc_->to_json();
        if (gb_mean_t_) j["models"]["t_median_mean"] = gb_mean_t_->to_json();
        if (gb_ucb_t_) j["models"]["t_median_ucb"] = gb_ucb_t_->to_json();
    }
    return j;
}

}  // namespace mrlop
