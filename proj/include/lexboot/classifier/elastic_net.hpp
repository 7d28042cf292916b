#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexboot/classifier/dataset.hpp"
#include "lexboot/error.hpp"

namespace lexboot {

struct TrainConfig {
    double lambda1 = 1e-4;
    double lambda2 = 1e-4;
    int max_epochs = 500;
    double tolerance = 1e-7;  ///< on relative objective decrease
    std::uint64_t rng_seed = 7;
    bool balanced = false;    ///< inverse-prior sample weights

    void validate() const {
        if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) throw ConfigError("lambda1 and lambda2 must be >= 0");
        if (!(tolerance > 0.0)) throw ConfigError("tolerance must be > 0");
        if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    }
};

struct ElasticNetLRModel {
    static constexpr int kFormatVersion = 1;

    std::vector<std::string> feature_names;  ///< column order of weights/mean/stdev
    std::vector<double> weights;             ///< on standardized features
    std::vector<double> mean;
    std::vector<double> stdev;
    double bias = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;

    std::optional<std::size_t> column(const std::string& name) const {
        if (index_.size() != feature_names.size()) rebuild_index();
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// w . standardize(x) + b. Features absent from `x` count as 0 before scaling.
    double decision(const std::map<std::string, double>& x) const {
        double z = intercept();
        for (const auto& [name, v] : x)
            if (auto j = column(name)) z += weights[*j] * v / stdev[*j];
        return z;
    }

    /// Bias plus the contribution of an all-zero raw vector.
    double intercept() const {
        double z = bias;
        for (std::size_t j = 0; j < weights.size(); ++j) z -= weights[j] * mean[j] / stdev[j];
        return z;
    }

    std::size_t zero_weights() const {
        return static_cast<std::size_t>(std::count(weights.begin(), weights.end(), 0.0));
    }

private:
    void rebuild_index() const {
        index_.clear();
        for (std::size_t j = 0; j < feature_names.size(); ++j) index_.emplace(feature_names[j], j);
    }
    mutable std::unordered_map<std::string, std::size_t> index_;
};

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline double predict(const ElasticNetLRModel& model, const std::map<std::string, double>& x) {
    return sigmoid(model.decision(x));
}

inline double predict(const ElasticNetLRModel& model, const FeatureVector& fv) { return predict(model, fv.flatten()); }

/// Training data in standardized coordinates, kept implicit so the raw rows
/// stay sparse: z_ij = (x_ij - mean_j) / stdev_j. Constant columns are dropped.
class LogisticProblem {
public:
    LogisticProblem(const FeatureMatrix& x, std::span<const int> y, std::span<const double> sample_weights = {}) {
        const std::size_t n = x.n_rows();
        if (y.size() != n) throw InputError("feature matrix and labels differ in length");
        if (n < 2) throw InputError("training needs at least 2 samples");
        std::size_t pos = 0;
        for (int label : y) {
            if (label != 0 && label != 1) throw InputError("labels must be 0 or 1");
            pos += static_cast<std::size_t>(label);
        }
        if (pos == 0 || pos == n) throw InputError("training labels contain a single class");
        if (!sample_weights.empty() && sample_weights.size() != n) throw InputError("sample weight count mismatch");

        labels_.assign(y.begin(), y.end());
        weights_.assign(n, 1.0);
        if (!sample_weights.empty()) {
            double total = 0.0;
            for (double w : sample_weights) {
                if (!(w > 0.0) || !std::isfinite(w)) throw InputError("sample weights must be positive and finite");
                total += w;
            }
            for (std::size_t i = 0; i < n; ++i) weights_[i] = sample_weights[i] * static_cast<double>(n) / total;
        }

        // Column statistics over stored entries plus implicit zeros.
        const std::size_t cols = x.n_cols();
        std::vector<double> sum(cols, 0.0);
        std::vector<std::size_t> nnz(cols, 0);
        std::vector<double> first(cols, 0.0);
        std::vector<bool> varies(cols, false);
        for (const auto& row : x.rows) {
            for (const auto& [j, v] : row) {
                if (!std::isfinite(v)) throw InputError("non-finite value in feature '" + x.names[j] + "'");
                if (nnz[j] == 0) first[j] = v;
                else if (v != first[j]) varies[j] = true;
                sum[j] += v;
                ++nnz[j];
            }
        }
        std::vector<double> mean(cols), ss(cols, 0.0);
        for (std::size_t j = 0; j < cols; ++j) {
            mean[j] = sum[j] / static_cast<double>(n);
            if (nnz[j] > 0 && nnz[j] < n) varies[j] = true;  // mixes stored values and implicit zeros
        }
        for (const auto& row : x.rows)
            for (const auto& [j, v] : row) ss[j] += (v - mean[j]) * (v - mean[j]);
        std::vector<std::int64_t> remap(cols, -1);
        for (std::size_t j = 0; j < cols; ++j) {
            if (!varies[j]) continue;
            ss[j] += static_cast<double>(n - nnz[j]) * mean[j] * mean[j];
            const double sd = std::sqrt(ss[j] / static_cast<double>(n));
            if (!(sd > 0.0)) continue;
            remap[j] = static_cast<std::int64_t>(names_.size());
            names_.push_back(x.names[j]);
            mean_.push_back(mean[j]);
            stdev_.push_back(sd);
        }
        rows_.reserve(n);
        for (const auto& row : x.rows) {
            FeatureMatrix::Row r;
            for (const auto& [j, v] : row)
                if (remap[j] >= 0) r.emplace_back(static_cast<std::uint32_t>(remap[j]), v);
            rows_.push_back(std::move(r));
        }
    }

    std::size_t n() const noexcept { return rows_.size(); }
    std::size_t dim() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::vector<double>& mean() const noexcept { return mean_; }
    const std::vector<double>& stdev() const noexcept { return stdev_; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    const std::vector<double>& sample_weights() const noexcept { return weights_; }

    /// Standardized value of feature j for row i (for tests and diagnostics).
    double standardized(std::size_t i, std::size_t j) const {
        double raw = 0.0;
        for (const auto& [c, v] : rows_[i])
            if (c == j) raw = v;
        return (raw - mean_[j]) / stdev_[j];
    }

    /// Linear scores z_i = b + sum_j z_ij w_j.
    std::vector<double> scores(std::span<const double> w, double b) const {
        double offset = b;
        std::vector<double> scaled(w.size());
        for (std::size_t j = 0; j < w.size(); ++j) {
            scaled[j] = w[j] / stdev_[j];
            offset -= mean_[j] * scaled[j];
        }
        std::vector<double> z(rows_.size(), offset);
        for (std::size_t i = 0; i < rows_.size(); ++i)
            for (const auto& [j, v] : rows_[i]) z[i] += v * scaled[j];
        return z;
    }

    /// Weighted mean log-loss plus (lambda2 / 2) |w|^2.
    double smooth_objective(std::span<const double> w, double b, double lambda2) const {
        const auto z = scores(w, b);
        double loss = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) loss += weights_[i] * (softplus(z[i]) - labels_[i] * z[i]);
        loss /= static_cast<double>(z.size());
        double sq = 0.0;
        for (double v : w) sq += v * v;
        return loss + 0.5 * lambda2 * sq;
    }

    /// Gradient of smooth_objective with respect to (w, b).
    void smooth_gradient(std::span<const double> w, double b, double lambda2, std::vector<double>& gw,
                         double& gb) const {
        const auto z = scores(w, b);
        const double inv_n = 1.0 / static_cast<double>(z.size());
        gw.assign(w.size(), 0.0);
        gb = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double r = weights_[i] * (sigmoid(z[i]) - labels_[i]) * inv_n;
            gb += r;
            for (const auto& [j, v] : rows_[i]) gw[j] += r * v;
        }
        for (std::size_t j = 0; j < w.size(); ++j) gw[j] = (gw[j] - mean_[j] * gb) / stdev_[j] + lambda2 * w[j];
    }

    double objective(std::span<const double> w, double b, double lambda1, double lambda2) const {
        double l1 = 0.0;
        for (double v : w) l1 += std::abs(v);
        return smooth_objective(w, b, lambda2) + lambda1 * l1;
    }

    /// Log-odds of the (weighted) positive rate: the optimal bias at w = 0.
    double prior_log_odds() const {
        double pos = 0.0, total = 0.0;
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            total += weights_[i];
            pos += weights_[i] * labels_[i];
        }
        const double p = pos / total;
        return std::log(p / (1.0 - p));
    }

    /// Smallest lambda1 for which w = 0 is optimal.
    double lambda1_max() const {
        std::vector<double> zero(dim(), 0.0), gw;
        double gb = 0.0;
        smooth_gradient(zero, prior_log_odds(), 0.0, gw, gb);
        double m = 0.0;
        for (double g : gw) m = std::max(m, std::abs(g));
        return m;
    }

private:
    std::vector<std::string> names_;
    std::vector<double> mean_;
    std::vector<double> stdev_;
    std::vector<FeatureMatrix::Row> rows_;
    std::vector<int> labels_;
    std::vector<double> weights_;
};

struct TrainTrace {
    std::vector<double> objective;  ///< after each accepted step, starting with the initial point
    int epochs = 0;
    bool converged = false;
};

inline double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

inline std::vector<double> balanced_weights(std::span<const int> y) {
    std::size_t pos = 0;
    for (int v : y) pos += static_cast<std::size_t>(v == 1);
    const double n = static_cast<double>(y.size());
    std::vector<double> w;
    w.reserve(y.size());
    for (int v : y) w.push_back(n / (2.0 * static_cast<double>(v == 1 ? pos : y.size() - pos)));
    return w;
}

/// Proximal gradient descent with backtracking on
///   (1/n) sum logloss + lambda1 |w|_1 + (lambda2/2) |w|_2^2,
/// bias unpenalized. Every accepted step satisfies the sufficient-decrease
/// condition, so the objective never increases.
inline ElasticNetLRModel train(const FeatureMatrix& x, std::span<const int> y, const TrainConfig& config,
                               TrainTrace* trace = nullptr) {
    config.validate();
    std::vector<double> sw;
    if (config.balanced) sw = balanced_weights(y);
    const LogisticProblem problem(x, y, sw);
    const std::size_t d = problem.dim();
    const double l1 = config.lambda1, l2 = config.lambda2;

    std::vector<double> w(d, 0.0), gw, w_next(d);
    double b = problem.prior_log_odds();
    double f = problem.smooth_objective(w, b, l2);
    double obj = f;  // |w|_1 = 0
    double step = 1.0;
    TrainTrace local;
    local.objective.push_back(obj);

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        local.epochs = epoch;
        double gb = 0.0;
        problem.smooth_gradient(w, b, l2, gw, gb);
        double f_next = 0.0, b_next = 0.0;
        bool accepted = false;
        for (int tries = 0; tries < 60; ++tries) {
            for (std::size_t j = 0; j < d; ++j) w_next[j] = soft_threshold(w[j] - step * gw[j], step * l1);
            b_next = b - step * gb;
            f_next = problem.smooth_objective(w_next, b_next, l2);
            double lin = gb * (b_next - b), sq = (b_next - b) * (b_next - b);
            for (std::size_t j = 0; j < d; ++j) {
                const double dj = w_next[j] - w[j];
                lin += gw[j] * dj;
                sq += dj * dj;
            }
            if (f_next <= f + lin + sq / (2.0 * step)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        double norm1 = 0.0;
        for (double v : w_next) norm1 += std::abs(v);
        const double obj_next = f_next + l1 * norm1;
        if (obj_next > obj) {  // rounding at the optimum
            local.converged = true;
            break;
        }
        const double decrease = (obj - obj_next) / std::max(std::abs(obj), std::numeric_limits<double>::min());
        w.swap(w_next);
        b = b_next;
        f = f_next;
        obj = obj_next;
        local.objective.push_back(obj);
        if (decrease < config.tolerance) {
            local.converged = true;
            break;
        }
        step *= 2.0;
    }

    ElasticNetLRModel model;
    model.feature_names = problem.names();
    model.weights = std::move(w);
    model.mean = problem.mean();
    model.stdev = problem.stdev();
    model.bias = b;
    model.lambda1 = l1;
    model.lambda2 = l2;
    if (trace) *trace = std::move(local);
    return model;
}

inline nlohmann::ordered_json to_json(const ElasticNetLRModel& m) {
    nlohmann::ordered_json features = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < m.feature_names.size(); ++j)
        features.push_back({{"name", m.feature_names[j]},
                            {"weight", m.weights[j]},
                            {"mean", m.mean[j]},
                            {"stdev", m.stdev[j]}});
    nlohmann::ordered_json j;
    j["format_version"] = ElasticNetLRModel::kFormatVersion;
    j["model"] = "elastic_net_logistic_regression";
    j["bias"] = m.bias;
    j["lambda1"] = m.lambda1;
    j["lambda2"] = m.lambda2;
    j["features"] = std::move(features);
    return j;
}

inline ElasticNetLRModel model_from_json(const nlohmann::json& j) {
    try {
        const int version = j.at("format_version").get<int>();
        if (version != ElasticNetLRModel::kFormatVersion)
            throw InputError("unsupported model format_version " + std::to_string(version));
        ElasticNetLRModel m;
        m.bias = j.at("bias").get<double>();
        m.lambda1 = j.at("lambda1").get<double>();
        m.lambda2 = j.at("lambda2").get<double>();
        for (const auto& f : j.at("features")) {
            m.feature_names.push_back(f.at("name").get<std::string>());
            m.weights.push_back(f.at("weight").get<double>());
            m.mean.push_back(f.at("mean").get<double>());
            const double sd = f.at("stdev").get<double>();
            if (!(sd > 0.0)) throw InputError("model feature '" + m.feature_names.back() + "' has stdev <= 0");
            m.stdev.push_back(sd);
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("model file: ") + e.what());
    }
}

}  // namespace lexboot
