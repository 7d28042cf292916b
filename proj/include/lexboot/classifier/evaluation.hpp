#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexboot/classifier/dataset.hpp"
#include "lexboot/classifier/elastic_net.hpp"
#include "lexboot/error.hpp"
#include "lexboot/features/feature_vector.hpp"
#include "lexboot/random.hpp"

namespace lexboot {

/// Binary metrics with the complaint class (label 1) as positive.
struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
    Metrics m;
    m.tp = tp;
    m.fp = fp;
    m.fn = fn;
    m.tn = tn;
    const double n = static_cast<double>(tp + fp + fn + tn);
    m.accuracy = n > 0 ? static_cast<double>(tp + tn) / n : 0.0;
    m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

struct EvalReport {
    Metrics overall;                 ///< mean across folds (single split: that split)
    Metrics stdev;                   ///< sample stdev across folds; zero for a single split
    std::vector<Metrics> per_fold;
    std::size_t k = 1;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    std::string group;               ///< feature group set the report was built on, if any
};

inline EvalReport evaluate(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size()) throw InputError("predictions and labels differ in length");
    if (labels.empty()) throw InputError("evaluate needs at least one label");
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int p = predictions[i], y = labels[i];
        if ((p != 0 && p != 1) || (y != 0 && y != 1)) throw InputError("labels must be 0 or 1");
        if (p == 1 && y == 1) ++tp;
        else if (p == 1) ++fp;
        else if (y == 1) ++fn;
        else ++tn;
    }
    EvalReport r;
    r.overall = metrics_from_counts(tp, fp, fn, tn);
    r.per_fold.push_back(r.overall);
    r.n = labels.size();
    return r;
}

/// Stratified fold assignment: each class's indices are shuffled (negatives
/// first, then positives, one shared RNG), concatenated, and dealt to folds
/// round-robin. Fold sizes and per-class counts differ by at most one.
inline std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> y, std::size_t k,
                                                              std::uint64_t seed) {
    if (k < 2) throw ConfigError("cross-validation needs k >= 2");
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 0 && y[i] != 1) throw InputError("labels must be 0 or 1");
        by_class[y[i]].push_back(i);
    }
    for (int c = 0; c < 2; ++c)
        if (by_class[c].size() < k)
            throw ConfigError("class " + std::to_string(c) + " has " + std::to_string(by_class[c].size()) +
                              " samples, fewer than k=" + std::to_string(k) + "; use a smaller --k");
    Rng rng = make_rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t pos = 0;
    for (auto& members : by_class) {
        shuffle(members, rng);
        for (auto i : members) folds[pos++ % k].push_back(i);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

/// Probabilities for every row of `x` (columns matched by name).
inline std::vector<double> predict_rows(const ElasticNetLRModel& model, const FeatureMatrix& x) {
    std::vector<std::int64_t> remap(x.n_cols(), -1);
    for (std::size_t j = 0; j < x.n_cols(); ++j)
        if (auto c = model.column(x.names[j])) remap[j] = static_cast<std::int64_t>(*c);
    const double base = model.intercept();
    std::vector<double> out;
    out.reserve(x.n_rows());
    for (const auto& row : x.rows) {
        double z = base;
        for (const auto& [j, v] : row)
            if (remap[j] >= 0) z += model.weights[remap[j]] * v / model.stdev[remap[j]];
        out.push_back(sigmoid(z));
    }
    return out;
}

inline std::vector<int> threshold(std::span<const double> probabilities, double cut = 0.5) {
    std::vector<int> out;
    out.reserve(probabilities.size());
    for (double p : probabilities) out.push_back(p >= cut ? 1 : 0);
    return out;
}

inline void summarize(EvalReport& r) {
    const double k = static_cast<double>(r.per_fold.size());
    Metrics mean, sd;
    auto fields = [](Metrics& m) { return std::array<double*, 4>{&m.accuracy, &m.precision, &m.recall, &m.f1}; };
    for (auto m : r.per_fold) {
        auto src = fields(m);
        auto dst = fields(mean);
        for (int f = 0; f < 4; ++f) *dst[f] += *src[f] / k;
        mean.tp += m.tp;
        mean.fp += m.fp;
        mean.fn += m.fn;
        mean.tn += m.tn;
    }
    if (r.per_fold.size() > 1) {
        for (auto m : r.per_fold) {
            auto src = fields(m);
            auto mu = fields(mean);
            auto dst = fields(sd);
            for (int f = 0; f < 4; ++f) *dst[f] += (*src[f] - *mu[f]) * (*src[f] - *mu[f]);
        }
        for (auto* v : fields(sd)) *v = std::sqrt(*v / (k - 1.0));
    }
    r.overall = mean;  // tp..tn hold the pooled confusion counts
    r.stdev = sd;
}

/// Stratified k-fold CV; each fold refits standardization on its training part.
inline EvalReport cross_validate(const FeatureMatrix& x, std::span<const int> y, std::size_t k,
                                 const TrainConfig& config) {
    if (x.n_rows() != y.size()) throw InputError("feature matrix and labels differ in length");
    config.validate();
    const auto folds = stratified_folds(y, k, config.rng_seed);
    EvalReport r;
    r.k = k;
    r.n = y.size();
    r.seed = config.rng_seed;
    r.lambda1 = config.lambda1;
    r.lambda2 = config.lambda2;
    std::vector<char> held(y.size());
    for (const auto& test : folds) {
        std::fill(held.begin(), held.end(), 0);
        for (auto i : test) held[i] = 1;
        std::vector<std::size_t> train_idx;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (!held[i]) train_idx.push_back(i);
        std::vector<int> y_train, y_test;
        for (auto i : train_idx) y_train.push_back(y[i]);
        for (auto i : test) y_test.push_back(y[i]);
        const auto model = train(x.select(train_idx), y_train, config);
        const auto pred = threshold(predict_rows(model, x.select(test)));
        r.per_fold.push_back(evaluate(pred, y_test).overall);
    }
    summarize(r);
    return r;
}

struct GridPoint {
    double lambda1;
    double lambda2;
    EvalReport report;
};

/// CV over every (lambda1, lambda2) pair; best by mean F1, then accuracy, then grid order.
inline std::vector<GridPoint> grid_search(const FeatureMatrix& x, std::span<const int> y, std::size_t k,
                                          TrainConfig config, std::span<const double> lambda1s,
                                          std::span<const double> lambda2s, std::size_t* best = nullptr) {
    std::vector<GridPoint> out;
    std::size_t b = 0;
    for (double l1 : lambda1s)
        for (double l2 : lambda2s) {
            config.lambda1 = l1;
            config.lambda2 = l2;
            out.push_back({l1, l2, cross_validate(x, y, k, config)});
            const auto& cur = out.back().report.overall;
            const auto& top = out[b].report.overall;
            if (cur.f1 > top.f1 || (cur.f1 == top.f1 && cur.accuracy > top.accuracy)) b = out.size() - 1;
        }
    if (best) *best = b;
    return out;
}

inline nlohmann::ordered_json to_json(const Metrics& m) {
    return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
    nlohmann::ordered_json folds = nlohmann::ordered_json::array();
    for (const auto& m : r.per_fold) folds.push_back(to_json(m));
    nlohmann::ordered_json j;
    if (!r.group.empty()) j["group"] = r.group;
    j["k"] = r.k;
    j["n"] = r.n;
    j["seed"] = r.seed;
    j["lambda1"] = r.lambda1;
    j["lambda2"] = r.lambda2;
    j["mean"] = to_json(r.overall);
    j["stdev"] = to_json(r.stdev);
    j["confusion"] = {{"tp", r.overall.tp}, {"fp", r.overall.fp}, {"fn", r.overall.fn}, {"tn", r.overall.tn}};
    j["per_fold"] = std::move(folds);
    return j;
}

inline Metrics metrics_from_json(const nlohmann::json& j) {
    Metrics m;
    m.accuracy = j.at("accuracy").get<double>();
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f1 = j.at("f1").get<double>();
    return m;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
    try {
        EvalReport r;
        r.group = j.value("group", std::string{});
        r.k = j.at("k").get<std::size_t>();
        r.n = j.at("n").get<std::size_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.lambda1 = j.at("lambda1").get<double>();
        r.lambda2 = j.at("lambda2").get<double>();
        r.overall = metrics_from_json(j.at("mean"));
        r.stdev = metrics_from_json(j.at("stdev"));
        if (j.contains("confusion")) {
            const auto& c = j["confusion"];
            r.overall.tp = c.at("tp").get<std::size_t>();
            r.overall.fp = c.at("fp").get<std::size_t>();
            r.overall.fn = c.at("fn").get<std::size_t>();
            r.overall.tn = c.at("tn").get<std::size_t>();
        }
        for (const auto& f : j.at("per_fold")) r.per_fold.push_back(metrics_from_json(f));
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("eval report: ") + e.what());
    }
}

/// Plain-text results table: one row per group, grouped under marker
/// families, with Accuracy(%) and F1-score columns (mean and stdev).
/// Groups are ordered as in all_groups(); unknown names go last.
inline std::string render_table(const std::vector<EvalReport>& reports) {
    std::vector<const EvalReport*> ordered;
    for (const auto& g : all_groups())
        for (const auto& r : reports)
            if (r.group == g) ordered.push_back(&r);
    for (const auto& r : reports)
        if (!is_known_group(r.group)) ordered.push_back(&r);

    auto label_of = [](const EvalReport& r) {
        if (r.group.empty()) return std::string("(all features)");
        if (is_known_group(r.group)) return std::string(group_label(r.group));
        return r.group;
    };
    std::size_t width = std::string("Feature").size();
    for (const auto* r : ordered) width = std::max(width, label_of(*r).size() + 2);

    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s  %18s  %16s\n", static_cast<int>(width), "Feature", "Accuracy(%)",
                  "F1-score");
    out += buf;
    out += std::string(width + 38, '-') + "\n";
    std::string family;
    for (const auto* r : ordered) {
        const std::string fam = is_known_group(r->group) ? std::string(group_family(r->group)) : "Other";
        if (fam != family) {
            family = fam;
            out += family + "\n";
        }
        std::snprintf(buf, sizeof buf, "  %-*s  %9.1f +/- %4.1f  %7.2f +/- %4.2f\n", static_cast<int>(width - 2),
                      label_of(*r).c_str(), 100.0 * r->overall.accuracy, 100.0 * r->stdev.accuracy, r->overall.f1,
                      r->stdev.f1);
        out += buf;
    }
    return out;
}

}  // namespace lexboot
