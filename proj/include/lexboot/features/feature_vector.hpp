#pragma once

#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexboot/error.hpp"

namespace lexboot {

/// Feature values for one post, grouped by marker family.
struct FeatureVector {
    using Group = std::map<std::string, double>;

    std::string post_id;
    std::map<std::string, Group> groups;

    /// Adds (or replaces) a group. Throws InputError on a non-finite value.
    void set_group(const std::string& name, Group values) {
        for (const auto& [k, v] : values)
            if (!std::isfinite(v)) throw InputError("feature " + name + "/" + k + " is not finite");
        groups[name] = std::move(values);
    }

    bool has_group(const std::string& name) const { return groups.count(name) > 0; }

    /// Flattened "group/feature" -> value.
    std::map<std::string, double> flatten() const {
        std::map<std::string, double> out;
        for (const auto& [g, values] : groups)
            for (const auto& [k, v] : values) out.emplace(g + "/" + k, v);
        return out;
    }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline nlohmann::json to_json(const FeatureVector& fv) {
    nlohmann::json groups = nlohmann::json::object();
    for (const auto& [g, values] : fv.groups) {
        nlohmann::json vals = nlohmann::json::object();
        for (const auto& [k, v] : values) vals[k] = v;
        groups[g] = std::move(vals);
    }
    return nlohmann::json{{"post_id", fv.post_id}, {"groups", std::move(groups)}};
}

inline FeatureVector feature_vector_from_json(const nlohmann::json& j) {
    try {
        FeatureVector fv;
        fv.post_id = j.at("post_id").get<std::string>();
        for (const auto& [g, values] : j.at("groups").items()) {
            FeatureVector::Group group;
            for (const auto& [k, v] : values.items()) group[k] = v.get<double>();
            fv.set_group(g, std::move(group));
        }
        return fv;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("feature record: ") + e.what());
    }
}

/// Group names in report order.
inline const std::vector<std::string>& all_groups() {
    static const std::vector<std::string> groups = {
        "bow",    "pos",  "w2v",     "sent_mpqa", "sent_nrc", "sent_vader", "sent_stanford_proxy",
        "meta",   "request", "intensify", "polite", "pronoun"};
    return groups;
}

/// Display label for a group in result tables.
inline std::string_view group_label(std::string_view g) {
    if (g == "bow") return "Bag-of-Words";
    if (g == "pos") return "POS Tags";
    if (g == "w2v") return "Word2Vec cluster";
    if (g == "sent_mpqa") return "Sentiment-MPQA";
    if (g == "sent_nrc") return "Sentiment-NRC";
    if (g == "sent_vader") return "Sentiment-VADER";
    if (g == "sent_stanford_proxy") return "Sentiment-Stanford";
    if (g == "meta") return "Text Meta-Data";
    if (g == "request") return "Request Identification";
    if (g == "intensify") return "Intensifiers";
    if (g == "polite") return "Politeness Markers";
    if (g == "pronoun") return "Pronoun Variations";
    return g;
}

/// Marker family of a group: "Linguistic", "Sentiment" or "Information Specific".
inline std::string_view group_family(std::string_view g) {
    if (g == "bow" || g == "pos" || g == "w2v") return "Linguistic Markers";
    if (g.substr(0, 5) == "sent_") return "Sentiment Markers";
    return "Information Specific Markers";
}

inline bool is_known_group(std::string_view g) {
    for (const auto& k : all_groups())
        if (k == g) return true;
    return false;
}

}  // namespace lexboot
