#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "lexboot/error.hpp"
#include "lexboot/features/clusters.hpp"
#include "lexboot/features/extractors.hpp"
#include "lexboot/features/feature_vector.hpp"
#include "lexboot/features/lexicons.hpp"
#include "lexboot/features/pos_tagger.hpp"
#include "lexboot/resources.hpp"

namespace lexboot {

/// Everything the extractors read. Immutable after construction, so one
/// instance can serve concurrent extraction.
struct FeatureResources {
    Vocabulary bow_vocabulary;
    std::shared_ptr<const PosTagger> tagger = std::make_shared<RuleTagger>();
    std::optional<EmbeddingClusterModel> clusters;
    std::map<SentimentSource, SentimentLexicon> sentiment;
    PronounDictionaries pronouns = PronounDictionaries::shipped();
    PolitenessLexicon politeness = PolitenessLexicon::shipped();
    RequestRules request = RequestRules::shipped();

    /// Shipped lexicons and tagger; the bag-of-words vocabulary and cluster
    /// model still have to be provided.
    static FeatureResources shipped() {
        FeatureResources r;
        for (auto s : kSentimentSources) r.sentiment.emplace(s, shipped_sentiment_lexicon(s));
        return r;
    }
};

struct FeatureConfig {
    std::set<std::string> groups;

    static FeatureConfig all() {
        FeatureConfig c;
        for (const auto& g : all_groups()) c.groups.insert(g);
        return c;
    }

    /// Comma-separated group names; "all" selects every group.
    static FeatureConfig parse(const std::string& list) {
        FeatureConfig c;
        std::size_t start = 0;
        while (start <= list.size()) {
            auto end = list.find(',', start);
            if (end == std::string::npos) end = list.size();
            std::string g(Corpus::trim(std::string_view(list).substr(start, end - start)));
            if (g == "all") return all();
            if (!g.empty()) {
                if (!is_known_group(g)) throw ConfigError("unknown feature group '" + g + "'");
                c.groups.insert(g);
            }
            start = end + 1;
        }
        if (c.groups.empty()) throw ConfigError("no feature groups selected");
        return c;
    }

    bool enabled(const std::string& g) const { return groups.count(g) > 0; }
};

/// Throws ConfigError if an enabled group lacks its resource.
inline void check_resources(const FeatureResources& r, const FeatureConfig& config) {
    if (config.enabled("w2v") && !r.clusters) throw ConfigError("group 'w2v' needs an embedding cluster model");
    if (config.enabled("pos") && !r.tagger) throw ConfigError("group 'pos' needs a POS tagger");
    for (auto s : kSentimentSources) {
        const std::string g = "sent_" + std::string(to_string(s));
        if (config.enabled(g) && !r.sentiment.count(s)) throw ConfigError("group '" + g + "' needs its lexicon");
    }
}

/// Union of the enabled groups; each group equals its extractor's output.
inline FeatureVector extract_all(const TokenizedPost& post, const FeatureResources& r, const FeatureConfig& config) {
    check_resources(r, config);
    FeatureVector fv;
    fv.post_id = post.post_id;
    if (config.enabled("bow")) fv.set_group("bow", extract_bow(post, r.bow_vocabulary));
    if (config.enabled("pos")) fv.set_group("pos", extract_pos_counts(post, *r.tagger));
    if (config.enabled("w2v")) fv.set_group("w2v", extract_w2v_clusters(post, *r.clusters));
    for (const auto& [source, lexicon] : r.sentiment) {
        const auto g = lexicon.group_name();
        if (config.enabled(g)) fv.set_group(g, extract_sentiment(post, lexicon));
    }
    if (config.enabled("meta")) fv.set_group("meta", extract_meta(post));
    if (config.enabled("request")) fv.set_group("request", extract_request(post, r.request));
    if (config.enabled("intensify")) fv.set_group("intensify", extract_intensifiers(post));
    if (config.enabled("polite")) fv.set_group("polite", extract_politeness(post, r.politeness));
    if (config.enabled("pronoun")) fv.set_group("pronoun", extract_pronouns(post, r.pronouns));
    return fv;
}

/// Bag-of-words vocabulary over training posts (every term, no df floor).
inline Vocabulary fit_bow_vocabulary(std::span<const TokenizedPost> posts, int max_order = 1) {
    const Vocabulary probe({}, max_order);
    std::set<std::string> terms;
    for (const auto& p : posts)
        for (auto& t : probe.terms_of(p.tokens)) terms.insert(std::move(t));
    return Vocabulary(std::vector<std::string>(terms.begin(), terms.end()), max_order);
}

struct FeaturizerOptions {
    FeatureConfig config = FeatureConfig::all();
    int bow_max_order = 1;
    std::optional<Embeddings> embeddings;  ///< random-indexing vectors from the posts when absent
    std::size_t clusters = 50;
    std::uint64_t seed = 7;
};

/// Fits the data-dependent resources (bag-of-words vocabulary, token
/// clusters) on `posts`. Only the enabled groups are fitted. A cluster count
/// above the number of embedded tokens is lowered, with a note.
inline FeatureResources fit_resources(std::span<const TokenizedPost> posts, const FeaturizerOptions& options,
                                      std::vector<std::string>* notes = nullptr) {
    FeatureResources r = FeatureResources::shipped();
    if (options.config.enabled("bow")) r.bow_vocabulary = fit_bow_vocabulary(posts, options.bow_max_order);
    if (options.config.enabled("w2v")) {
        Embeddings e;
        if (options.embeddings) {
            e = *options.embeddings;
        } else {
            std::vector<std::vector<std::string>> docs;
            docs.reserve(posts.size());
            for (const auto& p : posts) docs.push_back(p.tokens);
            e = random_index_embeddings(docs, 64, 2, options.seed);
        }
        if (e.tokens.size() < 2) throw InputError("too few embedded tokens to cluster");
        std::size_t k = options.clusters;
        if (k > e.tokens.size()) {
            k = e.tokens.size();
            if (notes) notes->push_back("cluster count lowered to " + std::to_string(k) + " (embedded tokens)");
        }
        r.clusters = EmbeddingClusterModel::fit(e, k, options.seed);
    }
    return r;
}

inline constexpr int kFeaturizerFormatVersion = 1;

/// Data-dependent resources plus the group selection, so that posts can be
/// featurized later exactly as at training time.
inline nlohmann::ordered_json featurizer_to_json(const FeatureResources& r, const FeatureConfig& config) {
    nlohmann::ordered_json j;
    j["format_version"] = kFeaturizerFormatVersion;
    j["resource_version"] = kResourceVersion;
    j["groups"] = std::vector<std::string>(config.groups.begin(), config.groups.end());
    j["bow_max_order"] = r.bow_vocabulary.max_order();
    j["bow_vocabulary"] = r.bow_vocabulary.terms();
    if (r.clusters) {
        std::map<std::string, std::size_t> sorted(r.clusters->clusters().begin(), r.clusters->clusters().end());
        j["clusters"] = {{"k", r.clusters->k()}, {"tokens", sorted}};
    }
    return j;
}

inline std::pair<FeatureResources, FeatureConfig> featurizer_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<int>() != kFeaturizerFormatVersion)
            throw InputError("unsupported featurizer format_version");
        FeatureConfig config;
        for (const auto& g : j.at("groups")) {
            const auto name = g.get<std::string>();
            if (!is_known_group(name)) throw InputError("unknown feature group '" + name + "'");
            config.groups.insert(name);
        }
        FeatureResources r = FeatureResources::shipped();
        r.bow_vocabulary = Vocabulary(j.at("bow_vocabulary").get<std::vector<std::string>>(),
                                      j.value("bow_max_order", 1));
        if (j.contains("clusters")) {
            const auto& c = j["clusters"];
            r.clusters = EmbeddingClusterModel(
                c.at("tokens").get<std::unordered_map<std::string, std::size_t>>(), c.at("k").get<std::size_t>());
        }
        check_resources(r, config);
        return {std::move(r), std::move(config)};
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("featurizer: ") + e.what());
    } catch (const ConfigError& e) {
        throw InputError(std::string("featurizer: ") + e.what());
    }
}

}  // namespace lexboot
