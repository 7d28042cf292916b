#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexboot/corpus.hpp"
#include "lexboot/error.hpp"

namespace lexboot {

/// Dense term -> index mapping, frozen once built. Terms are stored sorted so
/// indices do not depend on document order.
class Vocabulary {
public:
    Vocabulary() = default;

    /// `max_order` 1 = unigrams, 2 = unigrams and bigrams.
    Vocabulary(std::vector<std::string> terms, int max_order = 1) : max_order_(max_order) {
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
        terms_ = std::move(terms);
        index_.reserve(terms_.size());
        for (std::size_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
    }

    std::size_t size() const noexcept { return terms_.size(); }
    bool empty() const noexcept { return terms_.empty(); }
    int max_order() const noexcept { return max_order_; }
    const std::vector<std::string>& terms() const noexcept { return terms_; }
    const std::string& term(std::size_t i) const { return terms_[i]; }

    std::optional<std::uint32_t> index_of(const std::string& term) const {
        auto it = index_.find(term);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Every term occurrence of a token list that this vocabulary could hold
    /// (n-grams up to max_order), in order, OOV included.
    std::vector<std::string> terms_of(const std::vector<std::string>& tokens) const {
        std::vector<std::string> out = ngrams(tokens, 1);
        for (int n = 2; n <= max_order_; ++n) {
            auto more = ngrams(tokens, n);
            out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
        }
        return out;
    }

private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::uint32_t> index_;
    int max_order_ = 1;
};

class SparseVector {
public:
    using Entry = std::pair<std::uint32_t, double>;

    SparseVector() = default;

    /// Zero weights are dropped; entries may arrive in any order but indices must be unique.
    explicit SparseVector(std::vector<Entry> entries) {
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
        for (auto& e : entries)
            if (e.second != 0.0) entries_.push_back(e);
        norm_ = compute_norm();
    }

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::size_t nnz() const noexcept { return entries_.size(); }
    bool is_zero() const noexcept { return entries_.empty(); }
    double norm() const noexcept { return norm_; }

    double get(std::uint32_t index) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                                   [](const Entry& e, std::uint32_t i) { return e.first < i; });
        return (it != entries_.end() && it->first == index) ? it->second : 0.0;
    }

    double compute_norm() const {
        double s = 0.0;
        for (const auto& e : entries_) s += e.second * e.second;
        return std::sqrt(s);
    }

private:
    std::vector<Entry> entries_;
    double norm_ = 0.0;
};

inline double dot(const SparseVector& a, const SparseVector& b) {
    const auto& x = a.entries();
    const auto& y = b.entries();
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
        if (x[i].first == y[j].first) {
            s += x[i].second * y[j].second;
            ++i;
            ++j;
        } else if (x[i].first < y[j].first) {
            ++i;
        } else {
            ++j;
        }
    }
    return s;
}

/// dot(a,b)/(|a||b|), 0 if either vector is zero.
inline double cosine(const SparseVector& a, const SparseVector& b) {
    if (a.norm() == 0.0 || b.norm() == 0.0) return 0.0;
    const double c = dot(a, b) / (a.norm() * b.norm());
    return std::clamp(c, -1.0, 1.0);
}

struct TfIdfOptions {
    std::size_t min_df = 2;
    int max_order = 1;
};

struct TfIdfModel {
    Vocabulary vocabulary;
    std::vector<double> idf;  ///< parallel to vocabulary indices
    std::size_t n_docs = 0;
    std::size_t min_df = 2;

    double idf_of(const std::string& term) const {
        auto i = vocabulary.index_of(term);
        return i ? idf[*i] : 0.0;
    }
};

inline double smoothed_idf(std::size_t n_docs, std::size_t df) {
    return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df))) + 1.0;
}

/// Fits document frequencies over token lists; idf = ln((1+N)/(1+df)) + 1.
inline TfIdfModel fit_tfidf(std::span<const std::vector<std::string>> docs, TfIdfOptions options = {}) {
    if (docs.empty()) throw InputError("cannot fit tf-idf on an empty corpus");
    if (options.max_order < 1 || options.max_order > 2) throw ConfigError("tf-idf max_order must be 1 or 2");
    const Vocabulary probe({}, options.max_order);
    std::unordered_map<std::string, std::size_t> df;
    for (const auto& doc : docs) {
        auto terms = probe.terms_of(doc);
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
        for (auto& t : terms) ++df[t];
    }
    std::vector<std::string> kept;
    for (const auto& [term, count] : df)
        if (count >= std::max<std::size_t>(options.min_df, 1)) kept.push_back(term);
    TfIdfModel model;
    model.vocabulary = Vocabulary(std::move(kept), options.max_order);
    model.n_docs = docs.size();
    model.min_df = options.min_df;
    model.idf.resize(model.vocabulary.size());
    for (std::size_t i = 0; i < model.vocabulary.size(); ++i)
        model.idf[i] = smoothed_idf(docs.size(), df.at(model.vocabulary.term(i)));
    return model;
}

inline TfIdfModel fit_tfidf(std::span<const TokenizedPost> posts, TfIdfOptions options = {}) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(posts.size());
    for (const auto& p : posts) docs.push_back(p.tokens);
    return fit_tfidf(std::span<const std::vector<std::string>>(docs), options);
}

/// Raw in-vocabulary term counts of one document.
inline std::map<std::uint32_t, double> term_counts(const Vocabulary& vocab, const std::vector<std::string>& doc) {
    std::map<std::uint32_t, double> counts;
    for (const auto& t : vocab.terms_of(doc))
        if (auto i = vocab.index_of(t)) counts[*i] += 1.0;
    return counts;
}

/// tf x idf, L2-normalized. OOV tokens are ignored.
inline SparseVector transform(const TfIdfModel& model, const std::vector<std::string>& doc) {
    std::vector<SparseVector::Entry> entries;
    double sq = 0.0;
    for (const auto& [i, tf] : term_counts(model.vocabulary, doc)) {
        const double w = tf * model.idf[i];
        entries.emplace_back(i, w);
        sq += w * w;
    }
    if (sq == 0.0) return SparseVector{};
    const double norm = std::sqrt(sq);
    for (auto& e : entries) e.second /= norm;
    return SparseVector(std::move(entries));
}

struct TermScore {
    std::string term;
    double score = 0.0;
};

/// Sum of un-normalized tf-idf weights over `docs`; top k by score, ties by
/// term ascending. Terms rejected by `exclude` are skipped.
template <typename Exclude>
std::vector<TermScore> top_terms(const TfIdfModel& model, std::span<const std::vector<std::string>> docs,
                                 std::size_t k, Exclude exclude) {
    if (k < 1) throw ConfigError("top_terms: k must be >= 1");
    std::map<std::uint32_t, double> score;
    for (const auto& doc : docs)
        for (const auto& [i, tf] : term_counts(model.vocabulary, doc)) score[i] += tf * model.idf[i];
    std::vector<TermScore> ranked;
    for (const auto& [i, s] : score) {
        const auto& term = model.vocabulary.term(i);
        if (!exclude(term)) ranked.push_back({term, s});
    }
    std::sort(ranked.begin(), ranked.end(), [](const TermScore& a, const TermScore& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.term < b.term;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

inline std::vector<TermScore> top_terms(const TfIdfModel& model, std::span<const std::vector<std::string>> docs,
                                        std::size_t k) {
    return top_terms(model, docs, k, [](const std::string&) { return false; });
}

/// Greedy first-wins near-duplicate filter. A candidate is a duplicate when
/// its cosine with any kept vector reaches the threshold, or when it has the
/// same token sequence as a kept post.
class NearDuplicateFilter {
public:
    explicit NearDuplicateFilter(double threshold = 0.9) : threshold_(threshold) {
        if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("dedup threshold must be in (0, 1]");
    }

    double threshold() const noexcept { return threshold_; }
    std::size_t kept() const noexcept { return kept_vectors_.size(); }

    /// Returns true and remembers the post when it is kept.
    bool offer(const SparseVector& v, const std::vector<std::string>& tokens) {
        std::string key;
        for (const auto& t : tokens) {
            key += t;
            key.push_back('\x1f');
        }
        if (seen_texts_.count(key)) return false;
        if (!v.is_zero()) {
            for (const auto& k : kept_vectors_)
                if (cosine(v, k) >= threshold_) return false;
        }
        seen_texts_.insert(std::move(key));
        kept_vectors_.push_back(v);
        return true;
    }

private:
    double threshold_;
    std::vector<SparseVector> kept_vectors_;
    std::unordered_set<std::string> seen_texts_;
};

/// Indices (into `posts`) that survive greedy dedup, in input order.
inline std::vector<std::size_t> dedup_indices(std::span<const TokenizedPost> posts, const TfIdfModel& model,
                                              double threshold = 0.9) {
    NearDuplicateFilter filter(threshold);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < posts.size(); ++i)
        if (filter.offer(transform(model, posts[i].tokens), posts[i].tokens)) keep.push_back(i);
    return keep;
}

inline Corpus dedup(const Corpus& corpus, const TfIdfModel& model, double threshold = 0.9) {
    const auto tokenized = tokenize_corpus(corpus);
    Corpus out(corpus.name());
    for (auto i : dedup_indices(tokenized, model, threshold)) out.add(corpus[i]);
    return out;
}

// Persistence: {"n_docs": int, "min_df": int, "idf": {term: weight}}

inline nlohmann::json to_json(const TfIdfModel& model) {
    nlohmann::json idf = nlohmann::json::object();
    for (std::size_t i = 0; i < model.vocabulary.size(); ++i) idf[model.vocabulary.term(i)] = model.idf[i];
    nlohmann::json j;
    j["n_docs"] = model.n_docs;
    j["min_df"] = model.min_df;
    j["idf"] = std::move(idf);
    if (model.vocabulary.max_order() != 1) j["max_order"] = model.vocabulary.max_order();
    return j;
}

inline TfIdfModel tfidf_from_json(const nlohmann::json& j) {
    try {
        TfIdfModel m;
        m.n_docs = j.at("n_docs").get<std::size_t>();
        m.min_df = j.at("min_df").get<std::size_t>();
        if (m.n_docs < 1) throw InputError("tf-idf model: n_docs must be >= 1");
        std::vector<std::string> terms;
        for (const auto& [term, w] : j.at("idf").items()) terms.push_back(term);
        m.vocabulary = Vocabulary(terms, j.value("max_order", 1));
        m.idf.resize(m.vocabulary.size());
        const auto& idf = j.at("idf");
        for (std::size_t i = 0; i < m.vocabulary.size(); ++i) {
            const double w = idf.at(m.vocabulary.term(i)).get<double>();
            if (!(w > 0.0)) throw InputError("tf-idf model: idf must be positive");
            m.idf[i] = w;
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("tf-idf model: ") + e.what());
    }
}

}  // namespace lexboot
