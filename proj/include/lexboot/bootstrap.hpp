#pragma once

#include <array>
#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexboot/corpus.hpp"
#include "lexboot/error.hpp"
#include "lexboot/resources.hpp"
#include "lexboot/vectorspace.hpp"

namespace lexboot {

enum class PhraseStatus { candidate, approved, rejected };

inline std::string_view to_string(PhraseStatus s) {
    switch (s) {
        case PhraseStatus::candidate: return "candidate";
        case PhraseStatus::approved: return "approved";
        case PhraseStatus::rejected: return "rejected";
    }
    return "candidate";
}

inline std::optional<PhraseStatus> parse_phrase_status(std::string_view s) {
    if (s == "candidate") return PhraseStatus::candidate;
    if (s == "approved") return PhraseStatus::approved;
    if (s == "rejected") return PhraseStatus::rejected;
    return std::nullopt;
}

struct SeedPhrase {
    std::string text;
    int origin_iteration = 0;
    std::optional<double> drs;  ///< absent for tf-idf seeds
    PhraseStatus status = PhraseStatus::candidate;

    friend bool operator==(const SeedPhrase&, const SeedPhrase&) = default;
};

/// Throws ConfigError unless `text` is a normalized 1-3 token phrase.
inline void validate_phrase_text(const std::string& text) {
    if (text.empty()) throw ConfigError("seed phrase must be non-empty");
    if (normalize(text) != text) throw ConfigError("seed phrase '" + text + "' is not normalized");
    const auto n = tokenize(text).size();
    if (n < 1 || n > 3) throw ConfigError("seed phrase '" + text + "' must have 1-3 tokens");
}

/// Phrases keyed by text, kept in insertion order. A phrase leaves the
/// candidate state exactly once; rejected phrases stay in the lexicon so they
/// are never proposed again.
class Lexicon {
public:
    /// Throws StateError if the text is already present (any status).
    void add(SeedPhrase phrase) {
        validate_phrase_text(phrase.text);
        if (index_.count(phrase.text)) throw StateError("phrase '" + phrase.text + "' already in lexicon");
        index_.emplace(phrase.text, phrases_.size());
        phrases_.push_back(std::move(phrase));
    }

    bool contains(const std::string& text) const { return index_.count(text) > 0; }

    const SeedPhrase* find(const std::string& text) const {
        auto it = index_.find(text);
        return it == index_.end() ? nullptr : &phrases_[it->second];
    }

    /// candidate -> approved/rejected. NotFoundError if absent, StateError if already decided.
    void decide(const std::string& text, bool keep) {
        auto it = index_.find(text);
        if (it == index_.end()) throw NotFoundError("unknown phrase '" + text + "'");
        auto& p = phrases_[it->second];
        if (p.status != PhraseStatus::candidate)
            throw StateError("phrase '" + text + "' already " + std::string(to_string(p.status)));
        p.status = keep ? PhraseStatus::approved : PhraseStatus::rejected;
    }

    void approve(const std::string& text) { decide(text, true); }
    void reject(const std::string& text) { decide(text, false); }

    std::vector<SeedPhrase> with_status(PhraseStatus s) const {
        std::vector<SeedPhrase> out;
        for (const auto& p : phrases_)
            if (p.status == s) out.push_back(p);
        return out;
    }

    std::vector<std::string> approved_texts() const {
        std::vector<std::string> out;
        for (const auto& p : phrases_)
            if (p.status == PhraseStatus::approved) out.push_back(p.text);
        return out;
    }

    std::size_t count(PhraseStatus s) const {
        return static_cast<std::size_t>(
            std::count_if(phrases_.begin(), phrases_.end(), [s](const SeedPhrase& p) { return p.status == s; }));
    }

    const std::vector<SeedPhrase>& phrases() const noexcept { return phrases_; }
    std::size_t size() const noexcept { return phrases_.size(); }

    friend bool operator==(const Lexicon& a, const Lexicon& b) { return a.phrases_ == b.phrases_; }

private:
    std::vector<SeedPhrase> phrases_;
    std::unordered_map<std::string, std::size_t> index_;
};

inline nlohmann::ordered_json to_json(const SeedPhrase& p) {
    nlohmann::ordered_json j;
    j["text"] = p.text;
    j["origin_iteration"] = p.origin_iteration;
    j["drs"] = p.drs ? nlohmann::ordered_json(*p.drs) : nlohmann::ordered_json(nullptr);
    j["status"] = to_string(p.status);
    return j;
}

inline void write_lexicon(std::ostream& out, const Lexicon& lexicon) {
    for (const auto& p : lexicon.phrases()) out << to_json(p).dump(-1, ' ', false) << '\n';
}

inline Lexicon read_lexicon(std::istream& in, const std::string& origin = "<lexicon>") {
    Lexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (Corpus::trim(line).empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        try {
            const auto j = nlohmann::json::parse(line);
            SeedPhrase p;
            p.text = j.at("text").get<std::string>();
            p.origin_iteration = j.value("origin_iteration", 0);
            if (auto d = j.find("drs"); d != j.end() && !d->is_null()) p.drs = d->get<double>();
            auto status = parse_phrase_status(j.value("status", std::string("candidate")));
            if (!status) throw InputError(where + ": unknown status");
            p.status = *status;
            lex.add(std::move(p));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(where + ": malformed lexicon record (" + e.what() + ")");
        } catch (const ConfigError& e) {
            throw InputError(where + ": " + e.what());
        } catch (const StateError& e) {
            throw InputError(where + ": " + e.what());
        }
    }
    return lex;
}

// --------------------------------------------------------------------------
// Background pool and domain relevance
// --------------------------------------------------------------------------

enum class DrsUnit { documents, tokens };

inline std::string_view to_string(DrsUnit u) { return u == DrsUnit::documents ? "documents" : "tokens"; }

inline std::optional<DrsUnit> parse_drs_unit(std::string_view s) {
    if (s == "documents") return DrsUnit::documents;
    if (s == "tokens") return DrsUnit::tokens;
    return std::nullopt;
}

/// Distinct n-grams (orders 1..max_order) of one token list.
inline std::vector<std::string> distinct_ngrams(const std::vector<std::string>& tokens, int max_order = 3) {
    std::vector<std::string> all;
    for (int n = 1; n <= max_order; ++n) {
        auto g = ngrams(tokens, n);
        all.insert(all.end(), std::make_move_iterator(g.begin()), std::make_move_iterator(g.end()));
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

/// Random posts from outside the collection period, with per-order document
/// and occurrence frequency tables for n in {1,2,3}.
class BackgroundPool {
public:
    BackgroundPool() = default;

    explicit BackgroundPool(Corpus corpus) : corpus_(std::move(corpus)) {
        if (corpus_.empty()) throw InputError("background pool must be non-empty");
        for (const auto& post : corpus_) {
            const auto tokens = tokenize(normalize(post.text));
            token_total_ += tokens.size();
            for (int n = 1; n <= 3; ++n) {
                auto grams = ngrams(tokens, n);
                for (const auto& g : grams) ++occurrences_[n - 1][g];
                std::sort(grams.begin(), grams.end());
                grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
                for (auto& g : grams) ++doc_freq_[n - 1][g];
            }
        }
    }

    const Corpus& corpus() const noexcept { return corpus_; }
    std::size_t size() const noexcept { return corpus_.size(); }
    std::size_t token_total() const noexcept { return token_total_; }

    /// Number of background posts containing the gram.
    std::size_t document_frequency(const std::string& gram) const { return lookup(doc_freq_, gram); }
    std::size_t occurrences(const std::string& gram) const { return lookup(occurrences_, gram); }

    const std::unordered_map<std::string, std::size_t>& table(int order) const {
        check_pipeline_order(order);
        return doc_freq_[static_cast<std::size_t>(order - 1)];
    }

private:
    static std::size_t lookup(const std::array<std::unordered_map<std::string, std::size_t>, 3>& tables,
                              const std::string& gram) {
        const auto n = tokenize(gram).size();
        if (n < 1 || n > 3) return 0;
        const auto& t = tables[n - 1];
        auto it = t.find(gram);
        return it == t.end() ? 0 : it->second;
    }

    Corpus corpus_;
    std::array<std::unordered_map<std::string, std::size_t>, 3> doc_freq_;
    std::array<std::unordered_map<std::string, std::size_t>, 3> occurrences_;
    std::size_t token_total_ = 0;
};

/// Coverage ratio with add-one smoothing on the background side:
/// (rel_hits / rel_total) / ((bg_hits + 1) / (bg_total + 1)).
inline double drs_from_counts(std::size_t rel_hits, std::size_t rel_total, std::size_t bg_hits,
                              std::size_t bg_total) {
    if (rel_hits == 0 || rel_total == 0) return 0.0;
    const double cov_rel = static_cast<double>(rel_hits) / static_cast<double>(rel_total);
    const double cov_bg = (static_cast<double>(bg_hits) + 1.0) / (static_cast<double>(bg_total) + 1.0);
    return cov_rel / cov_bg;
}

namespace detail {

inline std::size_t count_occurrences(const std::vector<std::string>& tokens, const std::vector<std::string>& phrase) {
    std::size_t c = 0;
    if (phrase.empty() || phrase.size() > tokens.size()) return 0;
    for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i)
        if (std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) ++c;
    return c;
}

}  // namespace detail

/// Domain relevance of a gram: its coverage in the relevant posts divided by
/// its smoothed coverage in the background pool.
inline double drs(const std::string& gram, std::span<const TokenizedPost> relevant, const BackgroundPool& background,
                  DrsUnit unit = DrsUnit::documents) {
    const auto phrase = tokenize(gram);
    if (unit == DrsUnit::documents) {
        std::size_t hits = 0;
        for (const auto& p : relevant)
            if (contains_phrase(p.tokens, phrase)) ++hits;
        return drs_from_counts(hits, relevant.size(), background.document_frequency(gram), background.size());
    }
    std::size_t hits = 0;
    std::size_t total = 0;
    for (const auto& p : relevant) {
        hits += detail::count_occurrences(p.tokens, phrase);
        total += p.tokens.size();
    }
    return drs_from_counts(hits, total, background.occurrences(gram), background.token_total());
}

inline double drs(const std::string& gram, const Corpus& relevant, const BackgroundPool& background,
                  DrsUnit unit = DrsUnit::documents) {
    const auto tokenized = tokenize_corpus(relevant);
    return drs(gram, std::span<const TokenizedPost>(tokenized), background, unit);
}

// --------------------------------------------------------------------------
// Matching and candidate generation
// --------------------------------------------------------------------------

/// Token-aligned phrase matcher indexed by first token.
class PhraseIndex {
public:
    explicit PhraseIndex(const std::vector<std::string>& phrases) {
        for (const auto& p : phrases) {
            auto toks = tokenize(normalize(p));
            if (toks.empty()) continue;
            by_first_[toks.front()].push_back(std::move(toks));
        }
    }

    bool empty() const noexcept { return by_first_.empty(); }

    bool matches(const std::vector<std::string>& tokens) const {
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            auto it = by_first_.find(tokens[i]);
            if (it == by_first_.end()) continue;
            for (const auto& phrase : it->second) {
                if (i + phrase.size() > tokens.size()) continue;
                if (std::equal(phrase.begin() + 1, phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i + 1)))
                    return true;
            }
        }
        return false;
    }

private:
    std::unordered_map<std::string, std::vector<std::vector<std::string>>> by_first_;
};

/// Indices of posts containing any of the phrases, in order.
inline std::vector<std::size_t> match_indices(std::span<const TokenizedPost> posts,
                                              const std::vector<std::string>& phrases) {
    const PhraseIndex index(phrases);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < posts.size(); ++i)
        if (index.matches(posts[i].tokens)) out.push_back(i);
    return out;
}

/// Posts whose normalized text contains an approved phrase as a contiguous
/// token subsequence.
inline Corpus match_relevant(const Corpus& corpus, const Lexicon& lexicon) {
    const auto approved = lexicon.approved_texts();
    if (approved.empty()) throw StateError("match_relevant: lexicon has no approved phrases");
    const auto tokenized = tokenize_corpus(corpus);
    Corpus out(corpus.name());
    for (auto i : match_indices(tokenized, approved)) out.add(corpus[i]);
    return out;
}

struct CandidateOptions {
    double threshold = 10.0;
    std::size_t min_posts = 2;
    int max_order = 3;
    DrsUnit unit = DrsUnit::documents;
};

/// n-grams (n <= 3) present in at least `min_posts` relevant posts with
/// drs >= threshold that are not in the lexicon under any status. Sorted by
/// drs descending, then text.
inline std::vector<SeedPhrase> candidate_phrases(std::span<const TokenizedPost> relevant,
                                                 const BackgroundPool& background, const Lexicon& lexicon,
                                                 const CandidateOptions& options, int iteration = 0) {
    if (!(options.threshold > 0.0)) throw ConfigError("drs threshold must be > 0");
    std::unordered_map<std::string, std::size_t> doc_hits;
    std::unordered_map<std::string, std::size_t> occ_hits;
    std::size_t token_total = 0;
    for (const auto& post : relevant) {
        for (auto& g : distinct_ngrams(post.tokens, options.max_order)) ++doc_hits[g];
        if (options.unit == DrsUnit::tokens) {
            token_total += post.tokens.size();
            for (int n = 1; n <= options.max_order; ++n)
                for (auto& g : ngrams(post.tokens, n)) ++occ_hits[g];
        }
    }
    std::vector<SeedPhrase> out;
    for (const auto& [gram, hits] : doc_hits) {
        if (hits < options.min_posts || lexicon.contains(gram)) continue;
        const double score = options.unit == DrsUnit::documents
                                 ? drs_from_counts(hits, relevant.size(), background.document_frequency(gram),
                                                   background.size())
                                 : drs_from_counts(occ_hits[gram], token_total, background.occurrences(gram),
                                                   background.token_total());
        if (score >= options.threshold) out.push_back(SeedPhrase{gram, iteration, score, PhraseStatus::candidate});
    }
    std::sort(out.begin(), out.end(), [](const SeedPhrase& a, const SeedPhrase& b) {
        if (*a.drs != *b.drs) return *a.drs > *b.drs;
        return a.text < b.text;
    });
    return out;
}

inline std::vector<SeedPhrase> candidate_phrases(const Corpus& relevant, const BackgroundPool& background,
                                                 const Lexicon& lexicon, double threshold) {
    const auto tokenized = tokenize_corpus(relevant);
    CandidateOptions options;
    options.threshold = threshold;
    return candidate_phrases(tokenized, background, lexicon, options);
}

/// Top-k tf-idf terms of the informative posts as iteration-0 candidates.
/// Stopwords are skipped.
inline std::vector<SeedPhrase> initial_seeds(const Corpus& informative, const TfIdfModel& model, std::size_t k,
                                             const std::unordered_set<std::string>& stopwords = default_stopwords()) {
    if (informative.empty()) throw InputError("initial_seeds: informative corpus is empty");
    std::vector<std::vector<std::string>> docs;
    for (const auto& p : informative) docs.push_back(tokenize(normalize(p.text)));
    auto ranked = top_terms(model, std::span<const std::vector<std::string>>(docs), k, [&](const std::string& term) {
        for (const auto& tok : tokenize(term))
            if (!stopwords.count(tok)) return false;
        return true;
    });
    std::vector<SeedPhrase> out;
    for (auto& t : ranked) out.push_back(SeedPhrase{std::move(t.term), 0, std::nullopt, PhraseStatus::candidate});
    return out;
}

// --------------------------------------------------------------------------
// The iterative loop
// --------------------------------------------------------------------------

enum class ReviewMode { automatic, interactive };

inline std::string_view to_string(ReviewMode m) { return m == ReviewMode::automatic ? "auto" : "interactive"; }

inline std::optional<ReviewMode> parse_review_mode(std::string_view s) {
    if (s == "auto") return ReviewMode::automatic;
    if (s == "interactive") return ReviewMode::interactive;
    return std::nullopt;
}

struct BootstrapConfig {
    std::size_t seed_count = 50;
    double drs_threshold = 10.0;
    int max_iterations = 10;
    double dedup_threshold = 0.9;
    ReviewMode review_mode = ReviewMode::automatic;
    DrsUnit drs_unit = DrsUnit::documents;
    std::size_t min_df = 2;
    std::size_t candidate_min_posts = 2;

    void validate() const {
        if (seed_count < 1) throw ConfigError("seed_count must be >= 1");
        if (!(drs_threshold > 0.0)) throw ConfigError("drs_threshold must be > 0");
        if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
        if (!(dedup_threshold > 0.0 && dedup_threshold <= 1.0)) throw ConfigError("dedup_threshold must be in (0, 1]");
        if (candidate_min_posts < 1) throw ConfigError("candidate_min_posts must be >= 1");
    }
};

enum class StopReason { fixed_point, max_iterations, manual_stop };

inline std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::fixed_point: return "fixed_point";
        case StopReason::max_iterations: return "max_iterations";
        case StopReason::manual_stop: return "manual_stop";
    }
    return "fixed_point";
}

struct IterationReport {
    int iteration = 0;
    std::vector<std::string> new_phrases;  ///< approved during this iteration's review
    std::size_t candidate_count = 0;
    std::size_t newly_matched = 0;        ///< posts added to the relevant set this iteration
    std::size_t matched_post_count = 0;   ///< cumulative relevant-set size
    std::optional<StopReason> stop_reason;

    friend bool operator==(const IterationReport&, const IterationReport&) = default;
};

inline nlohmann::ordered_json to_json(const IterationReport& r) {
    nlohmann::ordered_json j;
    j["iteration"] = r.iteration;
    j["new_phrases"] = r.new_phrases;
    j["candidate_count"] = r.candidate_count;
    j["newly_matched"] = r.newly_matched;
    j["matched_post_count"] = r.matched_post_count;
    j["stop_reason"] = r.stop_reason ? nlohmann::ordered_json(to_string(*r.stop_reason))
                                     : nlohmann::ordered_json(nullptr);
    return j;
}

/// Step-wise bootstrap engine. The batch `run` drives it to completion; the
/// service drives it one review gate at a time.
///
/// Iteration 0 proposes seeds. Iteration i >= 1 matches posts against the
/// approved lexicon, adds unseen matches to the relevant set through the
/// greedy dedup filter, and proposes candidates tagged with origin i. Once
/// the candidates are decided, `advance` either stops (no approval in the
/// last iteration, or the iteration cap) or starts iteration i + 1.
class BootstrapSession {
public:
    BootstrapSession(const Corpus& corpus, const BackgroundPool& background, BootstrapConfig config)
        : corpus_(&corpus), background_(&background), config_(config), filter_(config.dedup_threshold) {
        config_.validate();
        tokens_ = tokenize_corpus(corpus);
        model_ = fit_tfidf(std::span<const TokenizedPost>(tokens_), TfIdfOptions{config_.min_df, 1});
        in_relevant_.assign(tokens_.size(), false);
    }

    const BootstrapConfig& config() const noexcept { return config_; }
    const TfIdfModel& model() const noexcept { return model_; }
    const Lexicon& lexicon() const noexcept { return lexicon_; }
    const std::vector<IterationReport>& reports() const noexcept { return reports_; }
    int iteration() const noexcept { return iteration_; }
    bool seeded() const noexcept { return seeded_; }
    bool finished() const noexcept { return stop_.has_value(); }
    std::optional<StopReason> stop_reason() const noexcept { return stop_; }

    /// Iteration-0 seeds from the informative posts.
    void seed_from(const Corpus& informative) {
        require_unseeded();
        auto seeds = initial_seeds(informative, model_, config_.seed_count);
        if (seeds.empty()) throw InputError("no seed terms found in the informative posts");
        for (auto& s : seeds) lexicon_.add(std::move(s));
        seeded_ = true;
        auto_approve();
    }

    /// Explicit seeds, approved immediately.
    void seed_with(const std::vector<std::string>& phrases) {
        require_unseeded();
        if (phrases.empty()) throw ConfigError("explicit seed list is empty");
        for (const auto& p : phrases) {
            const auto text = normalize(p);
            if (lexicon_.contains(text)) continue;
            lexicon_.add(SeedPhrase{text, 0, std::nullopt, PhraseStatus::approved});
        }
        seeded_ = true;
    }

    std::vector<SeedPhrase> pending() const { return lexicon_.with_status(PhraseStatus::candidate); }

    void decide(const std::string& text, bool keep) {
        if (finished()) throw StateError("run already finished");
        lexicon_.decide(text, keep);
    }

    /// Concludes the current review gate. Returns false once finished.
    bool advance() {
        if (!seeded_) throw StateError("advance before seeding");
        if (finished()) throw StateError("run already finished");
        if (!pending().empty()) throw StateError("candidates still pending review");
        if (iteration_ == 0) {
            if (lexicon_.count(PhraseStatus::approved) == 0) throw StateError("no seed phrase was approved");
        } else {
            auto& report = reports_.back();
            report.new_phrases.clear();
            for (const auto& p : lexicon_.phrases())
                if (p.origin_iteration == iteration_ && p.status == PhraseStatus::approved)
                    report.new_phrases.push_back(p.text);
            if (report.new_phrases.empty()) return finish(StopReason::fixed_point);
            if (iteration_ >= config_.max_iterations) return finish(StopReason::max_iterations);
        }
        run_iteration(iteration_ + 1);
        return !finished();
    }

    void stop() {
        if (finished()) throw StateError("run already finished");
        finish(StopReason::manual_stop);
    }

    /// Relevant posts in corpus order.
    Corpus relevant() const {
        Corpus out(corpus_->name());
        for (std::size_t i = 0; i < tokens_.size(); ++i)
            if (in_relevant_[i]) out.add((*corpus_)[i]);
        return out;
    }

    std::vector<std::size_t> relevant_indices() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < in_relevant_.size(); ++i)
            if (in_relevant_[i]) out.push_back(i);
        return out;
    }

    /// Up to `limit` relevant posts containing the phrase, for reviewers.
    std::vector<const Post*> examples_for(const std::string& phrase, std::size_t limit = 3) const {
        std::vector<const Post*> out;
        const auto toks = tokenize(normalize(phrase));
        for (std::size_t i = 0; i < tokens_.size() && out.size() < limit; ++i)
            if (in_relevant_[i] && contains_phrase(tokens_[i].tokens, toks)) out.push_back(&(*corpus_)[i]);
        for (std::size_t i = 0; i < tokens_.size() && out.size() < limit; ++i)
            if (!in_relevant_[i] && contains_phrase(tokens_[i].tokens, toks)) out.push_back(&(*corpus_)[i]);
        return out;
    }

    const std::vector<TokenizedPost>& tokenized() const noexcept { return tokens_; }

private:
    void require_unseeded() const {
        if (seeded_) throw StateError("session already seeded");
    }

    void auto_approve() {
        if (config_.review_mode != ReviewMode::automatic) return;
        for (const auto& p : pending()) lexicon_.approve(p.text);
    }

    bool finish(StopReason reason) {
        stop_ = reason;
        if (!reports_.empty()) reports_.back().stop_reason = reason;
        return false;
    }

    void run_iteration(int i) {
        iteration_ = i;
        IterationReport report;
        report.iteration = i;
        for (auto idx : match_indices(tokens_, lexicon_.approved_texts())) {
            if (in_relevant_[idx]) continue;
            if (filter_.offer(transform(model_, tokens_[idx].tokens), tokens_[idx].tokens)) {
                in_relevant_[idx] = true;
                relevant_tokens_.push_back(tokens_[idx]);
                ++report.newly_matched;
            }
        }
        report.matched_post_count = relevant_tokens_.size();
        CandidateOptions options;
        options.threshold = config_.drs_threshold;
        options.min_posts = config_.candidate_min_posts;
        options.unit = config_.drs_unit;
        auto candidates = candidate_phrases(relevant_tokens_, *background_, lexicon_, options, i);
        report.candidate_count = candidates.size();
        for (auto& c : candidates) lexicon_.add(std::move(c));
        reports_.push_back(std::move(report));
        if (candidates.empty()) {
            finish(StopReason::fixed_point);
            return;
        }
        auto_approve();
    }

    const Corpus* corpus_;
    const BackgroundPool* background_;
    BootstrapConfig config_;
    TfIdfModel model_;
    std::vector<TokenizedPost> tokens_;
    std::vector<bool> in_relevant_;
    std::vector<TokenizedPost> relevant_tokens_;  // in order of admission
    NearDuplicateFilter filter_;
    Lexicon lexicon_;
    std::vector<IterationReport> reports_;
    int iteration_ = 0;
    bool seeded_ = false;
    std::optional<StopReason> stop_;
};

/// Source of keep/drop decisions for candidate phrases in interactive mode.
class DecisionSource {
public:
    virtual ~DecisionSource() = default;
    /// Returns one (phrase, keep) pair per candidate.
    virtual std::vector<std::pair<std::string, bool>> review(const std::vector<SeedPhrase>& candidates,
                                                             int iteration) = 0;
};

/// Replays decisions from a fixed table; phrases not in the table are dropped.
class TableDecisionSource : public DecisionSource {
public:
    explicit TableDecisionSource(std::map<std::string, bool> table) : table_(std::move(table)) {}

    std::vector<std::pair<std::string, bool>> review(const std::vector<SeedPhrase>& candidates, int) override {
        std::vector<std::pair<std::string, bool>> out;
        for (const auto& c : candidates) {
            auto it = table_.find(c.text);
            out.emplace_back(c.text, it != table_.end() && it->second);
        }
        return out;
    }

private:
    std::map<std::string, bool> table_;
};

struct BootstrapResult {
    Corpus relevant;
    Lexicon lexicon;
    std::vector<IterationReport> reports;
};

/// Runs the loop to completion. `seeds`, when non-empty, replaces tf-idf
/// seeding from `informative`.
inline BootstrapResult run_bootstrap(const Corpus& corpus, const Corpus& informative, const BackgroundPool& background,
                                     const BootstrapConfig& config, DecisionSource* review = nullptr,
                                     const std::vector<std::string>& seeds = {}) {
    if (config.review_mode == ReviewMode::interactive && review == nullptr)
        throw ConfigError("interactive bootstrap requires a decision source");
    BootstrapSession session(corpus, background, config);
    if (seeds.empty()) session.seed_from(informative);
    else session.seed_with(seeds);
    while (!session.finished()) {
        auto pending = session.pending();
        if (!pending.empty()) {
            for (const auto& [text, keep] : review->review(pending, session.iteration())) session.decide(text, keep);
        }
        session.advance();
    }
    return BootstrapResult{session.relevant(), session.lexicon(), session.reports()};
}

}  // namespace lexboot
