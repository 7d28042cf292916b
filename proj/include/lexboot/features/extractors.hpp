#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "lexboot/corpus.hpp"
#include "lexboot/features/clusters.hpp"
#include "lexboot/features/feature_vector.hpp"
#include "lexboot/features/lexicons.hpp"
#include "lexboot/features/pos_tagger.hpp"
#include "lexboot/utf8.hpp"
#include "lexboot/vectorspace.hpp"

namespace lexboot {

using Group = FeatureVector::Group;

/// Raw counts of vocabulary terms; OOV terms are ignored.
inline Group extract_bow(const TokenizedPost& post, const Vocabulary& vocab) {
    Group g;
    for (const auto& t : vocab.terms_of(post.tokens))
        if (vocab.index_of(t)) g[t] += 1.0;
    return g;
}

/// Tag histogram normalized by token count.
inline Group extract_pos_counts(const TokenizedPost& post, const PosTagger& tagger) {
    Group g;
    if (post.tokens.empty()) return g;
    const auto tags = tagger.tags(post.tokens);
    for (auto t : tags) g[std::string(to_string(t))] += 1.0;
    for (auto& [k, v] : g) v /= static_cast<double>(post.tokens.size());
    return g;
}

/// Cluster histogram over mapped tokens, normalized by the mapped count.
inline Group extract_w2v_clusters(const TokenizedPost& post, const EmbeddingClusterModel& clusters) {
    Group g;
    std::size_t mapped = 0;
    for (const auto& t : post.tokens) {
        if (auto c = clusters.cluster_of(t)) {
            g["c" + std::to_string(*c)] += 1.0;
            ++mapped;
        }
    }
    for (auto& [k, v] : g) v /= static_cast<double>(mapped);
    return g;
}

/// pos_ratio, neg_ratio (matched entries / tokens) and polarity = pos - neg.
inline Group extract_sentiment(const TokenizedPost& post, const SentimentLexicon& lexicon) {
    double pos = 0.0, neg = 0.0;
    for (const auto& m : lexicon.matcher().scan(post.tokens)) {
        if (m.payload->polarity == Polarity::positive) pos += 1.0;
        else neg += 1.0;
    }
    const double n = static_cast<double>(post.tokens.size());
    const double pr = n > 0 ? pos / n : 0.0;
    const double nr = n > 0 ? neg / n : 0.0;
    return Group{{"pos_ratio", pr}, {"neg_ratio", nr}, {"polarity", pr - nr}};
}

namespace detail {

inline bool is_symbol(char32_t c) {
    if (utf8::is_punct(c)) return true;
    return (c >= 0x2190 && c <= 0x2BFF) || (c >= 0x1F000 && c <= 0x1FAFF) || (c >= 0x2600 && c <= 0x27BF);
}

inline bool ascii_prefix_ci(const std::u32string& s, std::size_t i, std::string_view prefix) {
    if (s.size() < i + prefix.size()) return false;
    for (std::size_t k = 0; k < prefix.size(); ++k)
        if (utf8::fold(s[i + k]) != static_cast<char32_t>(prefix[k])) return false;
    return true;
}

inline std::size_t url_prefix(const std::u32string& s, std::size_t i) {
    std::size_t p = 0;
    if (ascii_prefix_ci(s, i, "http://")) p = 7;
    else if (ascii_prefix_ci(s, i, "https://")) p = 8;
    else if (ascii_prefix_ci(s, i, "www.")) p = 4;
    if (p > 0 && i + p < s.size() && !utf8::is_space(s[i + p])) return p;
    return 0;
}

/// Sentences as token ranges split after ".", "!" or "?", with leading
/// placeholders skipped. Each entry is (tokens, terminator or "").
inline std::vector<std::pair<std::vector<std::string>, std::string>> sentences(const std::vector<std::string>& tokens) {
    std::vector<std::pair<std::vector<std::string>, std::string>> out;
    std::vector<std::string> cur;
    auto close = [&](const std::string& term) {
        if (!cur.empty()) out.emplace_back(std::move(cur), term);
        else if (!out.empty() && !term.empty()) out.back().second = term;  // "??" keeps one sentence
        cur.clear();
    };
    for (const auto& t : tokens) {
        if (t == "." || t == "!" || t == "?") {
            close(t);
            continue;
        }
        if (cur.empty() && is_placeholder(t)) continue;
        cur.push_back(t);
    }
    close("");
    return out;
}

}  // namespace detail

/// Counts on the raw text: URLs, hashtags, mentions, '!' and '?', and other
/// punctuation or symbol characters outside those spans.
inline Group extract_meta(const TokenizedPost& post) {
    const std::u32string s = utf8::decode(post.raw_text);
    double urls = 0, hashtags = 0, mentions = 0, excl = 0, quest = 0, other = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        const char32_t c = s[i];
        const bool boundary = i == 0 || !utf8::is_word(s[i - 1]);
        if (boundary) {
            if (auto p = detail::url_prefix(s, i); p > 0) {
                ++urls;
                while (i < s.size() && !utf8::is_space(s[i])) ++i;
                continue;
            }
            if ((c == U'@' || c == U'#') && i + 1 < s.size() && utf8::is_word(s[i + 1]) &&
                !detail::is_symbol(s[i + 1])) {
                ++(c == U'@' ? mentions : hashtags);
                ++i;
                while (i < s.size() && utf8::is_word(s[i]) && !detail::is_symbol(s[i])) ++i;
                continue;
            }
        }
        if (c == U'!') ++excl;
        else if (c == U'?') ++quest;
        else if (detail::is_symbol(c)) ++other;
        ++i;
    }
    return Group{{"urls", urls},
                 {"hashtags", hashtags},
                 {"mentions", mentions},
                 {"exclamations", excl},
                 {"question_marks", quest},
                 {"other_special_symbols", other}};
}

/// Sum of the weights of the request rules that fire, clipped to [0, 1].
inline Group extract_request(const TokenizedPost& post, const RequestRules& rules) {
    bool please = false, modal = false, question_you = false, imperative = false;
    for (const auto& t : post.tokens)
        if (rules.please_words.count(t)) please = true;
    for (const auto& [sent, term] : detail::sentences(post.tokens)) {
        std::size_t first = 0;
        while (first < sent.size() && rules.please_words.count(sent[first])) ++first;
        if (first < sent.size()) {
            if (rules.modal_starts.count(sent[first])) modal = true;
            if (rules.imperative_verbs.count(sent[first])) imperative = true;
        }
        if (term == "?")
            for (const auto& t : sent)
                if (rules.second_person.count(t)) question_you = true;
    }
    double score = 0.0;
    if (please) score += rules.please_weight;
    if (modal) score += rules.modal_start_weight;
    if (question_you) score += rules.question_you_weight;
    if (imperative) score += rules.imperative_start_weight;
    return Group{{"score", std::clamp(score, 0.0, 1.0)}};
}

inline Group extract_request(const TokenizedPost& post) {
    static const RequestRules rules = RequestRules::shipped();
    return extract_request(post, rules);
}

/// cap_words: raw words (edge punctuation trimmed, mentions/hashtags/URLs
/// skipped) longer than one character whose first letter is uppercase,
/// sentence-initial words included. all_caps_words: words with at least two
/// letters and no lowercase letter. repeated_symbol_runs: maximal runs of
/// two or more identical '!' or '?'.
inline Group extract_intensifiers(const TokenizedPost& post) {
    const std::u32string s = utf8::decode(post.raw_text);
    double cap = 0, all_caps = 0, runs = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        if (utf8::is_space(s[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && !utf8::is_space(s[j])) ++j;
        const bool skip = s[i] == U'@' || s[i] == U'#' || detail::url_prefix(s, i) > 0;
        std::size_t a = i, b = j;
        while (a < b && utf8::is_punct(s[a])) ++a;
        while (b > a && utf8::is_punct(s[b - 1])) --b;
        if (!skip && b - a > 1) {
            if (utf8::is_upper(s[a])) ++cap;
            std::size_t letters = 0;
            bool lower = false;
            for (std::size_t k = a; k < b; ++k) {
                if (utf8::is_alpha(s[k])) ++letters;
                if (utf8::is_lower(s[k])) lower = true;
            }
            if (letters >= 2 && !lower) ++all_caps;
        }
        i = j;
    }
    for (std::size_t k = 0; k < s.size();) {
        if (s[k] == U'!' || s[k] == U'?') {
            std::size_t e = k;
            while (e < s.size() && s[e] == s[k]) ++e;
            if (e - k >= 2) ++runs;
            k = e;
        } else {
            ++k;
        }
    }
    return Group{{"cap_words", cap}, {"all_caps_words", all_caps}, {"repeated_symbol_runs", runs}};
}

/// (polite markers - impolite markers) / tokens, clipped to [-1, 1]. A
/// sentence opening with a question word counts as one impolite marker.
inline Group extract_politeness(const TokenizedPost& post, const PolitenessLexicon& lexicon) {
    if (post.tokens.empty()) return Group{{"score", 0.0}};
    double balance = 0.0;
    for (const auto& m : lexicon.markers.scan(post.tokens)) balance += *m.payload;
    for (const auto& [sent, term] : detail::sentences(post.tokens))
        if (!sent.empty() && lexicon.direct_question_starts.count(sent.front())) balance -= 1.0;
    const double score = balance / static_cast<double>(post.tokens.size());
    return Group{{"score", std::clamp(score, -1.0, 1.0)}};
}

inline Group extract_politeness(const TokenizedPost& post) {
    static const PolitenessLexicon lexicon = PolitenessLexicon::shipped();
    return extract_politeness(post, lexicon);
}

inline Group extract_pronouns(const TokenizedPost& post, const PronounDictionaries& dicts) {
    static const char* kNames[] = {"first", "second", "third", "demonstrative", "indefinite"};
    PhraseMatcher<int> matcher;
    const std::unordered_set<std::string>* sets[] = {&dicts.first, &dicts.second, &dicts.third, &dicts.demonstrative,
                                                     &dicts.indefinite};
    for (int k = 0; k < 5; ++k)
        for (const auto& w : *sets[k]) matcher.add(w, k);
    double counts[5] = {0, 0, 0, 0, 0};
    for (const auto& m : matcher.scan(post.tokens)) counts[*m.payload] += 1.0;
    Group g;
    for (int k = 0; k < 5; ++k) g[kNames[k]] = counts[k];
    return g;
}

}  // namespace lexboot
