#pragma once

#include <array>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexboot/corpus.hpp"
#include "lexboot/utf8.hpp"

namespace lexboot {

enum class PosTag { NOUN, VERB, ADJ, ADV, PRON, DET, ADP, NUM, PRT, PUNCT, X };

inline constexpr std::array<PosTag, 11> kPosTags = {PosTag::NOUN, PosTag::VERB, PosTag::ADJ, PosTag::ADV,
                                                     PosTag::PRON, PosTag::DET,  PosTag::ADP, PosTag::NUM,
                                                     PosTag::PRT,  PosTag::PUNCT, PosTag::X};

inline std::string_view to_string(PosTag t) {
    switch (t) {
        case PosTag::NOUN: return "NOUN";
        case PosTag::VERB: return "VERB";
        case PosTag::ADJ: return "ADJ";
        case PosTag::ADV: return "ADV";
        case PosTag::PRON: return "PRON";
        case PosTag::DET: return "DET";
        case PosTag::ADP: return "ADP";
        case PosTag::NUM: return "NUM";
        case PosTag::PRT: return "PRT";
        case PosTag::PUNCT: return "PUNCT";
        case PosTag::X: return "X";
    }
    return "X";
}

class PosTagger {
public:
    virtual ~PosTagger() = default;
    /// One coarse tag per token; output length equals input length.
    virtual std::vector<PosTag> tags(const std::vector<std::string>& tokens) const = 0;
};

/// Closed-class word lists, then suffix rules, then NOUN. Conjunctions and
/// particles share PRT since the tag set has no CONJ.
class RuleTagger final : public PosTagger {
public:
    RuleTagger() {
        auto put = [&](PosTag tag, std::initializer_list<std::string_view> words) {
            for (auto w : words) lexicon_.emplace(std::string(w), tag);
        };
        put(PosTag::DET, {"the", "a", "an", "this", "that", "these", "those", "every", "each", "some", "any", "no",
                          "all", "both", "another", "such", "which", "whose"});
        put(PosTag::PRON, {"i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves", "you", "your",
                           "yours", "yourself", "yourselves", "u", "ur", "he", "him", "his", "himself", "she", "her",
                           "hers", "herself", "it", "its", "itself", "they", "them", "their", "theirs", "themselves",
                           "who", "whom", "what", "someone", "anyone", "everyone", "nobody", "somebody", "anybody",
                           "everybody", "something", "anything", "everything", "nothing", "none"});
        put(PosTag::ADP, {"in", "on", "at", "by", "for", "with", "about", "against", "between", "into", "through",
                          "during", "before", "after", "above", "below", "from", "up", "down", "of", "off", "over",
                          "under", "near", "since", "till", "until", "towards", "toward", "via", "without", "within",
                          "across", "along", "around", "behind", "beside", "per", "like"});
        put(PosTag::PRT, {"to", "not", "n't", "and", "or", "but", "nor", "yet", "so", "if", "because", "than",
                          "as", "while", "though", "although", "whether"});
        put(PosTag::VERB, {"is", "am", "are", "was", "were", "be", "been", "being", "has", "have", "had", "having",
                           "do", "does", "did", "will", "would", "shall", "should", "can", "could", "may", "might",
                           "must", "get", "gets", "got", "go", "goes", "went", "gone", "make", "makes", "made",
                           "take", "takes", "took", "come", "came", "see", "saw", "know", "knew", "say", "said",
                           "need", "needs", "want", "wants", "fix", "help", "stop", "run", "runs", "ran", "wait",
                           "waits", "let", "give", "gave", "tell", "told", "pay", "paid", "reach", "leave", "left",
                           "think", "feel", "felt", "keep", "kept", "please"});
        put(PosTag::ADJ, {"late", "bad", "good", "great", "slow", "fast", "new", "old", "big", "small", "high",
                          "low", "long", "short", "hot", "cold", "full", "empty", "dirty", "clean", "poor", "rude",
                          "safe", "unsafe", "worst", "best", "better", "worse", "busy", "broken", "crowded",
                          "delayed", "unfair", "cheap", "expensive", "nice", "terrible", "horrible", "awful",
                          "proper", "right", "wrong", "early", "free", "same", "other", "many", "much", "more",
                          "most", "few", "less", "least"});
        put(PosTag::ADV, {"very", "too", "again", "already", "always", "never", "now", "then", "here", "there",
                          "today", "tomorrow", "yesterday", "still", "just", "also", "even", "ever", "often",
                          "soon", "once", "really", "why", "how", "when", "where", "almost", "only", "quite"});
    }

    std::vector<PosTag> tags(const std::vector<std::string>& tokens) const override {
        std::vector<PosTag> out;
        out.reserve(tokens.size());
        for (const auto& t : tokens) out.push_back(tag(t));
        return out;
    }

    PosTag tag(const std::string& token) const {
        if (token.empty()) return PosTag::X;
        if (is_placeholder(token)) return PosTag::X;
        if (is_punct_token(token)) return PosTag::PUNCT;
        if (auto it = lexicon_.find(token); it != lexicon_.end()) return it->second;
        const auto cps = utf8::decode(token);
        bool has_digit = false, all_num = true, has_alpha = false;
        for (char32_t c : cps) {
            if (utf8::is_digit(c)) has_digit = true;
            else if (c != U',' && c != U'.') all_num = false;
            if (utf8::is_alpha(c)) has_alpha = true;
        }
        if (has_digit && all_num) return PosTag::NUM;
        if (!has_alpha && !has_digit) return PosTag::X;
        auto ends = [&](std::string_view suffix) {
            return token.size() > suffix.size() + 2 &&
                   std::string_view(token).substr(token.size() - suffix.size()) == suffix;
        };
        if (ends("ly")) return PosTag::ADV;
        if (ends("ing") || ends("ed") || ends("ize") || ends("ise") || ends("ify")) return PosTag::VERB;
        if (ends("ous") || ends("ful") || ends("able") || ends("ible") || ends("ive") || ends("less") ||
            ends("ic") || ends("ish") || ends("ary"))
            return PosTag::ADJ;
        return PosTag::NOUN;
    }

private:
    std::unordered_map<std::string, PosTag> lexicon_;
};

}  // namespace lexboot
