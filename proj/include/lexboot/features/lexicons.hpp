#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "lexboot/error.hpp"
#include "lexboot/features/phrase_matcher.hpp"
#include "lexboot/resources.hpp"

namespace lexboot {

// --------------------------------------------------------------------------
// Sentiment lexicons
// --------------------------------------------------------------------------

enum class SentimentSource { mpqa, nrc, vader, stanford_proxy };

inline constexpr std::array<SentimentSource, 4> kSentimentSources = {
    SentimentSource::mpqa, SentimentSource::nrc, SentimentSource::vader, SentimentSource::stanford_proxy};

inline std::string_view to_string(SentimentSource s) {
    switch (s) {
        case SentimentSource::mpqa: return "mpqa";
        case SentimentSource::nrc: return "nrc";
        case SentimentSource::vader: return "vader";
        case SentimentSource::stanford_proxy: return "stanford_proxy";
    }
    return "mpqa";
}

inline std::optional<SentimentSource> parse_sentiment_source(std::string_view s) {
    for (auto src : kSentimentSources)
        if (to_string(src) == s) return src;
    return std::nullopt;
}

enum class Polarity { positive, negative };

struct SentimentEntry {
    Polarity polarity = Polarity::positive;
    double strength = 1.0;
};

class SentimentLexicon {
public:
    explicit SentimentLexicon(SentimentSource name) : name_(name) {}

    SentimentSource name() const noexcept { return name_; }
    std::string group_name() const { return "sent_" + std::string(to_string(name_)); }
    std::size_t size() const noexcept { return matcher_.size(); }

    /// Throws InputError if the entry already exists with the other polarity.
    void add(const std::string& phrase, Polarity polarity, double strength = 1.0) {
        if (!(strength >= 0.0 && strength <= 1.0)) throw InputError("sentiment strength must be in [0,1]: " + phrase);
        const auto key = normalize(phrase);
        if (key.empty()) return;
        if (const auto* existing = matcher_.find(key); existing && existing->polarity != polarity)
            throw InputError("sentiment entry '" + key + "' has both polarities");
        matcher_.add(key, SentimentEntry{polarity, strength});
    }

    std::optional<SentimentEntry> lookup(const std::string& phrase) const {
        const auto* e = matcher_.find(normalize(phrase));
        return e ? std::optional<SentimentEntry>(*e) : std::nullopt;
    }

    const PhraseMatcher<SentimentEntry>& matcher() const noexcept { return matcher_; }

private:
    SentimentSource name_;
    PhraseMatcher<SentimentEntry> matcher_;
};

/// `token<TAB>polarity[<TAB>strength]` per line; '#' comment lines and blank lines skipped.
inline SentimentLexicon parse_sentiment_lexicon(SentimentSource name, std::string_view content,
                                                const std::string& origin = "<lexicon>") {
    SentimentLexicon lex(name);
    std::istringstream in{std::string(content)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        const std::string where = origin + ":" + std::to_string(lineno);
        if (fields.size() < 2 || fields.size() > 3) throw InputError(where + ": expected token<TAB>polarity[<TAB>strength]");
        Polarity pol;
        if (fields[1] == "positive") pol = Polarity::positive;
        else if (fields[1] == "negative") pol = Polarity::negative;
        else throw InputError(where + ": polarity must be 'positive' or 'negative'");
        double strength = 1.0;
        if (fields.size() == 3) {
            try {
                std::size_t used = 0;
                strength = std::stod(fields[2], &used);
                if (used != fields[2].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw InputError(where + ": bad strength '" + fields[2] + "'");
            }
        }
        try {
            lex.add(fields[0], pol, strength);
        } catch (const InputError& e) {
            throw InputError(where + ": " + e.what());
        }
    }
    return lex;
}

inline SentimentLexicon load_sentiment_lexicon(SentimentSource name, const std::filesystem::path& path) {
    return parse_sentiment_lexicon(name, read_text_file(path), path.string());
}

inline SentimentLexicon shipped_sentiment_lexicon(SentimentSource name) {
    SentimentLexicon lex(name);
    auto add_all = [&](std::string_view list, Polarity p, double strength) {
        for (const auto& w : parse_word_list(list)) lex.add(w, p, strength);
    };
    switch (name) {
        case SentimentSource::mpqa:
            add_all(shipped::kMpqaStrongPositive, Polarity::positive, 1.0);
            add_all(shipped::kMpqaWeakPositive, Polarity::positive, 0.5);
            add_all(shipped::kMpqaStrongNegative, Polarity::negative, 1.0);
            add_all(shipped::kMpqaWeakNegative, Polarity::negative, 0.5);
            break;
        case SentimentSource::nrc:
            add_all(shipped::kNrcPositive, Polarity::positive, 1.0);
            add_all(shipped::kNrcNegative, Polarity::negative, 1.0);
            break;
        case SentimentSource::vader:
            add_all(shipped::kVaderPositive, Polarity::positive, 0.6);
            add_all(shipped::kVaderNegative, Polarity::negative, 0.6);
            break;
        case SentimentSource::stanford_proxy:
            add_all(shipped::kStanfordProxyPositive, Polarity::positive, 1.0);
            add_all(shipped::kStanfordProxyNegative, Polarity::negative, 1.0);
            break;
    }
    return lex;
}

// --------------------------------------------------------------------------
// Pronoun dictionaries
// --------------------------------------------------------------------------

struct PronounDictionaries {
    std::unordered_set<std::string> first;
    std::unordered_set<std::string> second;
    std::unordered_set<std::string> third;
    std::unordered_set<std::string> demonstrative;
    std::unordered_set<std::string> indefinite;

    static PronounDictionaries shipped() {
        return PronounDictionaries{to_set(parse_word_list(shipped::kFirstPerson)),
                                   to_set(parse_word_list(shipped::kSecondPerson)),
                                   to_set(parse_word_list(shipped::kThirdPerson)),
                                   to_set(parse_word_list(shipped::kDemonstrative)),
                                   to_set(parse_word_list(shipped::kIndefinite))};
    }

    /// Loads `first.txt`, `second.txt`, ... from a directory; missing files fall back to shipped lists.
    static PronounDictionaries load(const std::filesystem::path& dir) {
        auto d = shipped();
        auto maybe = [&](const char* file, std::unordered_set<std::string>& target) {
            const auto p = dir / file;
            if (std::filesystem::exists(p)) target = to_set(load_word_list(p));
        };
        maybe("first.txt", d.first);
        maybe("second.txt", d.second);
        maybe("third.txt", d.third);
        maybe("demonstrative.txt", d.demonstrative);
        maybe("indefinite.txt", d.indefinite);
        return d;
    }
};

// --------------------------------------------------------------------------
// Politeness and request cues
// --------------------------------------------------------------------------

struct PolitenessLexicon {
    PhraseMatcher<int> markers;  ///< +1 polite, -1 impolite
    std::unordered_set<std::string> direct_question_starts;

    static PolitenessLexicon from_lists(const std::vector<std::string>& polite, const std::vector<std::string>& impolite,
                                        const std::vector<std::string>& question_starts) {
        PolitenessLexicon lex;
        for (const auto& p : polite) lex.markers.add(p, +1);
        for (const auto& p : impolite) lex.markers.add(p, -1);
        lex.direct_question_starts = to_set(question_starts);
        return lex;
    }

    static PolitenessLexicon shipped() {
        return from_lists(parse_word_list(shipped::kPolite), parse_word_list(shipped::kImpolite),
                          parse_word_list(shipped::kDirectQuestionStarts));
    }
};

struct RequestRules {
    double please_weight = 0.6;
    double modal_start_weight = 0.5;
    double question_you_weight = 0.4;
    double imperative_start_weight = 0.5;
    std::unordered_set<std::string> please_words;
    std::unordered_set<std::string> modal_starts;
    std::unordered_set<std::string> imperative_verbs;
    std::unordered_set<std::string> second_person;

    static RequestRules shipped() {
        RequestRules r;
        r.please_words = to_set(parse_word_list(shipped::kPleaseWords));
        r.modal_starts = to_set(parse_word_list(shipped::kModalStarts));
        r.imperative_verbs = to_set(parse_word_list(shipped::kImperativeVerbs));
        r.second_person = to_set(parse_word_list(shipped::kSecondPerson));
        return r;
    }
};

}  // namespace lexboot
