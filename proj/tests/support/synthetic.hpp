#pragma once

// Synthetic corpora with known ground truth, shared by the unit tests, the
// CLI tests and the acceptance binary.

#include <string>
#include <utility>
#include <vector>

#include "lexboot/corpus.hpp"
#include "lexboot/random.hpp"

namespace lexboot::testing {

// Filler sentences are drawn from a fixed template set so that every filler
// n-gram is common in the background pool. Sentences are separated by
// punctuation, which n-grams never cross.
inline std::vector<std::string> filler_templates(std::size_t count = 40, std::uint64_t seed = 17) {
    static const std::vector<std::string> words = {
        "coffee", "weekend", "friends", "movie", "dinner", "sunny", "music", "game", "tonight", "happy",
        "birthday", "pizza", "garden", "book", "reading", "cat", "dog", "walk", "park", "lunch",
        "cooking", "song", "party", "morning", "evening", "holiday", "beach", "family", "photo", "dance",
        "tea", "cake", "school", "homework", "shopping", "shoes", "jacket", "rain", "snow", "football",
        "team", "won", "lost", "funny", "video", "love", "new", "phone", "chill", "nap",
        "sleep", "early", "late", "night", "bored", "excited", "soon", "today", "really", "great"};
    Rng rng = make_rng(seed);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) {
        std::string s;
        for (int w = 0; w < 5; ++w) s += (w ? " " : "") + words[bounded(rng, words.size())];
        out.push_back(s);
    }
    return out;
}

struct PlantedCorpus {
    Corpus corpus{"planted"};
    Corpus background{"background"};
    std::vector<std::string> phrases;  ///< the ten planted phrases
    std::vector<std::string> seeds;    ///< the two given initially
};

/// 500 posts. Phrases 0 and 1 are the seeds; each planted post carries one
/// phrase or a linked pair (0,2) (0,3) (1,4) (1,5) (2,6) (3,7) (4,8) (5,9),
/// so the lexicon is reachable from the seeds in three expansion rounds.
/// The remaining posts are filler only. The background pool holds 2000
/// filler-only posts.
inline PlantedCorpus planted_corpus(std::uint64_t seed = 2024) {
    PlantedCorpus out;
    out.phrases = {"fare hike",      "signal failure", "platform crowding", "ticket machine", "bus lane",
                   "rail strike",    "route diversion", "carriage aircon",  "timetable change", "tram depot"};
    out.seeds = {out.phrases[0], out.phrases[1]};
    const std::vector<std::pair<int, int>> links = {{0, 2}, {0, 3}, {1, 4}, {1, 5}, {2, 6}, {3, 7}, {4, 8}, {5, 9}};
    const auto templates = filler_templates();
    Rng rng = make_rng(seed);
    auto filler = [&] { return templates[bounded(rng, templates.size())]; };
    static const char* marks[] = {" . ", " ! ", " , ", " ? "};
    auto mark = [&] { return std::string(marks[bounded(rng, 4)]); };

    std::vector<std::string> texts;
    for (const auto& [a, b] : links)
        for (int i = 0; i < 12; ++i)
            texts.push_back(filler() + mark() + out.phrases[a] + mark() + filler() + mark() + out.phrases[b]);
    for (int p = 0; p < 10; ++p)
        for (int i = 0; i < 8; ++i) texts.push_back(out.phrases[p] + mark() + filler() + mark() + filler());
    while (texts.size() < 500) texts.push_back(filler() + mark() + filler());
    shuffle(texts, rng);
    for (std::size_t i = 0; i < texts.size(); ++i)
        out.corpus.add(Post{"t" + std::to_string(i), texts[i], Source::twitter, std::nullopt, std::nullopt});

    for (int i = 0; i < 2000; ++i)
        out.background.add(Post{"b" + std::to_string(i), filler() + mark() + filler(), Source::twitter, std::nullopt,
                                std::nullopt});
    return out;
}

/// Labelled posts where complaints carry complaint vocabulary and
/// non-complaints carry neutral vocabulary, with shared filler. `noise` is the
/// fraction of labels flipped.
inline Corpus labelled_corpus(std::size_t n, std::uint64_t seed = 3, double noise = 0.0) {
    static const std::vector<std::string> bad = {"late again", "so annoying", "worst service", "why is the bus",
                                                 "terrible delay", "never on time", "broken again", "stuck for ages"};
    static const std::vector<std::string> good = {"thanks for the update", "nice ride", "great driver",
                                                  "see you at the station", "lovely view", "good morning all",
                                                  "arrived early", "enjoying the trip"};
    const auto templates = filler_templates(20, seed + 1);
    Rng rng = make_rng(seed);
    Corpus c("labelled");
    for (std::size_t i = 0; i < n; ++i) {
        const bool complaint = i % 2 == 0;
        const auto& pool = complaint ? bad : good;
        std::string text = templates[bounded(rng, templates.size())] + " . " + pool[bounded(rng, pool.size())];
        if (complaint && bounded(rng, 2) == 0) text += " !";
        bool label = complaint;
        if (uniform01(rng) < noise) label = !label;
        c.add(Post{"l" + std::to_string(i), text, Source::twitter, true, label});
    }
    return c;
}

}  // namespace lexboot::testing
