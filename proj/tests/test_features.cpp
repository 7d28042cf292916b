#include <catch_amalgamated.hpp>

#include <fstream>
#include <limits>
#include <sstream>

#include "lexboot/features.hpp"

using namespace lexboot;
using Catch::Matchers::WithinAbs;

namespace {

TokenizedPost tp(const std::string& text, const std::string& id = "x") {
    return tokenize_post(Post{id, text, Source::twitter, std::nullopt, std::nullopt});
}

Group nonzero(Group g) {
    for (auto it = g.begin(); it != g.end();) it = it->second == 0.0 ? g.erase(it) : std::next(it);
    return g;
}

std::string fixture(const std::string& name) { return std::string(LEXBOOT_FIXTURES) + "/" + name; }

// Straightforward Lloyd's with the same farthest-point start, written
// without reference to the library implementation.
std::vector<std::size_t> oracle_kmeans(const std::vector<std::vector<double>>& pts, std::size_t k, std::uint64_t seed) {
    auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        return s;
    };
    Rng rng = make_rng(seed);
    std::vector<std::vector<double>> centres{pts[bounded(rng, pts.size())]};
    while (centres.size() < k) {
        std::size_t far = 0;
        double far_d = -1;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double m = std::numeric_limits<double>::infinity();
            for (const auto& c : centres) m = std::min(m, dist(pts[i], c));
            if (m > far_d) {
                far_d = m;
                far = i;
            }
        }
        centres.push_back(pts[far]);
    }
    std::vector<std::size_t> assign(pts.size(), k);
    for (int round = 0; round < 100; ++round) {
        std::vector<std::size_t> next(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            std::size_t best = 0;
            for (std::size_t c = 1; c < k; ++c)
                if (dist(pts[i], centres[c]) < dist(pts[i], centres[best])) best = c;
            next[i] = best;
        }
        if (next == assign) break;
        assign = next;
        for (std::size_t c = 0; c < k; ++c) {
            std::vector<double> sum(pts[0].size(), 0.0);
            std::size_t n = 0;
            for (std::size_t i = 0; i < pts.size(); ++i)
                if (assign[i] == c) {
                    ++n;
                    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += pts[i][d];
                }
            if (n)
                for (std::size_t d = 0; d < sum.size(); ++d) centres[c][d] = sum[d] / static_cast<double>(n);
        }
    }
    return assign;
}

}  // namespace

TEST_CASE("bag of words counts") {
    const Vocabulary vocab({"late", "metro"}, 1);
    CHECK(extract_bow(tp("metro metro late"), vocab) == Group{{"metro", 2.0}, {"late", 1.0}});
    CHECK(extract_bow(tp("bus fare"), vocab).empty());

    const std::vector<TokenizedPost> posts = {tp("metro late"), tp("metro fare"), tp("bus fare")};
    const auto fitted = fit_bow_vocabulary(posts);
    CHECK(fitted.terms() == std::vector<std::string>{"bus", "fare", "late", "metro"});
    const std::vector<Group> table = {{{"metro", 1}, {"late", 1}}, {{"metro", 1}, {"fare", 1}}, {{"bus", 1}, {"fare", 1}}};
    for (std::size_t i = 0; i < posts.size(); ++i) CHECK(extract_bow(posts[i], fitted) == table[i]);

    const auto bigrams = fit_bow_vocabulary(posts, 2);
    CHECK(extract_bow(tp("metro late again"), bigrams) == Group{{"metro", 1}, {"late", 1}, {"metro late", 1}});
}

TEST_CASE("pos histogram") {
    const RuleTagger tagger;
    CHECK(extract_pos_counts(tp("!!"), tagger) == Group{{"PUNCT", 1.0}});
    CHECK(extract_pos_counts(tp(""), tagger).empty());
    CHECK(extract_pos_counts(tp("the bus is late"), tagger) ==
          Group{{"DET", .25}, {"NOUN", .25}, {"VERB", .25}, {"ADJ", .25}});
    CHECK(tagger.tag("quickly") == PosTag::ADV);
    CHECK(tagger.tag("12,000") == PosTag::NUM);
    CHECK(tagger.tag("<url>") == PosTag::X);
    CHECK(tagger.tag("and") == PosTag::PRT);
}

TEST_CASE("pos tagger output length equals input length") {
    const RuleTagger tagger;
    Rng rng = make_rng(8);
    const std::vector<std::string> pool = {"the", "bus", "!", "<url>", "12", "running", "é", "😀", "", "ok", "why"};
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<std::string> toks;
        for (std::size_t i = 0; i < bounded(rng, 20); ++i) toks.push_back(pool[bounded(rng, pool.size())]);
        REQUIRE(tagger.tags(toks).size() == toks.size());
    }
}

TEST_CASE("word cluster histogram") {
    const EmbeddingClusterModel model({{"bus", 3}, {"metro", 3}, {"late", 0}, {"slow", 1}}, 5);
    CHECK(extract_w2v_clusters(tp("bus metro"), model) == Group{{"c3", 1.0}});
    CHECK(extract_w2v_clusters(tp("late slow unknown"), model) == Group{{"c0", 0.5}, {"c1", 0.5}});
    CHECK(extract_w2v_clusters(tp("nothing mapped"), model).empty());
    CHECK_THROWS_AS(EmbeddingClusterModel({{"a", 0}}, 1), ConfigError);
    CHECK_THROWS_AS(EmbeddingClusterModel({{"a", 5}}, 5), InputError);
}

TEST_CASE("k-means on the fixture embeddings matches an independent implementation") {
    const auto e = load_embeddings(fixture("embeddings.txt"));
    REQUIRE(e.tokens.size() == 12);
    REQUIRE(e.dim == 3);
    for (std::uint64_t seed : {1u, 7u, 42u}) {
        const auto result = kmeans(e.vectors, 4, seed);
        CHECK(result.assignment == oracle_kmeans(e.vectors, 4, seed));
    }
    const auto model = EmbeddingClusterModel::fit(e, 4, 7);
    CHECK(model.cluster_of("bus") == model.cluster_of("train"));
    CHECK(model.cluster_of("late") == model.cluster_of("slow"));
    CHECK(model.cluster_of("bus") != model.cluster_of("fare"));
    CHECK(model.cluster_of("happy") != model.cluster_of("late"));
    CHECK_THROWS_AS(kmeans(e.vectors, 13, 1), ConfigError);
}

TEST_CASE("k-means agrees with the oracle on random points") {
    Rng rng = make_rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::vector<double>> pts;
        const auto n = 10 + bounded(rng, 40);
        for (std::size_t i = 0; i < n; ++i) pts.push_back({uniform01(rng), uniform01(rng)});
        const auto k = 2 + bounded(rng, 5);
        REQUIRE(kmeans(pts, k, trial).assignment == oracle_kmeans(pts, k, trial));
    }
}

TEST_CASE("embedding file errors") {
    std::istringstream ragged("a 1 2\nb 1\n");
    CHECK_THROWS_AS(parse_embeddings(ragged), InputError);
    std::istringstream bad("a 1 x\n");
    CHECK_THROWS_AS(parse_embeddings(bad), InputError);
}

TEST_CASE("sentiment ratios") {
    const auto lex = parse_sentiment_lexicon(SentimentSource::mpqa,
                                             "# fixture\nlate\tnegative\ngreat\tpositive\t0.5\nnot working\tnegative\n");
    CHECK(lex.size() == 3);
    auto g = extract_sentiment(tp("the metro is late today"), lex);
    CHECK(g == Group{{"pos_ratio", 0.0}, {"neg_ratio", 0.2}, {"polarity", -0.2}});
    g = extract_sentiment(tp("nothing here"), lex);
    CHECK(g == Group{{"pos_ratio", 0.0}, {"neg_ratio", 0.0}, {"polarity", 0.0}});

    // recount: tokens / positive / negative
    struct Row {
        const char* text;
        double tokens, pos, neg;
    };
    const Row rows[] = {{"great ride , lift not working", 6, 1, 1},
                        {"late late late", 3, 0, 3},
                        {"GREAT service !", 3, 1, 0},
                        {"not working and late", 4, 0, 2}};
    for (const auto& r : rows) {
        g = extract_sentiment(tp(r.text), lex);
        CHECK_THAT(g["pos_ratio"], WithinAbs(r.pos / r.tokens, 1e-15));
        CHECK_THAT(g["neg_ratio"], WithinAbs(r.neg / r.tokens, 1e-15));
        CHECK_THAT(g["polarity"], WithinAbs((r.pos - r.neg) / r.tokens, 1e-15));
    }
    CHECK_THROWS_AS(parse_sentiment_lexicon(SentimentSource::nrc, "a\tpositive\na\tnegative\n"), InputError);
    CHECK_THROWS_AS(parse_sentiment_lexicon(SentimentSource::nrc, "a\tmaybe\n"), InputError);
    CHECK(shipped_sentiment_lexicon(SentimentSource::vader).size() > 0);
}

TEST_CASE("meta counts") {
    auto g = extract_meta(tp("#delhi @DMRC http://t.co/x !!"));
    CHECK(g["hashtags"] == 1);
    CHECK(g["mentions"] == 1);
    CHECK(g["urls"] == 1);
    CHECK(g["exclamations"] == 2);
    CHECK(g["question_marks"] == 0);
    CHECK(g["other_special_symbols"] == 0);
    CHECK(nonzero(extract_meta(tp("a plain sentence"))).empty());

    g = extract_meta(tp("Sure, the night bus returns ???, but the new route is slow, honestly, "
                        "it's worse !!!"));
    CHECK(g["question_marks"] == 3);
    CHECK(g["exclamations"] == 3);
    CHECK(g["urls"] == 0);
    CHECK(g["hashtags"] == 0);
    CHECK(g["mentions"] == 0);
    CHECK(g["other_special_symbols"] == 5);  // four commas and an apostrophe
}

TEST_CASE("request rules") {
    CHECK(extract_request(tp("Please fix the AC"))["score"] > 0.0);
    CHECK(extract_request(tp("The AC is broken."))["score"] == 0.0);

    std::ifstream in(fixture("requests.tsv"));
    REQUIRE(in);
    std::string line;
    int total = 0, correct = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const bool label = line[0] == '1';
        const auto score = extract_request(tp(line.substr(2)))["score"];
        REQUIRE(score >= 0.0);
        REQUIRE(score <= 1.0);
        correct += (score >= 0.5) == label;
        ++total;
    }
    REQUIRE(total == 20);
    CHECK(correct >= 16);
}

TEST_CASE("intensifiers") {
    CHECK(extract_intensifiers(tp("WHY is metro SO late???")) ==
          Group{{"cap_words", 2}, {"all_caps_words", 2}, {"repeated_symbol_runs", 1}});
    CHECK(extract_intensifiers(tp("ok")) == Group{{"cap_words", 0}, {"all_caps_words", 0}, {"repeated_symbol_runs", 0}});
    CHECK(extract_intensifiers(tp("Bad!! Really bad??")) ==
          Group{{"cap_words", 2}, {"all_caps_words", 0}, {"repeated_symbol_runs", 2}});
    CHECK(extract_intensifiers(tp("@DMRC #DELHI http://X.co A"))["cap_words"] == 0);
}

TEST_CASE("politeness") {
    CHECK(extract_politeness(tp("thank you so much"))["score"] > 0.0);
    CHECK(extract_politeness(tp("the train left"))["score"] == 0.0);
    CHECK(extract_politeness(tp(""))["score"] == 0.0);
    // planted markers: (polite - impolite) / tokens
    CHECK(extract_politeness(tp("hello , please send help"))["score"] == 2.0 / 5.0);
    CHECK(extract_politeness(tp("why is it late . damn"))["score"] == -2.0 / 6.0);
    CHECK(extract_politeness(tp("thank you sir"))["score"] == 2.0 / 3.0);
    CHECK(extract_politeness(tp("useless"))["score"] == -1.0);
}

TEST_CASE("pronoun counts") {
    const auto d = PronounDictionaries::shipped();
    CHECK(extract_pronouns(tp("i told you"), d) ==
          Group{{"first", 1}, {"second", 1}, {"third", 0}, {"demonstrative", 0}, {"indefinite", 0}});
    CHECK(nonzero(extract_pronouns(tp("metro late"), d)).empty());
    CHECK(extract_pronouns(tp("this is what they do to everybody"), d) ==
          Group{{"first", 0}, {"second", 0}, {"third", 1}, {"demonstrative", 1}, {"indefinite", 1}});
    // no shipped overlap between the five sets
    const std::unordered_set<std::string>* sets[] = {&d.first, &d.second, &d.third, &d.demonstrative, &d.indefinite};
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b)
            for (const auto& w : *sets[a]) CHECK(sets[b]->count(w) == 0);
}

TEST_CASE("extract_all is the union of the individual extractors") {
    const std::vector<TokenizedPost> posts = {tp("Why is the metro SO late again ??? @DMRC #fail", "a"),
                                              tp("Please fix the AC , thank you", "b"), tp("lovely ride home", "c"),
                                              tp("the metro ride home is late , fix the AC", "d")};
    FeaturizerOptions options;
    options.clusters = 3;
    std::vector<std::string> notes;
    const auto r = fit_resources(posts, options, &notes);
    for (const auto& post : posts) {
        const auto all = extract_all(post, r, FeatureConfig::all());
        CHECK(all.groups.size() == 12);
        CHECK(all.groups.at("bow") == extract_bow(post, r.bow_vocabulary));
        CHECK(all.groups.at("pos") == extract_pos_counts(post, *r.tagger));
        CHECK(all.groups.at("w2v") == extract_w2v_clusters(post, *r.clusters));
        CHECK(all.groups.at("meta") == extract_meta(post));
        CHECK(all.groups.at("request") == extract_request(post, r.request));
        CHECK(all.groups.at("intensify") == extract_intensifiers(post));
        CHECK(all.groups.at("polite") == extract_politeness(post, r.politeness));
        CHECK(all.groups.at("pronoun") == extract_pronouns(post, r.pronouns));
        for (const auto& [src, lex] : r.sentiment) CHECK(all.groups.at(lex.group_name()) == extract_sentiment(post, lex));

        const auto only = extract_all(post, r, FeatureConfig::parse("bow"));
        CHECK(only.groups.size() == 1);
        CHECK(extract_all(post, r, FeatureConfig::all()) == all);
    }
    CHECK_THROWS_AS(FeatureConfig::parse("bow,nope"), ConfigError);
    CHECK_THROWS_AS(FeatureConfig::parse(""), ConfigError);
    CHECK(FeatureConfig::parse("all").groups.size() == 12);
}

TEST_CASE("feature ranges hold on random posts") {
    Rng rng = make_rng(31);
    const std::vector<std::string> words = {"Please", "fix", "WHY", "late", "!!", "??", "@bus", "#x", "http://a.b",
                                            "thank", "you", "damn", "great", "terrible", "they", "this", ".", "😀"};
    std::vector<TokenizedPost> posts;
    for (int i = 0; i < 200; ++i) {
        std::string text;
        for (std::size_t k = 0; k < bounded(rng, 12); ++k) text += words[bounded(rng, words.size())] + " ";
        posts.push_back(tp(text, "p" + std::to_string(i)));
    }
    FeaturizerOptions options;
    options.clusters = 4;
    const auto r = fit_resources(posts, options);
    for (const auto& post : posts) {
        const auto fv = extract_all(post, r, FeatureConfig::all());
        for (const auto& [g, values] : fv.groups) {
            for (const auto& [k, v] : values) {
                INFO(g << "/" << k << " = " << v << " for '" << post.raw_text << "'");
                if (k == "polarity" || g == "polite") {
                    REQUIRE(v >= -1.0);
                    REQUIRE(v <= 1.0);
                } else if (g == "pos" || g == "w2v" || g == "request" || k == "pos_ratio" || k == "neg_ratio") {
                    REQUIRE(v >= 0.0);
                    REQUIRE(v <= 1.0);
                } else {
                    REQUIRE(v >= 0.0);
                    REQUIRE(v == std::floor(v));
                }
            }
        }
    }
}

TEST_CASE("featurizer round trip and cluster clamping") {
    const std::vector<TokenizedPost> posts = {tp("bus late bus late"), tp("metro slow metro slow")};
    FeaturizerOptions options;
    options.clusters = 50;
    std::vector<std::string> notes;
    const auto r = fit_resources(posts, options, &notes);
    REQUIRE(notes.size() == 1);
    CHECK(r.clusters->k() == r.clusters->size());

    const auto j = featurizer_to_json(r, options.config);
    const auto [back, config] = featurizer_from_json(nlohmann::json::parse(j.dump()));
    CHECK(config.groups == options.config.groups);
    for (const auto& p : posts) CHECK(extract_all(p, back, config) == extract_all(p, r, options.config));
    CHECK(featurizer_to_json(back, config).dump() == j.dump());

    auto broken = nlohmann::json::parse(j.dump());
    broken["groups"].push_back("nope");
    CHECK_THROWS_AS(featurizer_from_json(broken), InputError);
}

TEST_CASE("feature vector json") {
    FeatureVector fv;
    fv.post_id = "p";
    fv.set_group("meta", {{"urls", 1}});
    CHECK(feature_vector_from_json(to_json(fv)) == fv);
    CHECK(fv.flatten() == std::map<std::string, double>{{"meta/urls", 1.0}});
    CHECK_THROWS_AS(fv.set_group("x", {{"a", std::nan("")}}), InputError);
}
