#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lexboot/corpus.hpp"
#include "lexboot/random.hpp"
#include "lexboot/utf8.hpp"

using namespace lexboot;

namespace {

std::string random_text(Rng& rng, std::size_t len) {
    // Mix of ASCII, markup characters, Latin-1, Greek, Cyrillic, fullwidth,
    // CJK punctuation, emoji and controls.
    static const std::u32string pool =
        U"abcXYZ019 _-#@<>/:.!?,'\"()\t\nhttps://www.éÉßÀøΣσςДжＡｂ。、！？😀🚇 ’​\x01";
    std::u32string s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(pool[bounded(rng, pool.size())]);
    // occasionally splice in literal markers that the normalizer treats specially
    static const char32_t* chunks[] = {U"<url>", U"<user>", U"http://x.co/a", U"@bob", U"#tag", U"www.a.b"};
    if (bounded(rng, 3) == 0) s.insert(bounded(rng, s.size() + 1), chunks[bounded(rng, 6)]);
    return utf8::encode(s);
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    auto dir = std::filesystem::temp_directory_path() / "lexboot_test_corpus";
    std::filesystem::create_directories(dir);
    auto p = dir / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
}

}  // namespace

TEST_CASE("utf8 decode replaces invalid sequences") {
    const std::string bad = "a\xff" "b\xc3";
    const auto cps = utf8::decode(bad);
    REQUIRE(cps.size() == 4);
    CHECK(cps[0] == U'a');
    CHECK(cps[1] == 0xFFFD);
    CHECK(cps[2] == U'b');
    CHECK(cps[3] == 0xFFFD);
    CHECK(utf8::is_valid(utf8::encode(cps)));
}

TEST_CASE("case folding covers accented and non-Latin letters") {
    CHECK(normalize("ÉCOLE Straße ΣΟΦΙΑ ДОМ ＡＢＣ") == "école straße σοφια дом ａｂｃ");
    CHECK(normalize("λόγος") == normalize("ΛΌΓΟΣ"));
}

TEST_CASE("normalize replaces urls, mentions and hashtags") {
    CHECK(normalize("Bus LATE again!! http://t.co/xyz @MetroRail #delay") == "bus late again ! ! <url> <user> delay");
    CHECK(normalize("see www.example.com/page, ok") == "see <url> ok");
    CHECK(normalize("mail me: a@b") == "mail me : a @ b");
    CHECK(normalize("  spaced\t\tout \n text ") == "spaced out text");
    CHECK(normalize("") == "");
}

TEST_CASE("normalize splits every punctuation character") {
    CHECK(normalize("why???") == "why ? ? ?");
    CHECK(normalize("don't") == "don ' t");
    CHECK(normalize("(metro)") == "( metro )");
    CHECK(normalize("train。late！") == "train 。 late ！");
}

TEST_CASE("normalize is idempotent on random unicode") {
    Rng rng = make_rng(20240611);
    for (int trial = 0; trial < 3000; ++trial) {
        const auto text = random_text(rng, bounded(rng, 40));
        const auto once = normalize(text);
        INFO("input: " << text);
        REQUIRE(normalize(once) == once);
        REQUIRE(utf8::is_valid(once));
        REQUIRE(once.find("  ") == std::string::npos);
        if (!once.empty()) {
            REQUIRE(once.front() != ' ');
            REQUIRE(once.back() != ' ');
        }
    }
}

TEST_CASE("ngrams never span punctuation or placeholders") {
    const auto toks = tokenize(normalize("fare hike , again <url> metro late today"));
    CHECK(ngrams(toks, 1) == std::vector<std::string>{"fare", "hike", "again", "metro", "late", "today"});
    CHECK(ngrams(toks, 2) == std::vector<std::string>{"fare hike", "metro late", "late today"});
    CHECK(ngrams(toks, 3) == std::vector<std::string>{"metro late today"});
    CHECK(ngrams(toks, 4).empty());
    CHECK_THROWS_AS(ngrams(toks, 0), ConfigError);
    CHECK_THROWS_AS(check_pipeline_order(4), ConfigError);
}

TEST_CASE("ngram counts match the run-length formula") {
    Rng rng = make_rng(5);
    const std::vector<std::string> vocab = {"a", "b", "c", ",", "<url>", "d"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> toks;
        const auto len = bounded(rng, 15);
        for (std::size_t i = 0; i < len; ++i) toks.push_back(vocab[bounded(rng, vocab.size())]);
        for (int n = 1; n <= 3; ++n) {
            std::size_t expected = 0, run = 0;
            for (const auto& t : toks) {
                if (is_excluded(t)) {
                    expected += run >= static_cast<std::size_t>(n) ? run - n + 1 : 0;
                    run = 0;
                } else {
                    ++run;
                }
            }
            expected += run >= static_cast<std::size_t>(n) ? run - n + 1 : 0;
            REQUIRE(ngrams(toks, n).size() == expected);
        }
    }
}

TEST_CASE("contains_phrase matches whole tokens") {
    const auto toks = tokenize(normalize("the fare hiked, fare hike news"));
    CHECK(contains_phrase(toks, tokenize("fare hike")));
    CHECK_FALSE(contains_phrase(toks, tokenize("hike news fare")));
    CHECK_FALSE(contains_phrase(tokenize("farehike"), tokenize("fare")));
}

TEST_CASE("corpus rejects duplicate ids and blank text") {
    Corpus c("t");
    c.add(Post{"1", "bus late", Source::twitter, {}, {}});
    CHECK_THROWS_AS(c.add(Post{"1", "again", Source::twitter, {}, {}}), InputError);
    CHECK_THROWS_AS(c.add(Post{"2", "   ", Source::twitter, {}, {}}), InputError);
    CHECK_THROWS_AS(c.add(Post{"", "x", Source::twitter, {}, {}}), InputError);
    CHECK(c.size() == 1);
    REQUIRE(c.find("1") != nullptr);
    CHECK(c.find("1")->text == "bus late");
}

TEST_CASE("jsonl ingest reads labels and reports line numbers") {
    std::istringstream in(
        "{\"id\":\"a\",\"text\":\"metro late\",\"informative\":true,\"complaint\":false,\"extra\":1}\n"
        "\n"
        "{\"id\":\"b\",\"text\":\"nice day\",\"source\":\"twitter\"}\n");
    const auto c = parse_jsonl(in, "t");
    REQUIRE(c.size() == 2);
    CHECK(c[0].informative == true);
    CHECK(c[0].complaint == false);
    CHECK_FALSE(c[1].informative.has_value());

    std::istringstream dup("{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n");
    try {
        parse_jsonl(dup, "t", "dup.jsonl");
        FAIL("expected InputError");
    } catch (const InputError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("dup.jsonl") != std::string::npos);
        CHECK(msg.find("lines 1 and 2") != std::string::npos);
    }

    std::istringstream broken("{\"id\":\"a\",\"text\":\"x\"}\n{oops\n");
    try {
        parse_jsonl(broken, "t", "b.jsonl");
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("b.jsonl:2") != std::string::npos);
    }

    std::istringstream empty("");
    CHECK_THROWS_AS(parse_jsonl(empty, "t"), InputError);
}

TEST_CASE("csv ingest handles quoting and label spellings") {
    std::istringstream in(
        "text,id,complaint\n"
        "\"bus, late\",p1,1\n"
        "\"said \"\"hi\"\"\nnewline\",p2,false\n"
        "plain,p3,\n");
    const auto c = parse_csv(in, "t");
    REQUIRE(c.size() == 3);
    CHECK(c[0].text == "bus, late");
    CHECK(c[0].complaint == true);
    CHECK(c[1].text == "said \"hi\"\nnewline");
    CHECK(c[1].complaint == false);
    CHECK_FALSE(c[2].complaint.has_value());

    std::istringstream bad("id,text,complaint\nx,y,maybe\n");
    CHECK_THROWS_AS(parse_csv(bad, "t"), InputError);
    std::istringstream missing("id,body\nx,y\n");
    CHECK_THROWS_AS(parse_csv(missing, "t"), InputError);
}

TEST_CASE("export round-trips through both formats") {
    Corpus c("t");
    c.add(Post{"1", "line \"one\", with comma", Source::twitter, true, false});
    c.add(Post{"2", "ünïcode 🚇", Source::twitter, std::nullopt, true});
    for (auto fmt : {Format::jsonl, Format::csv}) {
        const auto path = temp_file(fmt == Format::jsonl ? "rt.jsonl" : "rt.csv", "");
        export_corpus(path, c, fmt);
        const auto back = ingest(path);
        REQUIRE(back.size() == c.size());
        for (std::size_t i = 0; i < c.size(); ++i) CHECK(back[i] == c[i]);
    }
    CHECK_THROWS_AS(ingest(std::filesystem::temp_directory_path() / "lexboot_missing.jsonl"), InputError);
}

TEST_CASE("label counts") {
    Corpus c("t");
    c.add(Post{"1", "a", Source::twitter, true, true});
    c.add(Post{"2", "b", Source::twitter, false, false});
    c.add(Post{"3", "c", Source::twitter, true, std::nullopt});
    const auto n = count_labels(c);
    CHECK(n.informative == 2);
    CHECK(n.non_informative == 1);
    CHECK(n.complaint == 1);
    CHECK(n.non_complaint == 1);
}

TEST_CASE("seeded helpers are deterministic") {
    CHECK(sample_indices(100, 10, 3) == sample_indices(100, 10, 3));
    CHECK(sample_indices(100, 10, 3) != sample_indices(100, 10, 4));
    auto all = sample_indices(50, 50, 9);
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
    Rng rng = make_rng(1);
    for (int i = 0; i < 1000; ++i) REQUIRE(bounded(rng, 7) < 7);
}
