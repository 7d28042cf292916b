#include <catch_amalgamated.hpp>

#include <random>
#include <set>
#include <sstream>

#include "lexboot/annotation.hpp"

using namespace lexboot;

namespace {

std::vector<Decision> labelled(const std::string& annotator, const std::vector<std::string>& labels) {
    std::vector<Decision> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        out.push_back(Decision{"t" + std::to_string(i), annotator, labels[i], "2024-01-01T00:00:00Z"});
    return out;
}

std::vector<std::string> random_labels(std::size_t n, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(bounded(rng, 2) ? "complaint" : "non_complaint");
    return out;
}

// Partial Fisher-Yates over [0, population) with an mt19937_64 stream and
// rejection sampling.
std::vector<std::size_t> reference_sample(std::size_t population, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<std::size_t> pool(population);
    for (std::size_t i = 0; i < population; ++i) pool[i] = i;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t range = population - i;
        const std::uint64_t cutoff = std::numeric_limits<std::uint64_t>::max() -
                                     std::numeric_limits<std::uint64_t>::max() % range;
        std::uint64_t draw;
        do draw = gen();
        while (draw >= cutoff);
        std::swap(pool[i], pool[i + draw % range]);
    }
    pool.resize(n);
    return pool;
}

Corpus corpus_of(std::size_t n) {
    Corpus c("c");
    for (std::size_t i = 0; i < n; ++i)
        c.add(Post{"p" + std::to_string(i), "text " + std::to_string(i), Source::twitter, std::nullopt, std::nullopt});
    return c;
}

}  // namespace

TEST_CASE("kappa exact cases") {
    const std::vector<std::string> mixed = {"complaint", "non_complaint", "complaint", "non_complaint", "complaint"};
    const auto perfect = kappa(labelled("a", mixed), labelled("b", mixed));
    CHECK(perfect.kappa == 1.0);
    CHECK(perfect.observed_agreement == 1.0);
    CHECK(perfect.n_items == 5);

    std::vector<std::string> a, b;
    auto add = [&](const char* x, const char* y, int count) {
        for (int i = 0; i < count; ++i) {
            a.push_back(x);
            b.push_back(y);
        }
    };
    add("complaint", "complaint", 40);
    add("non_complaint", "non_complaint", 40);
    add("complaint", "non_complaint", 10);
    add("non_complaint", "complaint", 10);
    const auto r = kappa(labelled("a", a), labelled("b", b));
    CHECK(r.observed_agreement == 0.8);
    CHECK(r.expected_agreement == 0.5);
    CHECK(r.kappa == 0.6);

    const std::vector<std::string> same(4, "complaint");
    CHECK(kappa(labelled("a", same), labelled("b", same)).kappa == 1.0);
}

TEST_CASE("kappa of independent random labels is near zero") {
    const auto r = kappa(labelled("a", random_labels(1000, 101)), labelled("b", random_labels(1000, 202)));
    CHECK(std::abs(r.kappa) < 0.05);
    CHECK(r.n_items == 1000);
}

TEST_CASE("kappa is symmetric and invariant to label permutation") {
    Rng rng = make_rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + bounded(rng, 30);
        std::vector<std::string> a, b;
        const std::vector<std::string> names = {"keep", "drop", "maybe"};
        for (std::size_t i = 0; i < n; ++i) {
            a.push_back(names[bounded(rng, 3)]);
            b.push_back(uniform01(rng) < 0.6 ? a.back() : names[bounded(rng, 3)]);
        }
        const auto ab = kappa(labelled("a", a), labelled("b", b));
        const auto ba = kappa(labelled("b", b), labelled("a", a));
        REQUIRE(ab.kappa == ba.kappa);
        REQUIRE(ab.kappa >= -1.0);
        REQUIRE(ab.kappa <= 1.0);
        auto permute = [](std::vector<std::string> v) {
            for (auto& s : v) s = s == "keep" ? "drop" : s == "drop" ? "maybe" : "keep";
            return v;
        };
        REQUIRE(kappa(labelled("a", permute(a)), labelled("b", permute(b))).kappa == ab.kappa);
        if (ab.expected_agreement < 1.0) REQUIRE((ab.kappa == 1.0) == (ab.observed_agreement == 1.0));
    }
}

TEST_CASE("kappa uses only jointly decided tasks") {
    auto a = labelled("a", {"keep", "drop", "keep"});
    auto b = labelled("b", {"keep", "drop"});
    CHECK(kappa(a, b).n_items == 2);
    CHECK_THROWS_AS(kappa(a, {}), InputError);
}

TEST_CASE("record is an upsert per task and annotator") {
    AnnotationStore store;
    store.add_task(Task{"complaint:p1", TaskKind::complaint, "p1", 2});
    CHECK_THROWS_AS(store.add_task(Task{"complaint:p1", TaskKind::complaint, "p1", 2}), StateError);

    CHECK(store.record(Decision{"complaint:p1", "ann1", "complaint", ""}) == RecordOutcome::inserted);
    CHECK(store.progress("complaint:p1") == 1);
    CHECK_FALSE(store.complete("complaint:p1"));
    CHECK_FALSE(store.decisions_for("complaint:p1")[0].decided_at.empty());

    const auto before = store.decisions_for("complaint:p1");
    CHECK(store.record(Decision{"complaint:p1", "ann1", "complaint", "later"}) == RecordOutcome::unchanged);
    CHECK(store.decisions_for("complaint:p1") == before);
    CHECK(store.record(Decision{"complaint:p1", "ann1", "non_complaint", ""}) == RecordOutcome::updated);
    CHECK(store.decisions_for("complaint:p1")[0].label == "non_complaint");

    CHECK(store.record(Decision{"complaint:p1", "ann2", "complaint", ""}) == RecordOutcome::inserted);
    CHECK(store.complete("complaint:p1"));

    CHECK_THROWS_AS(store.record(Decision{"nope", "ann1", "complaint", ""}), NotFoundError);
    CHECK_THROWS_AS(store.record(Decision{"complaint:p1", "ann1", "keep", ""}), InputError);
    CHECK_THROWS_AS(store.record(Decision{"complaint:p1", "", "complaint", ""}), InputError);
}

TEST_CASE("next task skips completed and already-decided tasks") {
    AnnotationStore store;
    store.add_task(Task{"a", TaskKind::complaint, "p1", 1});
    store.add_task(Task{"b", TaskKind::informativeness, "p2", 2});
    store.add_task(Task{"c", TaskKind::complaint, "p3", 2});
    CHECK(store.next_task("x")->task_id == "a");
    store.record(Decision{"a", "y", "complaint", ""});
    CHECK(store.next_task("x")->task_id == "b");
    CHECK(store.next_task("x", TaskKind::complaint)->task_id == "c");
    store.record(Decision{"b", "x", "informative", ""});
    store.record(Decision{"c", "x", "complaint", ""});
    CHECK(store.next_task("x") == nullptr);
    CHECK(store.next_task("z")->task_id == "b");
    CHECK(store.decisions_by("x").size() == 2);
}

TEST_CASE("resolve rules") {
    const Task t{"t", TaskKind::complaint, "p", 2};
    auto d = [](const char* who, const char* label) { return Decision{"t", who, label, ""}; };
    CHECK(resolve(t, {d("a", "complaint"), d("b", "complaint")}) == "complaint");
    CHECK_FALSE(resolve(t, {d("a", "complaint"), d("b", "non_complaint")}).has_value());
    CHECK(resolve(t, {d("a", "complaint"), d("b", "non_complaint"), d("c", "complaint")}, ResolveRule::tiebreak) ==
          "complaint");
    CHECK_FALSE(resolve(t, {d("a", "complaint"), d("b", "non_complaint")}, ResolveRule::tiebreak).has_value());
    CHECK_THROWS_AS(resolve(t, {d("a", "complaint")}), StateError);
    CHECK(parse_resolve_rule("tiebreak") == ResolveRule::tiebreak);
    CHECK_FALSE(parse_resolve_rule("vote").has_value());
}

TEST_CASE("resolve never invents a label") {
    Rng rng = make_rng(9);
    const std::vector<std::string> labels = {"complaint", "non_complaint"};
    for (int trial = 0; trial < 500; ++trial) {
        const Task t{"t", TaskKind::complaint, "p", static_cast<int>(1 + bounded(rng, 3))};
        std::vector<Decision> ds;
        for (std::size_t i = 0; i < static_cast<std::size_t>(t.required_annotators) + bounded(rng, 2); ++i)
            ds.push_back(Decision{"t", "a" + std::to_string(i), labels[bounded(rng, 2)], ""});
        for (auto rule : {ResolveRule::discard, ResolveRule::tiebreak}) {
            const auto out = resolve(t, ds, rule);
            if (out)
                REQUIRE(std::any_of(ds.begin(), ds.end(), [&](const Decision& x) { return x.label == *out; }));
        }
    }
}

TEST_CASE("sample_tasks matches a reference sampler") {
    const auto big = corpus_of(21800);
    const auto tasks = sample_tasks(big, TaskKind::informativeness, 1500, 13);
    const auto ref = reference_sample(21800, 1500, 13);
    REQUIRE(tasks.size() == 1500);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        REQUIRE(tasks[i].subject == big[ref[i]].id);
        REQUIRE(tasks[i].task_id == "informativeness:" + big[ref[i]].id);
    }
    CHECK(tasks == sample_tasks(big, TaskKind::informativeness, 1500, 13));

    const auto small = corpus_of(25);
    auto all = sample_tasks(small, TaskKind::complaint, 25, 1);
    std::set<std::string> ids;
    for (const auto& t : all) ids.insert(t.subject);
    CHECK(ids.size() == 25);
    CHECK_THROWS_AS(sample_tasks(small, TaskKind::complaint, 26, 1), ConfigError);
}

TEST_CASE("decisions round-trip through jsonl") {
    const std::vector<Decision> ds = {{"complaint:p1", "ann1", "complaint", "2024-05-01T10:00:00Z"},
                                      {"complaint:p2", "ann2", "non_complaint", "2024-05-01T10:01:00Z"}};
    std::stringstream buf;
    export_decisions(buf, ds);
    CHECK(buf.str().substr(0, buf.str().find('\n')) ==
          R"({"task_id":"complaint:p1","annotator_id":"ann1","label":"complaint","decided_at":"2024-05-01T10:00:00Z"})");
    CHECK(import_decisions(buf) == ds);
    std::istringstream bad("{\"task_id\":\"x\"}\n");
    CHECK_THROWS_AS(import_decisions(bad), InputError);
}

TEST_CASE("task json and labels") {
    const Task t{"phrase_review:fare hike", TaskKind::phrase_review, "fare hike", 1};
    CHECK(task_from_json(to_json(t)) == t);
    CHECK(is_legal_label(TaskKind::phrase_review, "keep"));
    CHECK_FALSE(is_legal_label(TaskKind::phrase_review, "complaint"));
    CHECK(utc_timestamp(std::chrono::system_clock::time_point{}) == "1970-01-01T00:00:00Z");
}
