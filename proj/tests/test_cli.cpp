#include <catch_amalgamated.hpp>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>

#include "lexboot/lexboot.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;
using namespace lexboot;
using nlohmann::json;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(line);
    return out;
}

std::string quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

class Workspace {
public:
    Workspace() {
        static int counter = 0;
        dir_ = fs::temp_directory_path() /
               ("lexboot-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~Workspace() { fs::remove_all(dir_); }

    fs::path path(const std::string& name) const { return dir_ / name; }

    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name), std::ios::binary) << text;
        return path(name).string();
    }

    std::string write(const std::string& name, const Corpus& corpus) const {
        std::ofstream out(path(name), std::ios::binary);
        write_jsonl(out, corpus);
        return path(name).string();
    }

    Outcome run(const std::string& args, const std::string& stdin_path = "/dev/null") const {
        const auto out = path("stdout.txt"), err = path("stderr.txt");
        const std::string cmd = quote(LEXBOOT_CLI) + " " + args + " <" + quote(stdin_path) + " >" +
                                quote(out.string()) + " 2>" + quote(err.string());
        const int status = std::system(cmd.c_str());
        Outcome o;
        o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        o.out = slurp(out);
        o.err = slurp(err);
        return o;
    }

private:
    fs::path dir_;
};

struct PlantedFiles {
    std::string corpus, background, seeds;
};

PlantedFiles write_planted(const Workspace& ws) {
    const auto p = testing::planted_corpus();
    return {ws.write("planted.jsonl", p.corpus), ws.write("background.jsonl", p.background),
            ws.write("seeds.txt", p.seeds[0] + "\n" + p.seeds[1] + "\n")};
}

}  // namespace

TEST_CASE("bootstrap in auto mode reaches a fixed point") {
    Workspace ws;
    const auto f = write_planted(ws);
    const auto before = slurp(f.corpus) + slurp(f.background) + slurp(f.seeds);
    const auto r = ws.run("bootstrap --input " + f.corpus + " --background " + f.background + " --seeds " + f.seeds +
                          " --mode auto --max-iter 10 --output " + ws.path("boot").string());
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("stop_reason fixed_point") != std::string::npos);

    const auto log = lines_of(slurp(ws.path("boot/run_log.jsonl")));
    REQUIRE_FALSE(log.empty());
    CHECK(json::parse(log.back())["stop_reason"] == "fixed_point");
    CHECK(log.size() <= 5);
    std::size_t last = 0;
    for (const auto& line : log) {
        const std::size_t m = json::parse(line)["matched_post_count"];
        CHECK(m >= last);
        last = m;
    }

    std::ifstream lex_in(ws.path("boot/lexicon.jsonl"));
    const auto lexicon = read_lexicon(lex_in);
    std::size_t recovered = 0;
    for (const auto& p : testing::planted_corpus().phrases) {
        const auto* s = lexicon.find(p);
        recovered += s && s->status == PhraseStatus::approved;
    }
    CHECK(recovered >= 9);
    CHECK(lines_of(slurp(ws.path("boot/relevant.jsonl"))).size() == last);

    CHECK(slurp(f.corpus) + slurp(f.background) + slurp(f.seeds) == before);

    const auto again = ws.run("bootstrap --input " + f.corpus + " --background " + f.background + " --seeds " +
                              f.seeds + " --mode auto --max-iter 10 --output " + ws.path("boot2").string());
    REQUIRE(again.code == 0);
    for (const char* file : {"lexicon.jsonl", "relevant.jsonl", "run_log.jsonl"})
        CHECK(slurp(ws.path("boot") / file) == slurp(ws.path("boot2") / file));
}

TEST_CASE("interactive bootstrap reads decisions from stdin") {
    Workspace ws;
    const auto f = write_planted(ws);
    std::string answers;
    for (int i = 0; i < 200; ++i) answers += "y\n";
    const auto yes = ws.write("answers.txt", answers);
    const auto r = ws.run("bootstrap --input " + f.corpus + " --background " + f.background + " --seeds " + f.seeds +
                              " --mode interactive --output " + ws.path("boot").string(),
                          yes);
    INFO(r.err);
    CHECK(r.code == 0);
    CHECK(r.err.find("candidate phrases") != std::string::npos);

    // Review input that ends early is a runtime failure, not a validation error.
    const auto closed = ws.run("bootstrap --input " + f.corpus + " --background " + f.background + " --seeds " +
                               f.seeds + " --mode interactive --output " + ws.path("boot3").string());
    CHECK(closed.code == 2);
    CHECK(closed.err.find("input closed") != std::string::npos);
}

TEST_CASE("crossval is byte-identical across reruns") {
    Workspace ws;
    const auto input = ws.write("labelled.jsonl", testing::labelled_corpus(200, 3, 0.1));
    const auto before = slurp(input);
    auto cv = [&](const std::string& out) {
        return ws.run("crossval --input " + input + " --groups bow --k 10 --seed 7 --output " + ws.path(out).string() +
                      " --table " + ws.path(out + ".txt").string());
    };
    const auto a = cv("a.json"), b = cv("b.json");
    INFO(a.err);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);
    CHECK(slurp(ws.path("a.json")) == slurp(ws.path("b.json")));
    CHECK(slurp(ws.path("a.json.txt")) == slurp(ws.path("b.json.txt")));
    CHECK(slurp(input) == before);

    const auto report = json::parse(slurp(ws.path("a.json")));
    CHECK(report["group"] == "bow");
    CHECK(report["per_fold"].size() == 10);
    CHECK(a.out.rfind("10-fold accuracy", 0) == 0);
}

TEST_CASE("report renders one row per group") {
    Workspace ws;
    const auto input = ws.write("labelled.jsonl", testing::labelled_corpus(120, 5, 0.1));
    std::string files;
    for (const auto& g : all_groups()) {
        const auto out = ws.path(g + ".json").string();
        const auto r = ws.run("crossval --input " + input + " --groups " + g + " --k 5 --clusters 4 --output " + out);
        INFO(g << ": " << r.err);
        REQUIRE(r.code == 0);
        files = " " + out + files;  // reversed on purpose; report orders rows itself
    }
    const auto r = ws.run("report" + files + " --output " + ws.path("table.txt").string());
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(slurp(ws.path("table.txt")) == r.out);

    const auto rows = lines_of(r.out);
    std::vector<std::string> labels;
    for (const auto& line : rows)
        if (line.find("+/-") != std::string::npos) labels.push_back(line);
    REQUIRE(labels.size() == all_groups().size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        CHECK(labels[i].find(std::string(group_label(all_groups()[i]))) != std::string::npos);
    CHECK(labels.front().find("Bag-of-Words") != std::string::npos);
    CHECK(labels.back().find("Pronoun Variations") != std::string::npos);
    CHECK(r.out.find("Sentiment Markers") != std::string::npos);
}

TEST_CASE("featurize, train and classify") {
    Workspace ws;
    const auto input = ws.write("labelled.jsonl", testing::labelled_corpus(160, 11));
    const auto feats = ws.path("features.jsonl").string(), fz = ws.path("featurizer.json").string();
    auto r = ws.run("featurize --input " + input + " --groups bow,meta,pronoun --output " + feats +
                    " --featurizer " + fz);
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(lines_of(slurp(feats)).size() == 160);
    const auto first = json::parse(lines_of(slurp(feats))[0]);
    CHECK(first["complaint"] == true);
    CHECK(first["groups"].contains("bow"));
    CHECK_FALSE(first["groups"].contains("pos"));

    const auto model = ws.path("model.json").string();
    r = ws.run("train --input " + feats + " --output " + model);
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(json::parse(slurp(model))["model"] == "elastic_net_logistic_regression");

    r = ws.run("classify --input " + feats + " --model " + model + " --output " + ws.path("from_features.jsonl").string());
    REQUIRE(r.code == 0);
    r = ws.run("classify --input " + input + " --model " + model + " --featurizer " + fz + " --output " +
               ws.path("from_corpus.jsonl").string());
    INFO(r.err);
    REQUIRE(r.code == 0);
    const auto a = lines_of(slurp(ws.path("from_features.jsonl")));
    const auto b = lines_of(slurp(ws.path("from_corpus.jsonl")));
    REQUIRE(a.size() == 160);
    CHECK(a == b);

    const auto corpus = testing::labelled_corpus(160, 11);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto j = json::parse(a[i]);
        CHECK(j["post_id"] == corpus[i].id);
        const double p = j["probability"];
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        correct += j["complaint"].get<bool>() == *corpus[i].complaint;
    }
    CHECK(correct >= 150);

    CHECK(ws.run("classify --input " + input + " --model " + model + " --output " + ws.path("x").string()).code == 1);
}

TEST_CASE("kappa subcommand") {
    Workspace ws;
    std::vector<Decision> ds;
    const std::vector<std::pair<const char*, const char*>> pairs = {
        {"complaint", "complaint"}, {"complaint", "non_complaint"}, {"non_complaint", "non_complaint"},
        {"non_complaint", "non_complaint"}, {"complaint", "complaint"}};
    std::vector<Decision> a, b;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const std::string task = "complaint:p" + std::to_string(i);
        a.push_back({task, "ann1", pairs[i].first, "2024-01-01T00:00:00Z"});
        b.push_back({task, "ann2", pairs[i].second, "2024-01-01T00:00:00Z"});
    }
    std::ostringstream both;
    export_decisions(both, a);
    export_decisions(both, b);
    const auto all = ws.write("decisions.jsonl", both.str());
    const auto r = ws.run("kappa --input " + all + " --annotators ann1,ann2 --kind complaint");
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["kappa"].get<double>() == kappa(a, b).kappa);

    std::ostringstream first, second;
    export_decisions(first, a);
    export_decisions(second, b);
    const auto split = ws.run("kappa --input " + ws.write("a.jsonl", first.str()) + " --with " +
                              ws.write("b.jsonl", second.str()));
    REQUIRE(split.code == 0);
    CHECK(split.out == r.out);

    CHECK(ws.run("kappa --input " + all + " --annotators ann1").code == 1);
    CHECK(ws.run("kappa --input " + all + " --annotators ann1,nobody").code == 1);
}

TEST_CASE("validation errors exit with 1") {
    Workspace ws;
    const auto input = ws.write("labelled.jsonl", testing::labelled_corpus(40));
    CHECK(ws.run("crossval --input " + ws.path("missing.jsonl").string() + " --output x").code == 1);
    CHECK(ws.run("crossval --input " + input + " --bogus-flag 3").code == 1);
    CHECK(ws.run("bootstrap --input " + input + " --mode sometimes").code == 1);
    CHECK(ws.run("crossval --input " + input + " --groups nonsense --output " + ws.path("o").string()).code == 1);
    CHECK(ws.run("crossval --input " + input + " --lambda1 -1 --output " + ws.path("o").string()).code == 1);
    CHECK(ws.run("train --input " + input).code == 1);
    const auto bad = ws.write("bad.jsonl", "{\"id\": \"x\"}\n");
    const auto r = ws.run("train --input " + bad + " --output " + ws.path("m.json").string());
    CHECK(r.code == 1);
    CHECK(r.err.find("bad.jsonl") != std::string::npos);
    CHECK(ws.run("report").code == 1);
    CHECK(ws.run("").code == 1);
}

TEST_CASE("config file supplies defaults that flags override") {
    Workspace ws;
    const auto input = ws.write("labelled.jsonl", testing::labelled_corpus(100, 2, 0.1));
    const auto cfg = ws.write("run.conf", "# crossval settings\nk = 5\ngroups = bow\nseed = 7\nlambda1 = 0.001\n");
    auto r = ws.run("--config " + cfg + " crossval --input " + input + " --output " + ws.path("a.json").string());
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("5-fold", 0) == 0);
    const auto a = json::parse(slurp(ws.path("a.json")));
    CHECK(a["group"] == "bow");
    CHECK(a["per_fold"].size() == 5);

    r = ws.run("--config " + cfg + " crossval --input " + input + " --k 4 --output " + ws.path("b.json").string());
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("4-fold", 0) == 0);

    const auto explicit_flags = ws.run("crossval --input " + input + " --k 5 --groups bow --seed 7 --lambda1 0.001 --output " +
                                       ws.path("c.json").string());
    REQUIRE(explicit_flags.code == 0);
    CHECK(slurp(ws.path("a.json")) == slurp(ws.path("c.json")));

    const auto unknown = ws.write("bad.conf", "folds = 3\n");
    CHECK(ws.run("--config " + unknown + " crossval --input " + input + " --output " + ws.path("d").string()).code == 1);
}

TEST_CASE("ingest and seed") {
    Workspace ws;
    const auto input = ws.write("labelled.jsonl", testing::labelled_corpus(60));
    const auto before = slurp(input);
    auto r = ws.run("ingest --input " + input + " --output " + ws.path("copy.csv").string());
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("ingested 60 posts") != std::string::npos);
    r = ws.run("ingest --input " + ws.path("copy.csv").string() + " --output " + ws.path("back.jsonl").string());
    REQUIRE(r.code == 0);
    CHECK(slurp(ws.path("back.jsonl")) == before);

    r = ws.run("seed --input " + input + " --seed-count 5 --output " + ws.path("seeds.jsonl").string());
    INFO(r.err);
    REQUIRE(r.code == 0);
    std::ifstream in(ws.path("seeds.jsonl"));
    CHECK(read_lexicon(in).size() == 5);
    CHECK(slurp(input) == before);
}

TEST_CASE("serve answers health checks") {
    Workspace ws;
    const auto f = write_planted(ws);
    int pipefd[2];
    REQUIRE(::pipe(pipefd) == 0);
    const pid_t pid = ::fork();
    REQUIRE(pid >= 0);
    if (pid == 0) {
        ::dup2(pipefd[1], STDOUT_FILENO);
        ::close(pipefd[0]);
        ::execl(LEXBOOT_CLI, LEXBOOT_CLI, "serve", "--input", f.corpus.c_str(), "--background", f.background.c_str(),
                "--serve-addr", "127.0.0.1:0", "--journal", ws.path("journal").c_str(), static_cast<char*>(nullptr));
        std::_Exit(127);
    }
    ::close(pipefd[1]);
    std::string banner;
    char ch;
    while (::read(pipefd[0], &ch, 1) == 1 && ch != '\n') banner += ch;
    ::close(pipefd[0]);
    const auto colon = banner.rfind(':');
    REQUIRE(colon != std::string::npos);
    const int port = std::stoi(banner.substr(colon + 1));

    httplib::Client c("127.0.0.1", port);
    const auto health = c.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(json::parse(health->body)["posts"] == 500);
    const auto created = c.Post("/runs", "{}", "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);

    ::kill(pid, SIGTERM);
    int status = 0;
    ::waitpid(pid, &status, 0);
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(lines_of(slurp(ws.path("journal/runs.jsonl"))).size() == 1);
}
