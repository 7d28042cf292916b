// lexboot: command-line driver for the complaint-identification pipeline.

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lexboot/lexboot.hpp"
#include "lexboot/service_http.hpp"

namespace fs = std::filesystem;
using namespace lexboot;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Options {
    std::string input;
    std::vector<std::string> inputs;
    std::string output;
    std::string format;
    std::uint64_t seed = 7;
    std::string groups = "all";
    std::size_t k = 10;
    double lambda1 = 1e-4;
    double lambda2 = 1e-4;
    std::vector<double> grid_lambda1;
    std::vector<double> grid_lambda2;
    bool balanced = false;
    int max_epochs = 500;
    double tolerance = 1e-7;
    double drs_threshold = 10.0;
    double dedup_threshold = 0.9;
    std::string drs_unit = "documents";
    std::string mode = "auto";
    int max_iter = 10;
    std::size_t seed_count = 50;
    std::size_t min_df = 2;
    std::string background;
    std::string informative;
    std::string seeds;
    std::string model;
    std::string featurizer;
    std::string embeddings;
    std::size_t clusters = 50;
    int bow_max_order = 1;
    std::string journal;
    std::string serve_addr = "127.0.0.1:8080";
    std::string annotators;
    std::string decisions_b;
    std::string kind;
    std::string table;
    int review_annotators = 1;
};

std::ofstream open_output(const std::string& path) {
    if (path.empty()) throw ConfigError("--output is required");
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    return out;
}

void require_input(const std::string& path, const char* flag = "--input") {
    if (path.empty()) throw ConfigError(std::string(flag) + " is required");
    if (!fs::exists(path)) throw InputError("input file '" + path + "' does not exist");
}

Corpus load_corpus(const std::string& path, const std::string& format = "") {
    require_input(path);
    if (format.empty()) return ingest(path);
    auto f = parse_format(format);
    if (!f) throw ConfigError("--format must be jsonl or csv");
    return ingest(path, *f);
}

/// Informative posts: an explicit file, or the corpus posts labelled informative.
Corpus informative_posts(const Corpus& corpus, const std::string& path) {
    if (!path.empty()) {
        require_input(path, "--informative");
        return ingest(path);
    }
    return corpus.filter([](const Post& p) { return p.informative.value_or(false); });
}

std::vector<std::string> read_seed_list(const std::string& path) {
    require_input(path, "--seeds");
    return load_word_list(path);
}

BootstrapConfig bootstrap_config(const Options& o) {
    BootstrapConfig c;
    c.seed_count = o.seed_count;
    c.drs_threshold = o.drs_threshold;
    c.max_iterations = o.max_iter;
    c.dedup_threshold = o.dedup_threshold;
    c.min_df = o.min_df;
    auto mode = parse_review_mode(o.mode);
    if (!mode) throw ConfigError("--mode must be auto or interactive");
    c.review_mode = *mode;
    auto unit = parse_drs_unit(o.drs_unit);
    if (!unit) throw ConfigError("--drs-unit must be documents or tokens");
    c.drs_unit = *unit;
    c.validate();
    return c;
}

TrainConfig train_config(const Options& o) {
    TrainConfig c;
    c.lambda1 = o.lambda1;
    c.lambda2 = o.lambda2;
    c.max_epochs = o.max_epochs;
    c.tolerance = o.tolerance;
    c.rng_seed = o.seed;
    c.balanced = o.balanced;
    c.validate();
    return c;
}

/// Reviews candidates on the terminal.
class PromptDecisionSource : public DecisionSource {
public:
    std::vector<std::pair<std::string, bool>> review(const std::vector<SeedPhrase>& candidates,
                                                     int iteration) override {
        std::vector<std::pair<std::string, bool>> out;
        std::cerr << "iteration " << iteration << ": " << candidates.size() << " candidate phrases\n";
        for (const auto& c : candidates) {
            for (;;) {
                std::cerr << "  keep '" << c.text << "'";
                if (c.drs) std::cerr << " (drs " << *c.drs << ")";
                std::cerr << "? [y/n] " << std::flush;
                std::string answer;
                if (!std::getline(std::cin, answer)) throw StateError("input closed during review");
                answer = std::string(Corpus::trim(answer));
                if (answer == "y" || answer == "yes") {
                    out.emplace_back(c.text, true);
                    break;
                }
                if (answer == "n" || answer == "no") {
                    out.emplace_back(c.text, false);
                    break;
                }
            }
        }
        return out;
    }
};

// ---- feature records --------------------------------------------------------

struct LabelledFeatures {
    std::vector<FeatureVector> vectors;
    std::vector<int> labels;
};

bool looks_like_corpus(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (Corpus::trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            return !j.contains("groups");
        } catch (const nlohmann::json::exception&) {
            return true;  // CSV, or malformed JSONL that ingest will report
        }
    }
    return true;
}

LabelledFeatures read_features(const std::string& path) {
    require_input(path);
    std::ifstream in(path);
    LabelledFeatures out;
    std::string line;
    std::size_t lineno = 0, unlabelled = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (Corpus::trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            auto fv = feature_vector_from_json(j);
            const auto& label = j.at("complaint");
            if (label.is_null()) {
                ++unlabelled;
                continue;
            }
            out.labels.push_back(label.get<bool>() ? 1 : 0);
            out.vectors.push_back(std::move(fv));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(path + ":" + std::to_string(lineno) + ": malformed feature record (" + e.what() + ")");
        } catch (const InputError& e) {
            throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (unlabelled) std::cerr << "note: skipped " << unlabelled << " records without a complaint label\n";
    if (out.vectors.empty()) throw InputError(path + ": no labelled feature records");
    return out;
}

FeaturizerOptions featurizer_options(const Options& o) {
    FeaturizerOptions f;
    f.config = FeatureConfig::parse(o.groups);
    f.bow_max_order = o.bow_max_order;
    f.clusters = o.clusters;
    f.seed = o.seed;
    if (!o.embeddings.empty()) {
        require_input(o.embeddings, "--embeddings");
        f.embeddings = load_embeddings(o.embeddings);
    }
    return f;
}

std::vector<FeatureVector> featurize_posts(const std::vector<TokenizedPost>& posts, const FeatureResources& r,
                                           const FeatureConfig& config) {
    std::vector<FeatureVector> out;
    out.reserve(posts.size());
    for (const auto& p : posts) out.push_back(extract_all(p, r, config));
    return out;
}

/// Labelled vectors from a features file, or featurized in memory from a corpus.
LabelledFeatures labelled_features(const Options& o) {
    require_input(o.input);
    if (!looks_like_corpus(o.input)) {
        auto lf = read_features(o.input);
        if (o.groups != "all") {
            const auto config = FeatureConfig::parse(o.groups);
            for (auto& fv : lf.vectors) {
                for (const auto& g : config.groups)
                    if (!fv.has_group(g))
                        throw InputError("feature record '" + fv.post_id + "' lacks group '" + g + "'");
                std::erase_if(fv.groups, [&](const auto& kv) { return !config.enabled(kv.first); });
            }
        }
        return lf;
    }
    const Corpus corpus = load_corpus(o.input, o.format);
    const Corpus labelled = corpus.filter([](const Post& p) { return p.complaint.has_value(); });
    if (labelled.size() < corpus.size())
        std::cerr << "note: skipped " << corpus.size() - labelled.size() << " posts without a complaint label\n";
    if (labelled.empty()) throw InputError(o.input + ": no posts with a complaint label");
    const auto posts = tokenize_corpus(labelled);
    std::vector<std::string> notes;
    const auto options = featurizer_options(o);
    const auto resources = fit_resources(posts, options, &notes);
    for (const auto& n : notes) std::cerr << "note: " << n << '\n';
    LabelledFeatures lf;
    lf.vectors = featurize_posts(posts, resources, options.config);
    for (const auto& p : labelled) lf.labels.push_back(*p.complaint ? 1 : 0);
    return lf;
}

nlohmann::json read_json_file(const std::string& path, const char* flag) {
    require_input(path, flag);
    std::ifstream in(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": malformed JSON (" + e.what() + ")");
    }
}

// ---- subcommands ------------------------------------------------------------

int cmd_ingest(const Options& o) {
    const Corpus corpus = load_corpus(o.input, o.format);
    const fs::path out(o.output);
    export_corpus(out, corpus, format_for(out));
    const auto c = count_labels(corpus);
    std::cout << "ingested " << corpus.size() << " posts; informative " << c.informative << ", non_informative "
              << c.non_informative << ", complaint " << c.complaint << ", non_complaint " << c.non_complaint
              << '\n';
    return 0;
}

int cmd_seed(const Options& o) {
    const Corpus corpus = load_corpus(o.input, o.format);
    const Corpus informative = informative_posts(corpus, o.informative);
    const auto tokens = tokenize_corpus(corpus);
    const auto model = fit_tfidf(std::span<const TokenizedPost>(tokens), TfIdfOptions{o.min_df, 1});
    Lexicon lex;
    for (auto& s : initial_seeds(informative, model, o.seed_count)) lex.add(std::move(s));
    auto out = open_output(o.output);
    write_lexicon(out, lex);
    std::cout << "wrote " << lex.size() << " seed phrases to " << o.output << '\n';
    return 0;
}

int cmd_bootstrap(const Options& o) {
    const auto config = bootstrap_config(o);
    const Corpus corpus = load_corpus(o.input, o.format);
    require_input(o.background, "--background");
    const BackgroundPool background(ingest(o.background));
    const Corpus informative = informative_posts(corpus, o.informative);
    std::vector<std::string> seeds;
    if (!o.seeds.empty()) seeds = read_seed_list(o.seeds);
    PromptDecisionSource prompt;
    const auto result = run_bootstrap(corpus, informative, background, config,
                                      config.review_mode == ReviewMode::interactive ? &prompt : nullptr, seeds);
    if (o.output.empty()) throw ConfigError("--output is required");
    fs::create_directories(o.output);
    {
        std::ofstream out(fs::path(o.output) / "lexicon.jsonl", std::ios::binary);
        write_lexicon(out, result.lexicon);
    }
    {
        std::ofstream out(fs::path(o.output) / "relevant.jsonl", std::ios::binary);
        write_jsonl(out, result.relevant);
    }
    {
        std::ofstream out(fs::path(o.output) / "run_log.jsonl", std::ios::binary);
        for (const auto& r : result.reports) out << to_json(r).dump() << '\n';
    }
    const auto& last = result.reports.empty() ? IterationReport{} : result.reports.back();
    std::cout << "iterations " << result.reports.size() << ", approved phrases "
              << result.lexicon.count(PhraseStatus::approved) << ", relevant posts " << result.relevant.size()
              << ", stop_reason " << (last.stop_reason ? to_string(*last.stop_reason) : "none") << '\n';
    return 0;
}

int cmd_featurize(const Options& o) {
    const Corpus corpus = load_corpus(o.input, o.format);
    const auto options = featurizer_options(o);
    const auto posts = tokenize_corpus(corpus);
    const FeatureConfig& config = options.config;
    std::vector<std::string> notes;
    const auto resources = fit_resources(posts, options, &notes);
    for (const auto& n : notes) std::cerr << "note: " << n << '\n';
    const auto vectors = featurize_posts(posts, resources, config);
    auto out = open_output(o.output);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        auto j = to_json(vectors[i]);
        const auto& c = corpus[i].complaint;
        j["complaint"] = c ? nlohmann::json(*c) : nlohmann::json(nullptr);
        out << j.dump() << '\n';
    }
    if (!o.featurizer.empty()) {
        auto fout = open_output(o.featurizer);
        fout << featurizer_to_json(resources, config).dump(2) << '\n';
    }
    std::cout << "featurized " << vectors.size() << " posts (" << config.groups.size() << " groups)\n";
    return 0;
}

int cmd_train(const Options& o) {
    const auto config = train_config(o);
    const auto lf = labelled_features(o);
    const auto x = build_matrix(lf.vectors);
    TrainTrace trace;
    const auto model = train(x, lf.labels, config, &trace);
    auto out = open_output(o.output);
    out << to_json(model).dump(2) << '\n';
    std::cout << "trained on " << lf.labels.size() << " posts, " << model.weights.size() << " features ("
              << model.zero_weights() << " zero), " << trace.epochs << " epochs"
              << (trace.converged ? "" : " (not converged)") << '\n';
    return 0;
}

int cmd_crossval(const Options& o) {
    auto config = train_config(o);
    const auto lf = labelled_features(o);
    const auto x = build_matrix(lf.vectors);
    EvalReport report;
    if (!o.grid_lambda1.empty() || !o.grid_lambda2.empty()) {
        const std::vector<double> l1 = o.grid_lambda1.empty() ? std::vector<double>{o.lambda1} : o.grid_lambda1;
        const std::vector<double> l2 = o.grid_lambda2.empty() ? std::vector<double>{o.lambda2} : o.grid_lambda2;
        std::size_t best = 0;
        const auto grid = grid_search(x, lf.labels, o.k, config, l1, l2, &best);
        for (const auto& g : grid)
            std::cerr << "lambda1 " << g.lambda1 << " lambda2 " << g.lambda2 << ": accuracy "
                      << g.report.overall.accuracy << " f1 " << g.report.overall.f1 << '\n';
        report = grid[best].report;
    } else {
        report = cross_validate(x, lf.labels, o.k, config);
    }
    report.group = o.groups;
    auto out = open_output(o.output);
    out << to_json(report).dump(2) << '\n';
    if (!o.table.empty()) {
        auto t = open_output(o.table);
        t << render_table({report});
    }
    std::cout << o.k << "-fold accuracy " << report.overall.accuracy << " +/- " << report.stdev.accuracy << ", f1 "
              << report.overall.f1 << " +/- " << report.stdev.f1 << '\n';
    return 0;
}

int cmd_classify(const Options& o) {
    require_input(o.model, "--model");
    const auto model = model_from_json(read_json_file(o.model, "--model"));
    require_input(o.input);
    std::vector<FeatureVector> vectors;
    if (looks_like_corpus(o.input)) {
        if (o.featurizer.empty()) throw ConfigError("classifying a corpus needs --featurizer (from featurize)");
        const auto [resources, config] = featurizer_from_json(read_json_file(o.featurizer, "--featurizer"));
        vectors = featurize_posts(tokenize_corpus(load_corpus(o.input, o.format)), resources, config);
    } else {
        std::ifstream in(o.input);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (Corpus::trim(line).empty()) continue;
            try {
                vectors.push_back(feature_vector_from_json(nlohmann::json::parse(line)));
            } catch (const nlohmann::json::exception& e) {
                throw InputError(o.input + ":" + std::to_string(lineno) + ": " + e.what());
            }
        }
    }
    auto out = open_output(o.output);
    std::size_t positive = 0;
    for (const auto& fv : vectors) {
        const double p = predict(model, fv);
        const bool complaint = p >= 0.5;
        positive += complaint;
        nlohmann::ordered_json j{{"post_id", fv.post_id}, {"probability", p}, {"complaint", complaint}};
        out << j.dump() << '\n';
    }
    std::cout << "classified " << vectors.size() << " posts, " << positive << " as complaint\n";
    return 0;
}

std::vector<Decision> read_decisions(const std::string& path, const char* flag) {
    require_input(path, flag);
    std::ifstream in(path);
    return import_decisions(in, path);
}

int cmd_kappa(const Options& o) {
    std::vector<Decision> a, b;
    if (!o.decisions_b.empty()) {
        a = read_decisions(o.input, "--input");
        b = read_decisions(o.decisions_b, "--with");
    } else {
        const auto all = read_decisions(o.input, "--input");
        std::vector<std::string> ids;
        std::stringstream ss(o.annotators);
        for (std::string id; std::getline(ss, id, ',');)
            if (!Corpus::trim(id).empty()) ids.emplace_back(Corpus::trim(id));
        if (ids.size() != 2) throw ConfigError("--annotators needs exactly two ids, e.g. --annotators a1,a2");
        for (const auto& d : all) {
            if (d.annotator_id == ids[0]) a.push_back(d);
            if (d.annotator_id == ids[1]) b.push_back(d);
        }
    }
    if (!o.kind.empty()) {
        if (!parse_task_kind(o.kind)) throw ConfigError("--kind must be informativeness, complaint or phrase_review");
        const std::string prefix = o.kind + ":";
        auto keep = [&](std::vector<Decision>& v) {
            std::erase_if(v, [&](const Decision& d) { return d.task_id.rfind(prefix, 0) != 0; });
        };
        keep(a);
        keep(b);
    }
    const auto report = kappa(a, b);
    const auto text = to_json(report).dump(2);
    if (!o.output.empty()) {
        auto out = open_output(o.output);
        out << text << '\n';
    }
    std::cout << text << '\n';
    return 0;
}

/// Sets options from a flat key=value file unless given on the command line.
/// Keys are option names without the leading dashes.
void apply_config(CLI::App& app, CLI::App& sub, const std::string& path) {
    require_input(path, "--config");
    std::ifstream in(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = Corpus::trim(line);
        if (text.empty() || text.front() == '#' || text.front() == ';' || text.front() == '[') continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key(Corpus::trim(text.substr(0, eq)));
        std::string value(Corpus::trim(text.substr(eq + 1)));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        std::replace(key.begin(), key.end(), '_', '-');
        CLI::Option* opt = sub.get_option_no_throw("--" + key);
        if (!opt) opt = app.get_option_no_throw("--" + key);
        if (!opt) {
            bool known = false;
            for (auto* other : app.get_subcommands({}))
                known = known || other->get_option_no_throw("--" + key) != nullptr;
            if (!known) throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
            continue;
        }
        if (opt->count() > 0 || key == "config") continue;
        try {
            if (opt->get_expected_max() == 0) {
                opt->add_result(value == "true" || value == "1" ? "true" : "false");
            } else if (opt->get_expected_max() > 1) {
                std::stringstream ss(value);
                for (std::string item; std::getline(ss, item, ',');) opt->add_result(item);
            } else {
                opt->add_result(value);
            }
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": bad value for '" + key + "': " + e.what());
        }
    }
}

HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

int cmd_serve(const Options& o) {
    const auto colon = o.serve_addr.rfind(':');
    if (colon == std::string::npos) throw ConfigError("--serve-addr must be host:port");
    const std::string host = o.serve_addr.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(o.serve_addr.substr(colon + 1));
    } catch (const std::exception&) {
        throw ConfigError("--serve-addr has a bad port");
    }
    if (port < 0 || port > 65535) throw ConfigError("--serve-addr port out of range");
    auto corpus = std::make_shared<const Corpus>(load_corpus(o.input, o.format));
    require_input(o.background, "--background");
    auto background = std::make_shared<const BackgroundPool>(ingest(o.background));
    auto informative = std::make_shared<const Corpus>(informative_posts(*corpus, o.informative));
    ServiceOptions options;
    if (!o.journal.empty()) options.journal_dir = o.journal;
    options.defaults.bootstrap = bootstrap_config(o);
    options.defaults.review_annotators = o.review_annotators;
    if (!o.seeds.empty()) options.defaults.seeds = read_seed_list(o.seeds);
    Service service(ServiceData{corpus, informative, background}, options);
    HttpServer server(service);
    const int bound = server.bind(host, port);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on http://" << host << ':' << bound << std::endl;
    server.run();
    g_server = nullptr;
    return 0;
}

int cmd_report(const Options& o) {
    if (o.inputs.empty()) throw ConfigError("report needs one or more crossval report files");
    std::vector<EvalReport> reports;
    for (const auto& path : o.inputs) {
        auto r = report_from_json(read_json_file(path, "--input"));
        if (r.group.empty()) r.group = fs::path(path).stem().string();
        reports.push_back(std::move(r));
    }
    const auto table = render_table(reports);
    if (!o.output.empty()) {
        auto out = open_output(o.output);
        out << table;
    }
    std::cout << table;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lexboot: lexicon bootstrapping and complaint classification"};
    std::string config_path;
    app.add_option("--config", config_path, "flat key=value file; command-line flags override it");
    app.require_subcommand(1);
    Options o;

    auto add_input = [&](CLI::App* c) {
        c->add_option("--input,-i", o.input, "input file");
        c->add_option("--seed", o.seed, "seed for every random choice");
    };
    auto add_output = [&](CLI::App* c) { c->add_option("--output,-o", o.output, "output path"); };
    auto add_format = [&](CLI::App* c) {
        c->add_option("--format", o.format, "input format (jsonl or csv); default from the extension");
    };
    auto add_bootstrap = [&](CLI::App* c) {
        c->add_option("--background", o.background, "background pool of random posts");
        c->add_option("--informative", o.informative, "informative posts (default: corpus posts labelled so)");
        c->add_option("--seeds", o.seeds, "explicit seed phrases, one per line");
        c->add_option("--mode", o.mode, "auto or interactive")->check(CLI::IsMember({"auto", "interactive"}));
        c->add_option("--max-iter", o.max_iter, "iteration cap");
        c->add_option("--drs-threshold", o.drs_threshold, "minimum domain relevance score");
        c->add_option("--dedup-threshold", o.dedup_threshold, "cosine threshold for near-duplicates");
        c->add_option("--drs-unit", o.drs_unit, "documents or tokens");
        c->add_option("--seed-count", o.seed_count, "number of initial tf-idf seeds");
        c->add_option("--min-df", o.min_df, "tf-idf document frequency floor");
    };
    auto add_features = [&](CLI::App* c) {
        c->add_option("--groups", o.groups, "comma-separated feature groups, or all");
        c->add_option("--embeddings", o.embeddings, "word vectors (token v1 ... vd per line)");
        c->add_option("--clusters", o.clusters, "number of word clusters");
        c->add_option("--bow-max-order", o.bow_max_order, "largest n-gram order in the bag of words");
    };
    auto add_train = [&](CLI::App* c) {
        c->add_option("--lambda1", o.lambda1, "L1 penalty");
        c->add_option("--lambda2", o.lambda2, "L2 penalty");
        c->add_option("--max-epochs", o.max_epochs, "proximal gradient iteration cap");
        c->add_option("--tolerance", o.tolerance, "relative objective decrease at which to stop");
        c->add_flag("--balanced", o.balanced, "inverse class-prior sample weights");
    };

    auto* ingest_cmd = app.add_subcommand("ingest", "validate a corpus and write it in canonical form");
    add_input(ingest_cmd);
    add_output(ingest_cmd);
    add_format(ingest_cmd);

    auto* seed_cmd = app.add_subcommand("seed", "initial seed phrases from informative posts");
    add_input(seed_cmd);
    add_output(seed_cmd);
    add_format(seed_cmd);
    seed_cmd->add_option("--informative", o.informative, "informative posts (default: corpus posts labelled so)");
    seed_cmd->add_option("--seed-count", o.seed_count, "number of seeds");
    seed_cmd->add_option("--min-df", o.min_df, "tf-idf document frequency floor");

    auto* boot_cmd = app.add_subcommand("bootstrap", "iterative lexicon expansion");
    add_input(boot_cmd);
    add_output(boot_cmd);
    add_format(boot_cmd);
    add_bootstrap(boot_cmd);

    auto* feat_cmd = app.add_subcommand("featurize", "feature vectors per post");
    add_input(feat_cmd);
    add_output(feat_cmd);
    add_format(feat_cmd);
    add_features(feat_cmd);
    feat_cmd->add_option("--featurizer", o.featurizer, "also write the fitted featurizer here");

    auto* train_cmd = app.add_subcommand("train", "fit the elastic-net classifier");
    add_input(train_cmd);
    add_output(train_cmd);
    add_format(train_cmd);
    add_features(train_cmd);
    add_train(train_cmd);

    auto* cv_cmd = app.add_subcommand("crossval", "stratified k-fold cross-validation");
    add_input(cv_cmd);
    add_output(cv_cmd);
    add_format(cv_cmd);
    add_features(cv_cmd);
    add_train(cv_cmd);
    cv_cmd->add_option("--k", o.k, "number of folds");
    cv_cmd->add_option("--grid-lambda1", o.grid_lambda1, "L1 values to search")->delimiter(',');
    cv_cmd->add_option("--grid-lambda2", o.grid_lambda2, "L2 values to search")->delimiter(',');
    cv_cmd->add_option("--table", o.table, "also write a plain-text table");

    auto* cls_cmd = app.add_subcommand("classify", "complaint probabilities for posts");
    add_input(cls_cmd);
    add_output(cls_cmd);
    add_format(cls_cmd);
    cls_cmd->add_option("--model", o.model, "model from train");
    cls_cmd->add_option("--featurizer", o.featurizer, "featurizer from featurize (for corpus input)");

    auto* kappa_cmd = app.add_subcommand("kappa", "Cohen's kappa between two annotators");
    add_input(kappa_cmd);
    add_output(kappa_cmd);
    kappa_cmd->add_option("--with", o.decisions_b, "second annotator's decisions file");
    kappa_cmd->add_option("--annotators", o.annotators, "two annotator ids when --input holds both");
    kappa_cmd->add_option("--kind", o.kind, "restrict to one task kind");

    auto* serve_cmd = app.add_subcommand("serve", "HTTP/JSON annotation and review service");
    add_input(serve_cmd);
    add_format(serve_cmd);
    add_bootstrap(serve_cmd);
    serve_cmd->add_option("--serve-addr", o.serve_addr, "host:port to listen on");
    serve_cmd->add_option("--journal", o.journal, "journal directory; state is replayed from it on start");
    serve_cmd->add_option("--review-annotators", o.review_annotators, "decisions per phrase review task");

    auto* report_cmd = app.add_subcommand("report", "results table from crossval reports");
    report_cmd->add_option("--input,-i,inputs", o.inputs, "crossval report files");
    add_output(report_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (!config_path.empty()) {
            for (auto* sub : app.get_subcommands()) apply_config(app, *sub, config_path);
        }
        if (*ingest_cmd) return cmd_ingest(o);
        if (*seed_cmd) return cmd_seed(o);
        if (*boot_cmd) return cmd_bootstrap(o);
        if (*feat_cmd) return cmd_featurize(o);
        if (*train_cmd) return cmd_train(o);
        if (*cv_cmd) return cmd_crossval(o);
        if (*cls_cmd) return cmd_classify(o);
        if (*kappa_cmd) return cmd_kappa(o);
        if (*serve_cmd) return cmd_serve(o);
        if (*report_cmd) return cmd_report(o);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NotFoundError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitValidation;
}
