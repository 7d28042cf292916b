#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexboot/annotation.hpp"
#include "lexboot/bootstrap.hpp"
#include "lexboot/corpus.hpp"
#include "lexboot/error.hpp"
#include "lexboot/service/journal.hpp"

namespace lexboot {

enum class RunStatus { idle, matching, awaiting_review, training, done, failed };

inline std::string_view to_string(RunStatus s) {
    switch (s) {
        case RunStatus::idle: return "idle";
        case RunStatus::matching: return "matching";
        case RunStatus::awaiting_review: return "awaiting_review";
        case RunStatus::training: return "training";
        case RunStatus::done: return "done";
        case RunStatus::failed: return "failed";
    }
    return "idle";
}

/// Error carrying an HTTP status and a machine-readable code.
class ApiError : public Error {
public:
    ApiError(int status, std::string code, const std::string& message)
        : Error(message), status_(status), code_(std::move(code)) {}
    int status() const noexcept { return status_; }
    const std::string& code() const noexcept { return code_; }

private:
    int status_;
    std::string code_;
};

struct ApiRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::map<std::string, std::string> headers;  ///< lower-case names
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
    std::map<std::string, std::string> headers;
};

struct RunConfig {
    BootstrapConfig bootstrap;
    std::vector<std::string> seeds;  ///< explicit seeds; empty means tf-idf seeding
    int review_annotators = 1;       ///< decisions needed per phrase_review task
};

inline nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["seed_count"] = c.bootstrap.seed_count;
    j["drs_threshold"] = c.bootstrap.drs_threshold;
    j["max_iterations"] = c.bootstrap.max_iterations;
    j["dedup_threshold"] = c.bootstrap.dedup_threshold;
    j["mode"] = to_string(c.bootstrap.review_mode);
    j["drs_unit"] = to_string(c.bootstrap.drs_unit);
    j["min_df"] = c.bootstrap.min_df;
    j["candidate_min_posts"] = c.bootstrap.candidate_min_posts;
    j["seeds"] = c.seeds;
    j["review_annotators"] = c.review_annotators;
    return j;
}

/// Fields absent from `j` keep the values in `defaults`. Unknown keys are
/// rejected so that typos do not silently fall back to defaults.
inline RunConfig run_config_from_json(const nlohmann::json& j, const RunConfig& defaults = {}) {
    if (!j.is_object()) throw InputError("run config must be a JSON object");
    RunConfig c = defaults;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "seed_count") c.bootstrap.seed_count = v.get<std::size_t>();
            else if (key == "drs_threshold") c.bootstrap.drs_threshold = v.get<double>();
            else if (key == "max_iterations") c.bootstrap.max_iterations = v.get<int>();
            else if (key == "dedup_threshold") c.bootstrap.dedup_threshold = v.get<double>();
            else if (key == "min_df") c.bootstrap.min_df = v.get<std::size_t>();
            else if (key == "candidate_min_posts") c.bootstrap.candidate_min_posts = v.get<std::size_t>();
            else if (key == "review_annotators") c.review_annotators = v.get<int>();
            else if (key == "seeds") c.seeds = v.get<std::vector<std::string>>();
            else if (key == "mode") {
                auto m = parse_review_mode(v.get<std::string>());
                if (!m) throw InputError("mode must be 'auto' or 'interactive'");
                c.bootstrap.review_mode = *m;
            } else if (key == "drs_unit") {
                auto u = parse_drs_unit(v.get<std::string>());
                if (!u) throw InputError("drs_unit must be 'documents' or 'tokens'");
                c.bootstrap.drs_unit = *u;
            } else {
                throw InputError("unknown run config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("run config: ") + e.what());
    }
    try {
        c.bootstrap.validate();
    } catch (const ConfigError& e) {
        throw InputError(e.what());
    }
    if (c.review_annotators < 1) throw InputError("review_annotators must be >= 1");
    return c;
}

/// Immutable published state of one run. Readers hold a shared_ptr to it
/// and never see a partially applied mutation.
struct RunView {
    std::string run_id;
    RunStatus status = RunStatus::idle;
    int iteration = 0;
    std::uint64_t version = 0;
    std::optional<StopReason> stop_reason;
    std::string error;
    RunConfig config;
    Lexicon lexicon;
    std::vector<IterationReport> reports;
    AnnotationStore store;
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> examples;  ///< phrase -> (id, text)
};

/// Shared read-only inputs of the service.
struct ServiceData {
    std::shared_ptr<const Corpus> corpus;
    std::shared_ptr<const Corpus> informative;
    std::shared_ptr<const BackgroundPool> background;
};

struct ServiceOptions {
    std::optional<std::filesystem::path> journal_dir;
    RunConfig defaults;
    std::size_t examples_per_phrase = 3;
};

/// Control plane for bootstrap runs and their annotation queues. All
/// mutations go through one writer lock, are journaled, and then publish a
/// new RunView; reads only copy a view pointer.
class Service {
public:
    explicit Service(ServiceData data, ServiceOptions options = {})
        : data_(std::move(data)), options_(std::move(options)) {
        if (!data_.corpus || !data_.background) throw ConfigError("service needs a corpus and a background pool");
        if (!data_.informative) data_.informative = std::make_shared<const Corpus>();
        if (options_.journal_dir) {
            journal_ = std::make_unique<Journal>(*options_.journal_dir);
            replay(journal_->load());
        }
    }

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // ---- typed operations -------------------------------------------------

    std::shared_ptr<const RunView> view(const std::string& run_id) const {
        std::shared_lock lock(views_mutex_);
        auto it = views_.find(run_id);
        if (it == views_.end()) throw ApiError(404, "not_found", "unknown run '" + run_id + "'");
        return it->second;
    }

    std::vector<std::shared_ptr<const RunView>> views() const {
        std::shared_lock lock(views_mutex_);
        std::vector<std::shared_ptr<const RunView>> out;
        for (const auto& [id, v] : views_) out.push_back(v);
        return out;
    }

    std::string create_run(const nlohmann::json& config) {
        std::lock_guard lock(write_);
        const auto cfg = run_config_from_json(config, options_.defaults);
        const std::string id = apply_create(cfg);
        journal("runs", {{"op", "create"}, {"run_id", id}, {"config", to_json(cfg)}});
        return id;
    }

    std::shared_ptr<const RunView> advance(const std::string& run_id, std::optional<std::uint64_t> if_match = {}) {
        std::lock_guard lock(write_);
        Run& r = run(run_id, if_match);
        apply_advance(r);
        journal("transitions", {{"op", "advance"}, {"run_id", run_id}});
        return view(run_id);
    }

    std::shared_ptr<const RunView> stop(const std::string& run_id, std::optional<std::uint64_t> if_match = {}) {
        std::lock_guard lock(write_);
        Run& r = run(run_id, if_match);
        apply_stop(r);
        journal("transitions", {{"op", "stop"}, {"run_id", run_id}});
        return view(run_id);
    }

    std::shared_ptr<const RunView> review(const std::string& run_id, const std::string& phrase, bool keep,
                                          std::optional<std::uint64_t> if_match = {}) {
        std::lock_guard lock(write_);
        Run& r = run(run_id, if_match);
        apply_review(r, phrase, keep);
        journal("lexicon", {{"run_id", run_id}, {"phrase", phrase}, {"decision", keep ? "keep" : "drop"}});
        return view(run_id);
    }

    std::vector<Task> add_tasks(const std::string& run_id, TaskKind kind, std::size_t n, std::uint64_t seed,
                                int required_annotators = 2, std::optional<std::uint64_t> if_match = {}) {
        std::lock_guard lock(write_);
        Run& r = run(run_id, if_match);
        auto tasks = apply_tasks(r, kind, n, seed, required_annotators);
        journal("tasks", {{"run_id", run_id},
                          {"kind", to_string(kind)},
                          {"n", n},
                          {"seed", seed},
                          {"required_annotators", required_annotators}});
        return tasks;
    }

    RecordOutcome record(const std::string& run_id, Decision d, std::optional<std::uint64_t> if_match = {}) {
        std::lock_guard lock(write_);
        Run& r = run(run_id, if_match);
        if (d.decided_at.empty()) d.decided_at = utc_timestamp();
        const auto outcome = apply_decision(r, d);
        auto rec = to_json(d);
        rec["run_id"] = run_id;
        journal("decisions", std::move(rec));
        return outcome;
    }

    // ---- HTTP-shaped dispatch ----------------------------------------------

    ApiResponse handle(const ApiRequest& req) {
        try {
            return route(req);
        } catch (const ApiError& e) {
            return error(e.status(), e.code(), e.what());
        } catch (const NotFoundError& e) {
            return error(404, "not_found", e.what());
        } catch (const StateError& e) {
            return error(409, "conflict", e.what());
        } catch (const InputError& e) {
            return error(400, "bad_request", e.what());
        } catch (const ConfigError& e) {
            return error(400, "bad_request", e.what());
        } catch (const std::exception& e) {
            return error(500, "internal", e.what());
        }
    }

    static nlohmann::ordered_json run_json(const RunView& v) {
        nlohmann::ordered_json j;
        j["run_id"] = v.run_id;
        j["status"] = to_string(v.status);
        j["current_iteration"] = v.iteration;
        j["version"] = v.version;
        j["mode"] = to_string(v.config.bootstrap.review_mode);
        j["stop_reason"] = v.stop_reason ? nlohmann::ordered_json(to_string(*v.stop_reason))
                                         : nlohmann::ordered_json(nullptr);
        j["pending_candidates"] = v.lexicon.count(PhraseStatus::candidate);
        j["approved_phrases"] = v.lexicon.count(PhraseStatus::approved);
        j["rejected_phrases"] = v.lexicon.count(PhraseStatus::rejected);
        j["matched_post_count"] = v.reports.empty() ? 0 : v.reports.back().matched_post_count;
        j["latest_report"] = v.reports.empty() ? nlohmann::ordered_json(nullptr) : to_json(v.reports.back());
        j["error"] = v.error.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v.error);
        j["config"] = to_json(v.config);
        return j;
    }

private:
    struct Run {
        std::string id;
        RunConfig config;
        std::unique_ptr<BootstrapSession> session;
        AnnotationStore store;
        RunStatus status = RunStatus::idle;
        std::uint64_t version = 0;
        std::string error;
        std::map<std::string, std::vector<std::pair<std::string, std::string>>> examples;
    };

    // ---- state changes (caller holds write_) -------------------------------

    Run& run(const std::string& run_id, std::optional<std::uint64_t> if_match) {
        auto it = runs_.find(run_id);
        if (it == runs_.end()) throw ApiError(404, "not_found", "unknown run '" + run_id + "'");
        Run& r = *it->second;
        if (if_match && *if_match != r.version)
            throw ApiError(409, "stale_version",
                           "version " + std::to_string(*if_match) + " is stale; current is " +
                               std::to_string(r.version));
        return r;
    }

    std::string apply_create(const RunConfig& cfg) {
        auto r = std::make_unique<Run>();
        r->id = "run-" + std::to_string(next_run_++);
        r->config = cfg;
        r->session = std::make_unique<BootstrapSession>(*data_.corpus, *data_.background, cfg.bootstrap);
        r->version = 1;
        const std::string id = r->id;
        Run& ref = *r;
        runs_.emplace(id, std::move(r));
        publish(ref);
        return id;
    }

    void apply_advance(Run& r) {
        auto& s = *r.session;
        if (r.status == RunStatus::done || r.status == RunStatus::failed)
            throw ApiError(409, "illegal_transition", "run '" + r.id + "' is " + std::string(to_string(r.status)));
        if (r.status == RunStatus::awaiting_review && !s.pending().empty())
            throw ApiError(409, "candidates_pending",
                           std::to_string(s.pending().size()) + " candidates are still pending review");
        try {
            if (r.status == RunStatus::idle) {
                if (r.config.seeds.empty()) s.seed_from(*data_.informative);
                else s.seed_with(r.config.seeds);
                if (s.pending().empty()) s.advance();
            } else {
                s.advance();
            }
            while (r.config.bootstrap.review_mode == ReviewMode::automatic && !s.finished() && s.pending().empty())
                s.advance();
            r.status = s.finished() ? RunStatus::done : RunStatus::awaiting_review;
        } catch (const Error& e) {
            r.status = RunStatus::failed;
            r.error = e.what();
        }
        sync_candidates(r);
        ++r.version;
        publish(r);
    }

    void apply_stop(Run& r) {
        if (r.status == RunStatus::done || r.status == RunStatus::failed)
            throw ApiError(409, "illegal_transition", "run '" + r.id + "' is " + std::string(to_string(r.status)));
        r.session->stop();
        r.status = RunStatus::done;
        ++r.version;
        publish(r);
    }

    void apply_review(Run& r, const std::string& phrase, bool keep) {
        const SeedPhrase* p = r.session->lexicon().find(phrase);
        if (!p) throw ApiError(404, "not_found", "unknown phrase '" + phrase + "'");
        if (p->status != PhraseStatus::candidate)
            throw ApiError(409, "already_decided", "phrase '" + phrase + "' is already " +
                                                       std::string(to_string(p->status)));
        if (r.session->finished()) throw ApiError(409, "illegal_transition", "run '" + r.id + "' is finished");
        r.session->decide(phrase, keep);
        ++r.version;
        publish(r);
    }

    std::vector<Task> apply_tasks(Run& r, TaskKind kind, std::size_t n, std::uint64_t seed, int required) {
        if (kind == TaskKind::phrase_review)
            throw ApiError(400, "bad_request", "phrase_review tasks are created by the bootstrap run");
        if (required < 1) throw ApiError(400, "bad_request", "required_annotators must be >= 1");
        auto tasks = sample_tasks(*data_.corpus, kind, n, seed, required);
        AnnotationStore next = r.store;
        for (const auto& t : tasks) {
            if (next.find(t.task_id)) throw ApiError(409, "conflict", "task '" + t.task_id + "' already exists");
            next.add_task(t);
        }
        r.store = std::move(next);
        ++r.version;
        publish(r);
        return tasks;
    }

    RecordOutcome apply_decision(Run& r, const Decision& d) {
        const Task* task = r.store.find(d.task_id);
        if (!task) throw ApiError(404, "not_found", "unknown task '" + d.task_id + "' in run '" + r.id + "'");
        if (task->kind == TaskKind::phrase_review) {
            const SeedPhrase* p = r.session->lexicon().find(task->subject);
            if (!p || p->status != PhraseStatus::candidate || r.session->finished())
                throw ApiError(409, "already_decided", "phrase '" + task->subject + "' is no longer under review");
        }
        const auto outcome = r.store.record(d);
        if (outcome == RecordOutcome::unchanged) return outcome;
        if (task->kind == TaskKind::phrase_review && r.store.complete(task->task_id)) {
            const auto label = resolve(*task, r.store.decisions_for(task->task_id));
            r.session->decide(task->subject, label && *label == "keep");
        }
        ++r.version;
        publish(r);
        return outcome;
    }

    /// Review tasks and example posts for every current candidate.
    void sync_candidates(Run& r) {
        for (const auto& p : r.session->pending()) {
            const std::string id = "phrase_review:" + p.text;
            if (!r.store.find(id))
                r.store.add_task(Task{id, TaskKind::phrase_review, p.text, r.config.review_annotators});
            if (!r.examples.count(p.text)) {
                auto& ex = r.examples[p.text];
                for (const Post* post : r.session->examples_for(p.text, options_.examples_per_phrase))
                    ex.emplace_back(post->id, post->text);
            }
        }
    }

    void publish(const Run& r) {
        auto v = std::make_shared<RunView>();
        v->run_id = r.id;
        v->status = r.status;
        v->iteration = r.session->iteration();
        v->version = r.version;
        v->stop_reason = r.session->stop_reason();
        v->error = r.error;
        v->config = r.config;
        v->lexicon = r.session->lexicon();
        v->reports = r.session->reports();
        v->store = r.store;
        v->examples = r.examples;
        std::unique_lock lock(views_mutex_);
        views_[r.id] = std::move(v);
    }

    void journal(const std::string& entity, nlohmann::ordered_json record) {
        if (journal_ && !replaying_) journal_->append(entity, std::move(record));
    }

    void replay(const std::vector<nlohmann::json>& records) {
        replaying_ = true;
        for (const auto& rec : records) {
            const std::string entity = rec.at("entity").get<std::string>();
            const std::string where = "journal seq " + rec.at("seq").dump();
            try {
                if (entity == "runs") {
                    const auto id = apply_create(run_config_from_json(rec.at("config")));
                    if (id != rec.at("run_id").get<std::string>())
                        throw InputError("run id mismatch (" + id + " vs " + rec.at("run_id").dump() + ")");
                    continue;
                }
                Run& r = run(rec.at("run_id").get<std::string>(), std::nullopt);
                if (entity == "transitions") {
                    if (rec.at("op") == "advance") apply_advance(r);
                    else apply_stop(r);
                } else if (entity == "lexicon") {
                    apply_review(r, rec.at("phrase").get<std::string>(), rec.at("decision") == "keep");
                } else if (entity == "tasks") {
                    auto kind = parse_task_kind(rec.at("kind").get<std::string>());
                    if (!kind) throw InputError("unknown task kind");
                    apply_tasks(r, *kind, rec.at("n").get<std::size_t>(), rec.at("seed").get<std::uint64_t>(),
                                rec.at("required_annotators").get<int>());
                } else if (entity == "decisions") {
                    apply_decision(r, decision_from_json(rec));
                }
            } catch (const nlohmann::json::exception& e) {
                throw InputError(where + ": " + e.what());
            } catch (const ApiError& e) {
                throw InputError(where + ": " + e.what());
            }
        }
        replaying_ = false;
    }

    // ---- routing ------------------------------------------------------------

    static ApiResponse json_response(int status, const nlohmann::ordered_json& body) {
        ApiResponse r;
        r.status = status;
        r.body = body.dump();
        return r;
    }

    static ApiResponse error(int status, const std::string& code, const std::string& message) {
        return json_response(status, {{"error", message}, {"code", code}});
    }

    static std::vector<std::string> split_path(const std::string& path) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : path) {
            if (c == '/') {
                if (!cur.empty()) parts.push_back(std::move(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) parts.push_back(std::move(cur));
        return parts;
    }

    static nlohmann::json parse_body(const ApiRequest& req) {
        if (req.body.empty()) return nlohmann::json::object();
        try {
            auto j = nlohmann::json::parse(req.body);
            if (!j.is_object()) throw ApiError(400, "bad_request", "request body must be a JSON object");
            return j;
        } catch (const nlohmann::json::parse_error& e) {
            throw ApiError(400, "bad_request", std::string("malformed JSON body: ") + e.what());
        }
    }

    static std::optional<std::uint64_t> if_match(const ApiRequest& req) {
        auto it = req.headers.find("if-match");
        if (it == req.headers.end()) return std::nullopt;
        std::string v = std::string(Corpus::trim(it->second));
        if (v.rfind("W/", 0) == 0) v = v.substr(2);
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
        try {
            std::size_t used = 0;
            const auto n = std::stoull(v, &used);
            if (used != v.size()) throw std::invalid_argument("trailing");
            return n;
        } catch (const std::exception&) {
            throw ApiError(400, "bad_request", "If-Match must be a run version number");
        }
    }

    static std::string query(const ApiRequest& req, const std::string& key) {
        auto it = req.query.find(key);
        return it == req.query.end() ? std::string{} : it->second;
    }

    static std::string string_field(const nlohmann::json& body, const char* key) {
        auto it = body.find(key);
        if (it == body.end() || it->is_null()) return {};
        if (!it->is_string()) throw ApiError(400, "bad_request", std::string("field '") + key + "' must be a string");
        return it->get<std::string>();
    }

    static std::string run_param(const ApiRequest& req, const nlohmann::json& body) {
        std::string id = string_field(body, "run_id");
        if (id.empty()) id = query(req, "run");
        if (id.empty()) throw ApiError(400, "bad_request", "missing run id ('run' query parameter or 'run_id' field)");
        return id;
    }

    ApiResponse run_response(int status, const RunView& v) const {
        auto r = json_response(status, run_json(v));
        r.headers["ETag"] = "\"" + std::to_string(v.version) + "\"";
        return r;
    }

    nlohmann::ordered_json phrase_json(const RunView& v, const SeedPhrase& p) const {
        auto j = to_json(p);
        nlohmann::ordered_json ex = nlohmann::ordered_json::array();
        if (auto it = v.examples.find(p.text); it != v.examples.end())
            for (const auto& [id, text] : it->second) ex.push_back({{"id", id}, {"text", text}});
        j["examples"] = std::move(ex);
        return j;
    }

    nlohmann::ordered_json task_json(const RunView& v, const Task& t) const {
        nlohmann::ordered_json j = to_json(t);
        j["progress"] = v.store.progress(t.task_id);
        if (t.kind == TaskKind::phrase_review) {
            if (const SeedPhrase* p = v.lexicon.find(t.subject)) j["phrase"] = phrase_json(v, *p);
        } else if (const Post* post = data_.corpus->find(t.subject)) {
            j["post"] = {{"id", post->id}, {"text", post->text}};
        }
        nlohmann::ordered_json labels = nlohmann::ordered_json::array();
        for (auto l : labels_for(t.kind)) labels.push_back(l);
        j["labels"] = std::move(labels);
        return j;
    }

    ApiResponse route(const ApiRequest& req) {
        const auto parts = split_path(req.path);
        const std::string& m = req.method;
        if (m == "OPTIONS") return ApiResponse{204, "", "", {}};

        if (parts.size() == 1 && parts[0] == "health" && m == "GET")
            return json_response(200, {{"status", "ok"}, {"posts", data_.corpus->size()}});

        if (!parts.empty() && parts[0] == "runs") {
            if (parts.size() == 1 && m == "GET") {
                nlohmann::ordered_json list = nlohmann::ordered_json::array();
                for (const auto& v : views()) list.push_back(run_json(*v));
                return json_response(200, {{"runs", std::move(list)}});
            }
            if (parts.size() == 1 && m == "POST") {
                const auto id = create_run(parse_body(req));
                auto r = run_response(201, *view(id));
                r.headers["Location"] = "/runs/" + id;
                return r;
            }
            if (parts.size() == 2 && m == "GET") return run_response(200, *view(parts[1]));
            if (parts.size() == 3 && m == "POST" && parts[2] == "advance")
                return run_response(200, *advance(parts[1], if_match(req)));
            if (parts.size() == 3 && m == "POST" && parts[2] == "stop")
                return run_response(200, *stop(parts[1], if_match(req)));
            if (parts.size() == 3 && m == "GET" && parts[2] == "reports") {
                const auto v = view(parts[1]);
                nlohmann::ordered_json list = nlohmann::ordered_json::array();
                for (const auto& rep : v->reports) list.push_back(to_json(rep));
                return json_response(200, {{"run_id", v->run_id}, {"reports", std::move(list)}});
            }
            if (parts.size() == 3 && m == "POST" && parts[2] == "tasks") {
                const auto body = parse_body(req);
                const auto kind = parse_task_kind(string_field(body, "kind"));
                if (!kind) throw ApiError(400, "bad_request", "kind must be informativeness or complaint");
                std::size_t n = 0;
                std::uint64_t seed = 0;
                int required = 2;
                try {
                    n = body.at("n").get<std::size_t>();
                    seed = body.value("seed", std::uint64_t{0});
                    required = body.value("required_annotators", 2);
                } catch (const nlohmann::json::exception& e) {
                    throw ApiError(400, "bad_request", e.what());
                }
                try {
                    const auto tasks = add_tasks(parts[1], *kind, n, seed, required, if_match(req));
                    nlohmann::ordered_json ids = nlohmann::ordered_json::array();
                    for (const auto& t : tasks) ids.push_back(t.task_id);
                    return json_response(201, {{"run_id", parts[1]}, {"created", std::move(ids)},
                                               {"version", view(parts[1])->version}});
                } catch (const ConfigError& e) {
                    throw ApiError(400, "bad_request", e.what());
                }
            }
        }

        if (parts.size() == 1 && parts[0] == "lexicon" && m == "GET") {
            const auto v = view(run_param(req, {}));
            const std::string status = query(req, "status");
            std::optional<PhraseStatus> filter;
            if (!status.empty()) {
                filter = parse_phrase_status(status);
                if (!filter) throw ApiError(400, "bad_request", "unknown status '" + status + "'");
            }
            nlohmann::ordered_json list = nlohmann::ordered_json::array();
            for (const auto& p : v->lexicon.phrases())
                if (!filter || p.status == *filter) list.push_back(phrase_json(*v, p));
            return json_response(200, {{"run_id", v->run_id},
                                       {"version", v->version},
                                       {"current_iteration", v->iteration},
                                       {"phrases", std::move(list)}});
        }
        if (parts.size() == 2 && parts[0] == "lexicon" && parts[1] == "review" && m == "POST") {
            const auto body = parse_body(req);
            const auto id = run_param(req, body);
            const auto phrase = string_field(body, "phrase");
            std::string decision = string_field(body, "decision");
            if (decision.empty()) decision = string_field(body, "action");
            if (phrase.empty()) throw ApiError(400, "bad_request", "missing 'phrase'");
            if (decision != "keep" && decision != "drop")
                throw ApiError(400, "bad_request", "'decision' must be 'keep' or 'drop'");
            const auto v = review(id, phrase, decision == "keep", if_match(req));
            return json_response(200, {{"run_id", id},
                                       {"phrase", phrase_json(*v, *v->lexicon.find(phrase))},
                                       {"version", v->version},
                                       {"pending_candidates", v->lexicon.count(PhraseStatus::candidate)}});
        }

        if (!parts.empty() && parts[0] == "tasks" && m == "GET") {
            const auto v = view(run_param(req, {}));
            if (parts.size() == 2 && parts[1] == "next") {
                std::string annotator = query(req, "annotator");
                if (annotator.empty()) annotator = header(req, "x-annotator-id");
                if (annotator.empty()) throw ApiError(400, "bad_request", "missing annotator id");
                std::optional<TaskKind> kind;
                if (const auto k = query(req, "kind"); !k.empty()) {
                    kind = parse_task_kind(k);
                    if (!kind) throw ApiError(400, "bad_request", "unknown task kind '" + k + "'");
                }
                for (const auto& t : v->store.tasks()) {
                    if (kind && t.kind != *kind) continue;
                    const auto& ds = v->store.decisions_for(t.task_id);
                    if (ds.size() >= static_cast<std::size_t>(t.required_annotators)) continue;
                    bool mine = false;
                    for (const auto& d : ds) mine = mine || d.annotator_id == annotator;
                    if (mine) continue;
                    if (t.kind == TaskKind::phrase_review) {
                        const SeedPhrase* p = v->lexicon.find(t.subject);
                        if (!p || p->status != PhraseStatus::candidate || v->status != RunStatus::awaiting_review)
                            continue;
                    }
                    auto j = task_json(*v, t);
                    j["run_id"] = v->run_id;
                    j["version"] = v->version;
                    return json_response(200, j);
                }
                return ApiResponse{204, "", "", {}};
            }
            if (parts.size() == 2) {
                const Task* t = v->store.find(parts[1]);
                if (!t) throw ApiError(404, "not_found", "unknown task '" + parts[1] + "' in run '" + v->run_id + "'");
                auto j = task_json(*v, *t);
                nlohmann::ordered_json ds = nlohmann::ordered_json::array();
                for (const auto& d : v->store.decisions_for(t->task_id)) ds.push_back(to_json(d));
                j["decisions"] = std::move(ds);
                j["complete"] = v->store.complete(t->task_id);
                return json_response(200, j);
            }
        }

        if (parts.size() == 1 && parts[0] == "decisions" && m == "POST") {
            const auto body = parse_body(req);
            const auto id = run_param(req, body);
            Decision d;
            d.task_id = string_field(body, "task_id");
            d.annotator_id = string_field(body, "annotator_id");
            if (d.annotator_id.empty()) d.annotator_id = header(req, "x-annotator-id");
            d.label = string_field(body, "label");
            d.decided_at = string_field(body, "decided_at");
            if (d.task_id.empty() || d.annotator_id.empty() || d.label.empty())
                throw ApiError(400, "bad_request", "task_id, annotator_id and label are required");
            view(id);  // 404 for unknown runs before validation of the task
            const auto outcome = record(id, d, if_match(req));
            const auto v = view(id);
            const Task* t = v->store.find(d.task_id);
            return json_response(outcome == RecordOutcome::unchanged ? 200 : 201,
                                 {{"run_id", id},
                                  {"task_id", d.task_id},
                                  {"outcome", outcome == RecordOutcome::inserted  ? "inserted"
                                              : outcome == RecordOutcome::updated ? "updated"
                                                                                  : "unchanged"},
                                  {"progress", v->store.progress(d.task_id)},
                                  {"required_annotators", t->required_annotators},
                                  {"complete", v->store.complete(d.task_id)},
                                  {"version", v->version}});
        }
        if (parts.size() == 1 && parts[0] == "decisions" && m == "GET") {
            const auto v = view(run_param(req, {}));
            const std::string annotator = query(req, "annotator");
            std::ostringstream out;
            export_decisions(out, annotator.empty() ? v->store.all_decisions() : v->store.decisions_by(annotator));
            return ApiResponse{200, out.str(), "application/x-ndjson", {}};
        }
        if (parts.size() == 1 && parts[0] == "agreement" && m == "GET") {
            const auto v = view(run_param(req, {}));
            const std::string a = query(req, "a"), b = query(req, "b");
            if (a.empty() || b.empty()) throw ApiError(400, "bad_request", "query parameters 'a' and 'b' are required");
            std::optional<TaskKind> kind;
            if (const auto k = query(req, "kind"); !k.empty()) {
                kind = parse_task_kind(k);
                if (!kind) throw ApiError(400, "bad_request", "unknown task kind '" + k + "'");
            }
            auto pick = [&](const std::string& who) {
                std::vector<Decision> out;
                for (auto& d : v->store.decisions_by(who))
                    if (!kind || v->store.find(d.task_id)->kind == *kind) out.push_back(std::move(d));
                return out;
            };
            try {
                return json_response(200, to_json(kappa(pick(a), pick(b))));
            } catch (const InputError& e) {
                throw ApiError(409, "no_overlap", e.what());
            }
        }
        throw ApiError(404, "not_found", "no route for " + m + " " + req.path);
    }

    static std::string header(const ApiRequest& req, const std::string& name) {
        auto it = req.headers.find(name);
        return it == req.headers.end() ? std::string{} : it->second;
    }

    ServiceData data_;
    ServiceOptions options_;
    std::mutex write_;
    mutable std::shared_mutex views_mutex_;
    std::map<std::string, std::shared_ptr<const RunView>> views_;
    std::map<std::string, std::unique_ptr<Run>> runs_;
    std::uint64_t next_run_ = 1;
    std::unique_ptr<Journal> journal_;
    bool replaying_ = false;
};

}  // namespace lexboot
