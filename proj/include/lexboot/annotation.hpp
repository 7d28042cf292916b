#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexboot/corpus.hpp"
#include "lexboot/error.hpp"
#include "lexboot/random.hpp"

namespace lexboot {

enum class TaskKind { informativeness, complaint, phrase_review };

inline std::string_view to_string(TaskKind k) {
    switch (k) {
        case TaskKind::informativeness: return "informativeness";
        case TaskKind::complaint: return "complaint";
        case TaskKind::phrase_review: return "phrase_review";
    }
    return "informativeness";
}

inline std::optional<TaskKind> parse_task_kind(std::string_view s) {
    if (s == "informativeness") return TaskKind::informativeness;
    if (s == "complaint") return TaskKind::complaint;
    if (s == "phrase_review") return TaskKind::phrase_review;
    return std::nullopt;
}

/// Legal labels per kind; the first one is the positive label.
inline const std::array<std::string_view, 2>& labels_for(TaskKind k) {
    static const std::array<std::string_view, 2> informative{"informative", "non_informative"};
    static const std::array<std::string_view, 2> complaint{"complaint", "non_complaint"};
    static const std::array<std::string_view, 2> review{"keep", "drop"};
    switch (k) {
        case TaskKind::informativeness: return informative;
        case TaskKind::complaint: return complaint;
        case TaskKind::phrase_review: return review;
    }
    return informative;
}

inline bool is_legal_label(TaskKind k, std::string_view label) {
    const auto& l = labels_for(k);
    return label == l[0] || label == l[1];
}

struct Task {
    std::string task_id;
    TaskKind kind = TaskKind::informativeness;
    std::string subject;  ///< post id, or phrase text for phrase_review
    int required_annotators = 2;

    friend bool operator==(const Task&, const Task&) = default;
};

struct Decision {
    std::string task_id;
    std::string annotator_id;
    std::string label;
    std::string decided_at;  ///< ISO-8601 UTC

    friend bool operator==(const Decision&, const Decision&) = default;
};

inline std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now()) {
    const std::time_t secs = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::ordered_json to_json(const Task& t) {
    return {{"task_id", t.task_id},
            {"kind", to_string(t.kind)},
            {"subject", t.subject},
            {"required_annotators", t.required_annotators}};
}

inline Task task_from_json(const nlohmann::json& j) {
    Task t;
    t.task_id = j.at("task_id").get<std::string>();
    auto kind = parse_task_kind(j.at("kind").get<std::string>());
    if (!kind) throw InputError("unknown task kind '" + j.at("kind").get<std::string>() + "'");
    t.kind = *kind;
    t.subject = j.at("subject").get<std::string>();
    t.required_annotators = j.value("required_annotators", 2);
    return t;
}

inline nlohmann::ordered_json to_json(const Decision& d) {
    return {{"task_id", d.task_id}, {"annotator_id", d.annotator_id}, {"label", d.label}, {"decided_at", d.decided_at}};
}

inline Decision decision_from_json(const nlohmann::json& j) {
    Decision d;
    d.task_id = j.at("task_id").get<std::string>();
    d.annotator_id = j.at("annotator_id").get<std::string>();
    d.label = j.at("label").get<std::string>();
    d.decided_at = j.value("decided_at", std::string{});
    return d;
}

enum class RecordOutcome { inserted, unchanged, updated };

/// Tasks and their decisions, in task insertion order. A plain value type:
/// concurrent users (the service) serialize writes and publish copies.
class AnnotationStore {
public:
    void add_task(Task task) {
        if (task.task_id.empty()) throw InputError("task_id must be non-empty");
        if (task.required_annotators < 1) throw InputError("required_annotators must be >= 1");
        if (index_.count(task.task_id)) throw StateError("duplicate task_id '" + task.task_id + "'");
        index_.emplace(task.task_id, tasks_.size());
        tasks_.push_back(std::move(task));
        decisions_.emplace_back();
    }

    const Task* find(const std::string& task_id) const {
        auto it = index_.find(task_id);
        return it == index_.end() ? nullptr : &tasks_[it->second];
    }

    /// Upsert per (task, annotator). NotFoundError for unknown tasks,
    /// InputError for illegal labels or an empty annotator id.
    RecordOutcome record(Decision d) {
        auto it = index_.find(d.task_id);
        if (it == index_.end()) throw NotFoundError("unknown task '" + d.task_id + "'");
        if (d.annotator_id.empty()) throw InputError("annotator_id must be non-empty");
        const Task& t = tasks_[it->second];
        if (!is_legal_label(t.kind, d.label))
            throw InputError("label '" + d.label + "' is not legal for " + std::string(to_string(t.kind)) + " tasks");
        if (d.decided_at.empty()) d.decided_at = utc_timestamp();
        auto& list = decisions_[it->second];
        for (auto& existing : list) {
            if (existing.annotator_id != d.annotator_id) continue;
            if (existing.label == d.label) return RecordOutcome::unchanged;
            existing = std::move(d);
            return RecordOutcome::updated;
        }
        list.push_back(std::move(d));
        return RecordOutcome::inserted;
    }

    const std::vector<Decision>& decisions_for(const std::string& task_id) const {
        auto it = index_.find(task_id);
        if (it == index_.end()) throw NotFoundError("unknown task '" + task_id + "'");
        return decisions_[it->second];
    }

    std::size_t progress(const std::string& task_id) const { return decisions_for(task_id).size(); }

    bool complete(const std::string& task_id) const {
        return progress(task_id) >= static_cast<std::size_t>(find(task_id)->required_annotators);
    }

    /// First task in insertion order that still needs annotators, was not
    /// decided by this annotator, and matches `kind` if given.
    const Task* next_task(const std::string& annotator, std::optional<TaskKind> kind = std::nullopt) const {
        for (std::size_t i = 0; i < tasks_.size(); ++i) {
            const auto& t = tasks_[i];
            if (kind && t.kind != *kind) continue;
            if (decisions_[i].size() >= static_cast<std::size_t>(t.required_annotators)) continue;
            const bool mine = std::any_of(decisions_[i].begin(), decisions_[i].end(),
                                          [&](const Decision& d) { return d.annotator_id == annotator; });
            if (!mine) return &t;
        }
        return nullptr;
    }

    /// All decisions by one annotator, in task order.
    std::vector<Decision> decisions_by(const std::string& annotator) const {
        std::vector<Decision> out;
        for (const auto& list : decisions_)
            for (const auto& d : list)
                if (d.annotator_id == annotator) out.push_back(d);
        return out;
    }

    std::vector<Decision> all_decisions() const {
        std::vector<Decision> out;
        for (const auto& list : decisions_) out.insert(out.end(), list.begin(), list.end());
        return out;
    }

    const std::vector<Task>& tasks() const noexcept { return tasks_; }
    std::size_t size() const noexcept { return tasks_.size(); }

private:
    std::vector<Task> tasks_;
    std::vector<std::vector<Decision>> decisions_;
    std::unordered_map<std::string, std::size_t> index_;
};

inline void export_decisions(std::ostream& out, const std::vector<Decision>& decisions) {
    for (const auto& d : decisions) out << to_json(d).dump() << '\n';
}

inline std::vector<Decision> import_decisions(std::istream& in, const std::string& origin = "<decisions>") {
    std::vector<Decision> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (Corpus::trim(line).empty()) continue;
        try {
            out.push_back(decision_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(origin + ":" + std::to_string(lineno) + ": malformed decision (" + e.what() + ")");
        }
    }
    return out;
}

/// Seeded uniform sample of posts without replacement, in draw order. Task
/// ids are "<kind>:<post id>".
inline std::vector<Task> sample_tasks(const Corpus& corpus, TaskKind kind, std::size_t n, std::uint64_t seed,
                                      int required_annotators = 2) {
    if (n > corpus.size())
        throw ConfigError("cannot sample " + std::to_string(n) + " tasks from " + std::to_string(corpus.size()) +
                          " posts");
    std::vector<Task> out;
    out.reserve(n);
    for (auto i : sample_indices(corpus.size(), n, seed)) {
        const auto& id = corpus[i].id;
        out.push_back(Task{std::string(to_string(kind)) + ":" + id, kind, id, required_annotators});
    }
    return out;
}

struct AgreementReport {
    double kappa = 0.0;
    double observed_agreement = 0.0;
    double expected_agreement = 0.0;
    std::size_t n_items = 0;
};

inline nlohmann::ordered_json to_json(const AgreementReport& r) {
    return {{"kappa", r.kappa},
            {"observed_agreement", r.observed_agreement},
            {"expected_agreement", r.expected_agreement},
            {"n_items", r.n_items}};
}

/// Cohen's kappa over the tasks both annotators decided. Computed from
/// integer counts as (n*agree - S) / (n^2 - S), S = sum over labels of
/// count_A(label) * count_B(label), so exact cases come out exact.
inline AgreementReport kappa(const std::vector<Decision>& a, const std::vector<Decision>& b) {
    std::map<std::string, const std::string*> by_task;
    for (const auto& d : a) by_task[d.task_id] = &d.label;
    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> marginals;
    std::uint64_t n = 0, agree = 0;
    for (const auto& d : b) {
        auto it = by_task.find(d.task_id);
        if (it == by_task.end()) continue;
        ++n;
        if (*it->second == d.label) ++agree;
        ++marginals[*it->second].first;
        ++marginals[d.label].second;
    }
    if (n == 0) throw InputError("no task was decided by both annotators");
    std::uint64_t s = 0;
    for (const auto& [label, counts] : marginals) s += counts.first * counts.second;
    AgreementReport r;
    r.n_items = static_cast<std::size_t>(n);
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    r.observed_agreement = static_cast<double>(agree) / static_cast<double>(n);
    r.expected_agreement = static_cast<double>(s) / nn;
    const std::uint64_t den = n * n - s;
    if (den == 0) {
        r.kappa = 1.0;  // both annotators used one and the same label throughout
    } else {
        const double num = static_cast<double>(n * agree) - static_cast<double>(s);
        r.kappa = num / static_cast<double>(den);
    }
    return r;
}

enum class ResolveRule { discard, tiebreak };

inline std::optional<ResolveRule> parse_resolve_rule(std::string_view s) {
    if (s == "discard") return ResolveRule::discard;
    if (s == "tiebreak") return ResolveRule::tiebreak;
    return std::nullopt;
}

/// Final label for a task, or nullopt when it is discarded. Unanimous
/// decisions give that label. On disagreement the discard rule drops the
/// task; the tiebreak rule takes the label of the third decision (the first
/// decision past the required count) when one exists.
inline std::optional<std::string> resolve(const Task& task, const std::vector<Decision>& decisions,
                                          ResolveRule rule = ResolveRule::discard) {
    const auto required = static_cast<std::size_t>(task.required_annotators);
    if (decisions.size() < required)
        throw StateError("task '" + task.task_id + "' has " + std::to_string(decisions.size()) + " of " +
                         std::to_string(required) + " decisions");
    std::vector<const Decision*> first;
    for (std::size_t i = 0; i < required; ++i) first.push_back(&decisions[i]);
    const bool unanimous = std::all_of(first.begin(), first.end(),
                                       [&](const Decision* d) { return d->label == first.front()->label; });
    if (unanimous) return first.front()->label;
    if (rule == ResolveRule::tiebreak && decisions.size() > required) return decisions[required].label;
    return std::nullopt;
}

}  // namespace lexboot
