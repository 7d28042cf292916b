#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexboot/error.hpp"

namespace lexboot {

/// Append-only JSONL files, one per entity, in one directory. Every record
/// carries a global "seq" so the files can be merged back into one ordered
/// event stream on restart.
class Journal {
public:
    static constexpr const char* kEntities[] = {"runs", "transitions", "lexicon", "tasks", "decisions"};

    explicit Journal(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw InputError("cannot create journal directory '" + dir_.string() + "': " + ec.message());
    }

    const std::filesystem::path& dir() const noexcept { return dir_; }
    std::uint64_t last_seq() const noexcept { return seq_; }

    /// All records of all entities ordered by seq, each tagged with "entity".
    std::vector<nlohmann::json> load() {
        std::vector<nlohmann::json> out;
        for (const char* entity : kEntities) {
            std::ifstream in(path_of(entity));
            if (!in) continue;
            std::string line;
            std::size_t lineno = 0;
            while (std::getline(in, line)) {
                ++lineno;
                if (line.empty()) continue;
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(line);
                    j.at("seq").get<std::uint64_t>();
                } catch (const nlohmann::json::exception& e) {
                    throw InputError(path_of(entity).string() + ":" + std::to_string(lineno) +
                                     ": corrupt journal record (" + e.what() + ")");
                }
                j["entity"] = entity;
                out.push_back(std::move(j));
            }
        }
        std::stable_sort(out.begin(), out.end(), [](const nlohmann::json& a, const nlohmann::json& b) {
            return a["seq"].get<std::uint64_t>() < b["seq"].get<std::uint64_t>();
        });
        for (std::size_t i = 1; i < out.size(); ++i)
            if (out[i]["seq"] == out[i - 1]["seq"])
                throw InputError("journal has duplicate seq " + out[i]["seq"].dump());
        if (!out.empty()) seq_ = std::max(seq_, out.back()["seq"].get<std::uint64_t>());
        return out;
    }

    void append(const std::string& entity, nlohmann::ordered_json record) {
        nlohmann::ordered_json line;
        line["seq"] = ++seq_;
        for (auto& [k, v] : record.items()) line[k] = v;
        auto& out = stream(entity);
        out << line.dump() << '\n';
        out.flush();
        if (!out) throw std::runtime_error("journal write failed for '" + entity + "'");
    }

private:
    std::filesystem::path path_of(const std::string& entity) const { return dir_ / (entity + ".jsonl"); }

    std::ofstream& stream(const std::string& entity) {
        auto it = streams_.find(entity);
        if (it == streams_.end()) {
            std::ofstream out(path_of(entity), std::ios::app);
            if (!out) throw std::runtime_error("cannot open journal file " + path_of(entity).string());
            it = streams_.emplace(entity, std::move(out)).first;
        }
        return it->second;
    }

    std::filesystem::path dir_;
    std::uint64_t seq_ = 0;
    std::map<std::string, std::ofstream> streams_;
};

}  // namespace lexboot
