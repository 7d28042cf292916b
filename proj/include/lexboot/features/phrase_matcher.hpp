#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexboot/corpus.hpp"

namespace lexboot {

/// Greedy longest-match scanner over token lists. Each entry is a normalized
/// phrase with a payload; overlapping matches are resolved left to right,
/// longest first, so "thank you" counts once rather than also as "thank".
template <typename Payload>
class PhraseMatcher {
public:
    struct Match {
        std::size_t position;
        std::size_t length;
        const Payload* payload;
    };

    /// Later entries with the same phrase replace earlier ones.
    void add(const std::string& phrase, Payload payload) {
        auto toks = tokenize(normalize(phrase));
        if (toks.empty()) return;
        max_len_ = std::max(max_len_, toks.size());
        std::string key = join(toks, 0, toks.size());
        entries_[std::move(key)] = std::move(payload);
    }

    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }

    const Payload* find(const std::string& phrase) const {
        auto it = entries_.find(phrase);
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::vector<Match> scan(const std::vector<std::string>& tokens) const {
        std::vector<Match> out;
        std::size_t i = 0;
        while (i < tokens.size()) {
            bool hit = false;
            for (std::size_t len = std::min(max_len_, tokens.size() - i); len >= 1; --len) {
                auto it = entries_.find(join(tokens, i, len));
                if (it != entries_.end()) {
                    out.push_back(Match{i, len, &it->second});
                    i += len;
                    hit = true;
                    break;
                }
            }
            if (!hit) ++i;
        }
        return out;
    }

    /// Matches that start at `position` only (longest first).
    const Payload* match_at(const std::vector<std::string>& tokens, std::size_t position,
                            std::size_t* length = nullptr) const {
        for (std::size_t len = std::min(max_len_, tokens.size() - position); len >= 1; --len) {
            auto it = entries_.find(join(tokens, position, len));
            if (it != entries_.end()) {
                if (length) *length = len;
                return &it->second;
            }
        }
        return nullptr;
    }

private:
    static std::string join(const std::vector<std::string>& toks, std::size_t from, std::size_t len) {
        std::string s = toks[from];
        for (std::size_t k = from + 1; k < from + len; ++k) {
            s.push_back(' ');
            s += toks[k];
        }
        return s;
    }

    std::unordered_map<std::string, Payload> entries_;
    std::size_t max_len_ = 0;
};

}  // namespace lexboot
