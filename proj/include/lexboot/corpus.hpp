#pragma once

#include <cstddef>
#include <fstream>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexboot/error.hpp"
#include "lexboot/utf8.hpp"

namespace lexboot {

enum class Source { twitter, forum, synthetic };

inline std::string_view to_string(Source s) {
    switch (s) {
        case Source::twitter: return "twitter";
        case Source::forum: return "forum";
        case Source::synthetic: return "synthetic";
    }
    return "twitter";
}

inline std::optional<Source> parse_source(std::string_view s) {
    if (s == "twitter") return Source::twitter;
    if (s == "forum") return Source::forum;
    if (s == "synthetic") return Source::synthetic;
    return std::nullopt;
}

struct Post {
    std::string id;
    std::string text;
    Source source = Source::twitter;
    std::optional<bool> informative;  ///< true = informative, false = non_informative
    std::optional<bool> complaint;    ///< true = complaint, false = non_complaint

    friend bool operator==(const Post&, const Post&) = default;
};

/// Posts in insertion order with unique ids. Immutable once built.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::string name) : name_(std::move(name)) {}

    Corpus(std::string name, std::vector<Post> posts) : name_(std::move(name)) {
        posts_.reserve(posts.size());
        for (auto& p : posts) add(std::move(p));
    }

    /// Throws InputError on an empty id, blank text or duplicate id.
    void add(Post post) {
        if (post.id.empty()) throw InputError("post id must be non-empty");
        if (trim(post.text).empty()) throw InputError("post '" + post.id + "' has empty text");
        auto [it, inserted] = index_.emplace(post.id, posts_.size());
        if (!inserted) throw InputError("duplicate post id '" + post.id + "'");
        posts_.push_back(std::move(post));
    }

    const std::string& name() const noexcept { return name_; }
    std::size_t size() const noexcept { return posts_.size(); }
    bool empty() const noexcept { return posts_.empty(); }
    const std::vector<Post>& posts() const noexcept { return posts_; }
    const Post& operator[](std::size_t i) const { return posts_[i]; }
    auto begin() const noexcept { return posts_.begin(); }
    auto end() const noexcept { return posts_.end(); }

    const Post* find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        return it == index_.end() ? nullptr : &posts_[it->second];
    }

    /// Subset in this corpus' order.
    template <typename Pred>
    Corpus filter(Pred pred, std::string name = {}) const {
        Corpus out(name.empty() ? name_ : std::move(name));
        for (const auto& p : posts_)
            if (pred(p)) out.add(p);
        return out;
    }

    static std::string_view trim(std::string_view s) {
        const auto first = s.find_first_not_of(" \t\r\n\v\f");
        if (first == std::string_view::npos) return {};
        const auto last = s.find_last_not_of(" \t\r\n\v\f");
        return s.substr(first, last - first + 1);
    }

private:
    std::string name_;
    std::vector<Post> posts_;
    std::unordered_map<std::string, std::size_t> index_;
};

// --------------------------------------------------------------------------
// Normalization and tokenization
// --------------------------------------------------------------------------

inline constexpr std::string_view kUrlToken = "<url>";
inline constexpr std::string_view kUserToken = "<user>";

namespace detail {

inline bool starts_with_at(const std::u32string& s, std::size_t i, std::u32string_view prefix) {
    return s.size() >= i + prefix.size() && std::u32string_view(s).substr(i, prefix.size()) == prefix;
}

}  // namespace detail

/// Canonical form used for matching and n-gram extraction: case-folded,
/// URLs -> `<url>`, @-mentions -> `<user>`, `#tag` -> `tag`, every
/// punctuation character a separate token, single spaces, trimmed.
/// Idempotent.
inline std::string normalize(std::string_view text) {
    const std::u32string raw = utf8::decode(text);
    std::u32string s;
    s.reserve(raw.size());
    for (char32_t c : raw) s.push_back(utf8::fold(c));

    std::string out;
    std::string word;
    auto emit = [&](std::string_view tok) {
        if (tok.empty()) return;
        if (!out.empty()) out.push_back(' ');
        out.append(tok);
    };
    auto flush = [&] {
        emit(word);
        word.clear();
    };

    const std::size_t n = s.size();
    std::size_t i = 0;
    while (i < n) {
        const char32_t c = s[i];
        const bool at_boundary = word.empty();
        if (utf8::is_space(c)) {
            flush();
            ++i;
            continue;
        }
        if (c == U'<') {
            if (detail::starts_with_at(s, i, U"<url>")) {
                flush();
                emit(kUrlToken);
                i += 5;
                continue;
            }
            if (detail::starts_with_at(s, i, U"<user>")) {
                flush();
                emit(kUserToken);
                i += 6;
                continue;
            }
        }
        if (at_boundary) {
            std::size_t prefix = 0;
            if (detail::starts_with_at(s, i, U"http://")) prefix = 7;
            else if (detail::starts_with_at(s, i, U"https://")) prefix = 8;
            else if (detail::starts_with_at(s, i, U"www.")) prefix = 4;
            if (prefix > 0 && i + prefix < n && !utf8::is_space(s[i + prefix])) {
                std::size_t j = i + prefix;
                while (j < n && !utf8::is_space(s[j])) ++j;
                emit(kUrlToken);
                i = j;
                continue;
            }
            if (c == U'@' && i + 1 < n && utf8::is_word(s[i + 1])) {
                std::size_t j = i + 1;
                while (j < n && utf8::is_word(s[j])) ++j;
                emit(kUserToken);
                i = j;
                continue;
            }
            if (c == U'#' && i + 1 < n && utf8::is_word(s[i + 1])) {
                ++i;  // drop the marker, keep the tag as a word
                continue;
            }
        }
        if (utf8::is_punct(c)) {
            flush();
            std::string p;
            utf8::append(p, c);
            emit(p);
            ++i;
            continue;
        }
        utf8::append(word, c);
        ++i;
    }
    flush();
    return out;
}

inline std::vector<std::string> tokenize(std::string_view normalized_text) {
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (start <= normalized_text.size()) {
        std::size_t end = normalized_text.find(' ', start);
        if (end == std::string_view::npos) end = normalized_text.size();
        if (end > start) tokens.emplace_back(normalized_text.substr(start, end - start));
        start = end + 1;
    }
    return tokens;
}

inline bool is_placeholder(std::string_view tok) { return tok == kUrlToken || tok == kUserToken; }

/// A token produced from a single punctuation character.
inline bool is_punct_token(std::string_view tok) {
    const auto cps = utf8::decode(tok);
    return cps.size() == 1 && utf8::is_punct(cps[0]);
}

/// Tokens that never take part in n-grams.
inline bool is_excluded(std::string_view tok) { return is_placeholder(tok) || is_punct_token(tok); }

/// Contiguous n-token windows, never spanning a punctuation or placeholder token.
inline std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int n) {
    if (n < 1) throw ConfigError("n-gram order must be >= 1, got " + std::to_string(n));
    std::vector<std::string> out;
    const auto order = static_cast<std::size_t>(n);
    std::size_t run = 0;  // length of the current run of includable tokens
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (is_excluded(tokens[i])) {
            run = 0;
            continue;
        }
        ++run;
        if (run >= order) {
            std::string gram = tokens[i + 1 - order];
            for (std::size_t k = i + 2 - order; k <= i; ++k) {
                gram.push_back(' ');
                gram += tokens[k];
            }
            out.push_back(std::move(gram));
        }
    }
    return out;
}

/// Pipeline contexts only accept orders 1..3.
inline void check_pipeline_order(int n) {
    if (n < 1 || n > 3) throw ConfigError("n-gram order must be in {1,2,3}, got " + std::to_string(n));
}

struct TokenizedPost {
    std::string post_id;
    std::vector<std::string> tokens;
    std::string raw_text;
};

inline TokenizedPost tokenize_post(const Post& post) {
    return TokenizedPost{post.id, tokenize(normalize(post.text)), post.text};
}

inline std::vector<TokenizedPost> tokenize_corpus(const Corpus& corpus) {
    std::vector<TokenizedPost> out;
    out.reserve(corpus.size());
    for (const auto& p : corpus) out.push_back(tokenize_post(p));
    return out;
}

/// True if `phrase` occurs in `tokens` as a contiguous token subsequence.
inline bool contains_phrase(const std::vector<std::string>& tokens,
                            const std::vector<std::string>& phrase) {
    if (phrase.empty() || phrase.size() > tokens.size()) return false;
    for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
        std::size_t k = 0;
        while (k < phrase.size() && tokens[i + k] == phrase[k]) ++k;
        if (k == phrase.size()) return true;
    }
    return false;
}

// --------------------------------------------------------------------------
// Ingestion and export
// --------------------------------------------------------------------------

enum class Format { jsonl, csv };

inline std::optional<Format> parse_format(std::string_view s) {
    if (s == "jsonl") return Format::jsonl;
    if (s == "csv") return Format::csv;
    return std::nullopt;
}

/// jsonl unless the extension is .csv.
inline Format format_for(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? Format::csv : Format::jsonl;
}

namespace detail {

struct PendingRecord {
    Post post;
    std::size_t line = 0;
};

inline Corpus assemble(std::string name, std::vector<PendingRecord> records, const std::string& origin) {
    if (records.empty()) throw InputError(origin + ": no records (empty file)");
    std::unordered_map<std::string, std::size_t> first_line;
    Corpus corpus(std::move(name));
    for (auto& r : records) {
        auto [it, inserted] = first_line.emplace(r.post.id, r.line);
        if (!inserted) {
            throw InputError(origin + ": duplicate id '" + r.post.id + "' on lines " +
                             std::to_string(it->second) + " and " + std::to_string(r.line));
        }
        if (Corpus::trim(r.post.text).empty())
            throw InputError(origin + ":" + std::to_string(r.line) + ": text is empty");
        corpus.add(std::move(r.post));
    }
    return corpus;
}

inline std::optional<bool> json_label(const nlohmann::json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_boolean()) throw InputError(where + ": field '" + key + "' must be true, false or null");
    return it->get<bool>();
}

inline std::optional<bool> csv_label(std::string_view v, const char* key, const std::string& where) {
    std::string s(v);
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (s.empty()) return std::nullopt;
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw InputError(where + ": column '" + key + "' must be true, false or empty, got '" + std::string(v) + "'");
}

}  // namespace detail

inline Corpus parse_jsonl(std::istream& in, std::string name, const std::string& origin = "<jsonl>") {
    std::vector<detail::PendingRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (Corpus::trim(line).empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError(where + ": malformed JSON record (" + e.what() + ")");
        }
        if (!obj.is_object()) throw InputError(where + ": record must be a JSON object");
        auto id = obj.find("id");
        auto text = obj.find("text");
        if (id == obj.end() || !id->is_string() || id->get<std::string>().empty())
            throw InputError(where + ": missing or non-string 'id'");
        if (text == obj.end() || !text->is_string()) throw InputError(where + ": missing or non-string 'text'");
        Post p;
        p.id = id->get<std::string>();
        p.text = text->get<std::string>();
        if (auto src = obj.find("source"); src != obj.end() && !src->is_null()) {
            if (!src->is_string()) throw InputError(where + ": 'source' must be a string");
            auto parsed = parse_source(src->get<std::string>());
            if (!parsed) throw InputError(where + ": unknown source '" + src->get<std::string>() + "'");
            p.source = *parsed;
        }
        p.informative = detail::json_label(obj, "informative", where);
        p.complaint = detail::json_label(obj, "complaint", where);
        records.push_back({std::move(p), lineno});
    }
    return detail::assemble(std::move(name), std::move(records), origin);
}

/// RFC-4180 reader. Each row carries the physical line it starts on.
inline std::vector<std::pair<std::size_t, std::vector<std::string>>> read_csv_rows(std::istream& in,
                                                                                     const std::string& origin) {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = data.size();
    while (i < n) {
        const std::size_t row_line = line;
        std::vector<std::string> fields;
        std::string field;
        bool row_done = false;
        while (!row_done) {
            if (i < n && data[i] == '"') {
                ++i;
                while (true) {
                    if (i >= n) throw InputError(origin + ":" + std::to_string(row_line) + ": unterminated quoted field");
                    if (data[i] == '"') {
                        if (i + 1 < n && data[i + 1] == '"') {
                            field.push_back('"');
                            i += 2;
                            continue;
                        }
                        ++i;
                        break;
                    }
                    if (data[i] == '\n') ++line;
                    field.push_back(data[i++]);
                }
                if (i < n && data[i] != ',' && data[i] != '\n' && data[i] != '\r')
                    throw InputError(origin + ":" + std::to_string(line) + ": unexpected character after closing quote");
            } else {
                while (i < n && data[i] != ',' && data[i] != '\n' && data[i] != '\r') {
                    if (data[i] == '"')
                        throw InputError(origin + ":" + std::to_string(line) + ": quote inside unquoted field");
                    field.push_back(data[i++]);
                }
            }
            fields.push_back(std::move(field));
            field.clear();
            if (i >= n) {
                row_done = true;
            } else if (data[i] == ',') {
                ++i;
            } else {
                if (data[i] == '\r') ++i;
                if (i < n && data[i] == '\n') ++i;
                ++line;
                row_done = true;
            }
        }
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        rows.emplace_back(row_line, std::move(fields));
    }
    return rows;
}

inline Corpus parse_csv(std::istream& in, std::string name, const std::string& origin = "<csv>") {
    auto rows = read_csv_rows(in, origin);
    if (rows.empty()) throw InputError(origin + ": no records (empty file)");
    const auto& header = rows.front().second;
    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t c = 0; c < header.size(); ++c) {
        std::string h = header[c];
        if (c == 0 && h.rfind("\xEF\xBB\xBF", 0) == 0) h.erase(0, 3);
        col[h] = c;
    }
    if (!col.count("id") || !col.count("text"))
        throw InputError(origin + ":1: header must contain 'id' and 'text' (expected id,text,source,informative,complaint)");
    auto get = [&](const std::vector<std::string>& row, const char* key) -> std::string_view {
        auto it = col.find(key);
        if (it == col.end() || it->second >= row.size()) return {};
        return row[it->second];
    };
    std::vector<detail::PendingRecord> records;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& [lineno, row] = rows[r];
        const std::string where = origin + ":" + std::to_string(lineno);
        if (row.size() != header.size())
            throw InputError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                             std::to_string(row.size()));
        Post p;
        p.id = std::string(get(row, "id"));
        p.text = std::string(get(row, "text"));
        if (p.id.empty()) throw InputError(where + ": empty id");
        if (!utf8::is_valid(p.text) || !utf8::is_valid(p.id)) throw InputError(where + ": invalid UTF-8");
        if (auto src = get(row, "source"); !src.empty()) {
            auto parsed = parse_source(src);
            if (!parsed) throw InputError(where + ": unknown source '" + std::string(src) + "'");
            p.source = *parsed;
        }
        p.informative = detail::csv_label(get(row, "informative"), "informative", where);
        p.complaint = detail::csv_label(get(row, "complaint"), "complaint", where);
        records.push_back({std::move(p), lineno});
    }
    return detail::assemble(std::move(name), std::move(records), origin);
}

/// Reads a corpus file. Errors name the file and line.
inline Corpus ingest(const std::filesystem::path& path, Format format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open corpus file '" + path.string() + "'");
    const std::string name = path.stem().string();
    return format == Format::csv ? parse_csv(in, name, path.string()) : parse_jsonl(in, name, path.string());
}

inline Corpus ingest(const std::filesystem::path& path) { return ingest(path, format_for(path)); }

inline nlohmann::ordered_json to_json(const Post& p) {
    nlohmann::ordered_json j;
    j["id"] = p.id;
    j["text"] = p.text;
    j["source"] = to_string(p.source);
    j["informative"] = p.informative ? nlohmann::ordered_json(*p.informative) : nlohmann::ordered_json(nullptr);
    j["complaint"] = p.complaint ? nlohmann::ordered_json(*p.complaint) : nlohmann::ordered_json(nullptr);
    return j;
}

/// Canonical JSONL: fixed field order, UTF-8 passed through unescaped.
inline void write_jsonl(std::ostream& out, const Corpus& corpus) {
    for (const auto& p : corpus) out << to_json(p).dump(-1, ' ', false) << '\n';
}

namespace detail {

inline std::string csv_field(std::string_view v) {
    if (v.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(v);
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string csv_label(const std::optional<bool>& v) { return v ? (*v ? "true" : "false") : ""; }

}  // namespace detail

inline void write_csv(std::ostream& out, const Corpus& corpus) {
    out << "id,text,source,informative,complaint\n";
    for (const auto& p : corpus) {
        out << detail::csv_field(p.id) << ',' << detail::csv_field(p.text) << ',' << to_string(p.source) << ','
            << detail::csv_label(p.informative) << ',' << detail::csv_label(p.complaint) << '\n';
    }
}

inline void export_corpus(const std::filesystem::path& path, const Corpus& corpus, Format format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    if (format == Format::csv) write_csv(out, corpus);
    else write_jsonl(out, corpus);
}

struct LabelCounts {
    std::size_t informative = 0;
    std::size_t non_informative = 0;
    std::size_t complaint = 0;
    std::size_t non_complaint = 0;
};

inline LabelCounts count_labels(const Corpus& corpus) {
    LabelCounts c;
    for (const auto& p : corpus) {
        if (p.informative) ++(*p.informative ? c.informative : c.non_informative);
        if (p.complaint) ++(*p.complaint ? c.complaint : c.non_complaint);
    }
    return c;
}

}  // namespace lexboot
