#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexboot/corpus.hpp"
#include "lexboot/error.hpp"
#include "lexboot/random.hpp"

namespace lexboot {

/// Token vectors, sorted by token so that clustering is independent of file order.
struct Embeddings {
    std::vector<std::string> tokens;
    std::vector<std::vector<double>> vectors;
    std::size_t dim = 0;
};

/// `token v1 v2 ... vd` per line. A leading word2vec-style "count dim" header is skipped.
inline Embeddings parse_embeddings(std::istream& in, const std::string& origin = "<embeddings>") {
    std::map<std::string, std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::string token;
        if (!(ss >> token)) continue;
        std::vector<double> v;
        std::string field;
        while (ss >> field) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(field, &used));
                if (used != field.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw InputError(origin + ":" + std::to_string(lineno) + ": bad number '" + field + "'");
            }
        }
        if (lineno == 1 && v.size() == 1 && token.find_first_not_of("0123456789") == std::string::npos) continue;
        if (v.empty()) throw InputError(origin + ":" + std::to_string(lineno) + ": token without vector");
        for (double x : v)
            if (!std::isfinite(x)) throw InputError(origin + ":" + std::to_string(lineno) + ": non-finite value");
        if (dim == 0) dim = v.size();
        if (v.size() != dim)
            throw InputError(origin + ":" + std::to_string(lineno) + ": expected " + std::to_string(dim) +
                             " dimensions, got " + std::to_string(v.size()));
        rows[normalize(token)] = std::move(v);
    }
    Embeddings e;
    e.dim = dim;
    for (auto& [tok, v] : rows) {
        if (tok.empty()) continue;
        e.tokens.push_back(tok);
        e.vectors.push_back(std::move(v));
    }
    if (e.tokens.empty()) throw InputError(origin + ": no embedding vectors");
    return e;
}

inline Embeddings load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open embeddings '" + path.string() + "'");
    return parse_embeddings(in, path.string());
}

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

struct KMeansResult {
    std::vector<std::size_t> assignment;
    std::vector<std::vector<double>> centroids;
    int iterations = 0;
};

/// Lloyd's k-means with farthest-point initialization: the first centre is
/// point bounded(rng(seed), n); each next centre is the point with the largest
/// squared distance to its nearest chosen centre (lowest index on ties).
/// Assignment ties go to the lowest cluster id; an empty cluster keeps its
/// previous centre. Stops when assignments no longer change.
inline KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k, std::uint64_t seed,
                           int max_iterations = 100) {
    const std::size_t n = points.size();
    if (k < 2) throw ConfigError("k-means needs K >= 2");
    if (k > n) throw ConfigError("k-means: K=" + std::to_string(k) + " exceeds " + std::to_string(n) + " points");
    KMeansResult r;
    Rng rng = make_rng(seed);
    std::vector<std::size_t> chosen{static_cast<std::size_t>(bounded(rng, n))};
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (chosen.size() < k) {
        const auto& c = points[chosen.back()];
        std::size_t best = 0;
        double best_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(points[i], c));
            if (nearest[i] > best_d) {
                best_d = nearest[i];
                best = i;
            }
        }
        chosen.push_back(best);
    }
    for (auto i : chosen) r.centroids.push_back(points[i]);

    r.assignment.assign(n, std::numeric_limits<std::size_t>::max());
    const std::size_t dim = points.front().size();
    for (int it = 0; it < max_iterations; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = squared_distance(points[i], r.centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (r.assignment[i] != best) {
                r.assignment[i] = best;
                changed = true;
            }
        }
        r.iterations = it + 1;
        if (!changed) break;
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[r.assignment[i]];
            for (std::size_t d = 0; d < dim; ++d) sums[r.assignment[i]][d] += points[i][d];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t d = 0; d < dim; ++d) r.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
    }
    return r;
}

/// token -> cluster id in [0, K).
class EmbeddingClusterModel {
public:
    EmbeddingClusterModel() = default;

    EmbeddingClusterModel(std::unordered_map<std::string, std::size_t> clusters, std::size_t k)
        : clusters_(std::move(clusters)), k_(k) {
        if (k_ < 2) throw ConfigError("cluster model needs K >= 2");
        for (const auto& [tok, c] : clusters_)
            if (c >= k_) throw InputError("cluster id out of range for token '" + tok + "'");
    }

    static EmbeddingClusterModel fit(const Embeddings& e, std::size_t k, std::uint64_t seed) {
        const auto result = kmeans(e.vectors, k, seed);
        std::unordered_map<std::string, std::size_t> m;
        for (std::size_t i = 0; i < e.tokens.size(); ++i) m.emplace(e.tokens[i], result.assignment[i]);
        return EmbeddingClusterModel(std::move(m), k);
    }

    std::size_t k() const noexcept { return k_; }
    std::size_t size() const noexcept { return clusters_.size(); }
    bool empty() const noexcept { return clusters_.empty(); }

    std::optional<std::size_t> cluster_of(const std::string& token) const {
        auto it = clusters_.find(token);
        if (it == clusters_.end()) return std::nullopt;
        return it->second;
    }

    const std::unordered_map<std::string, std::size_t>& clusters() const noexcept { return clusters_; }

private:
    std::unordered_map<std::string, std::size_t> clusters_;
    std::size_t k_ = 0;
};

/// Count-based embeddings for corpora without a pretrained file: random
/// indexing over a symmetric context window. Each token gets a sparse ternary
/// index vector derived from (seed, token); its embedding is the L2-normalized
/// sum of its neighbours' index vectors. Tokens seen fewer than `min_count`
/// times, punctuation and placeholders are skipped.
inline Embeddings random_index_embeddings(const std::vector<std::vector<std::string>>& docs, std::size_t dim = 64,
                                          std::size_t window = 2, std::uint64_t seed = 7, std::size_t min_count = 2) {
    auto index_vector = [&](const std::string& token) {
        std::uint64_t h = 1469598103934665603ULL ^ seed;
        for (unsigned char c : token) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        Rng rng = make_rng(h);
        std::vector<std::pair<std::size_t, double>> nz;
        for (int i = 0; i < 4; ++i)
            nz.emplace_back(static_cast<std::size_t>(bounded(rng, dim)), (rng() & 1) ? 1.0 : -1.0);
        return nz;
    };
    std::map<std::string, std::size_t> counts;
    for (const auto& d : docs)
        for (const auto& t : d)
            if (!is_excluded(t)) ++counts[t];
    std::map<std::string, std::vector<double>> ctx;
    std::unordered_map<std::string, std::vector<std::pair<std::size_t, double>>> cache;
    for (const auto& d : docs) {
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (is_excluded(d[i]) || counts[d[i]] < min_count) continue;
            auto& v = ctx[d[i]];
            if (v.empty()) v.assign(dim, 0.0);
            const std::size_t lo = i >= window ? i - window : 0;
            const std::size_t hi = std::min(d.size(), i + window + 1);
            for (std::size_t j = lo; j < hi; ++j) {
                if (j == i || is_excluded(d[j])) continue;
                auto it = cache.find(d[j]);
                if (it == cache.end()) it = cache.emplace(d[j], index_vector(d[j])).first;
                for (const auto& [pos, val] : it->second) v[pos] += val;
            }
        }
    }
    Embeddings e;
    e.dim = dim;
    for (auto& [tok, v] : ctx) {
        double norm = 0.0;
        for (double x : v) norm += x * x;
        if (norm == 0.0) continue;
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        e.tokens.push_back(tok);
        e.vectors.push_back(std::move(v));
    }
    return e;
}

inline void write_embeddings(std::ostream& out, const Embeddings& e) {
    out.precision(17);
    for (std::size_t i = 0; i < e.tokens.size(); ++i) {
        out << e.tokens[i];
        for (double x : e.vectors[i]) out << ' ' << x;
        out << '\n';
    }
}

}  // namespace lexboot
