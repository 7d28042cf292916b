#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexboot/error.hpp"
#include "lexboot/features/feature_vector.hpp"

namespace lexboot {

/// Row-sparse design matrix with named columns.
struct FeatureMatrix {
    using Row = std::vector<std::pair<std::uint32_t, double>>;  ///< sorted by column

    std::vector<std::string> names;
    std::vector<Row> rows;

    std::size_t n_rows() const noexcept { return rows.size(); }
    std::size_t n_cols() const noexcept { return names.size(); }

    /// Subset of rows, same columns.
    FeatureMatrix select(std::span<const std::size_t> idx) const {
        FeatureMatrix m;
        m.names = names;
        m.rows.reserve(idx.size());
        for (auto i : idx) m.rows.push_back(rows[i]);
        return m;
    }

    static FeatureMatrix from_dense(const std::vector<std::vector<double>>& dense, std::vector<std::string> names = {}) {
        FeatureMatrix m;
        const std::size_t cols = dense.empty() ? names.size() : dense.front().size();
        if (names.empty())
            for (std::size_t j = 0; j < cols; ++j) names.push_back("x" + std::to_string(j));
        m.names = std::move(names);
        for (const auto& r : dense) {
            if (r.size() != cols) throw InputError("dense matrix rows differ in length");
            Row row;
            for (std::size_t j = 0; j < cols; ++j)
                if (r[j] != 0.0) row.emplace_back(static_cast<std::uint32_t>(j), r[j]);
            m.rows.push_back(std::move(row));
        }
        return m;
    }
};

/// Flattens feature vectors ("group/feature" columns, sorted).
inline FeatureMatrix build_matrix(std::span<const FeatureVector> vectors) {
    std::set<std::string> names;
    for (const auto& fv : vectors)
        for (const auto& [g, values] : fv.groups)
            for (const auto& [k, v] : values) names.insert(g + "/" + k);
    FeatureMatrix m;
    m.names.assign(names.begin(), names.end());
    std::unordered_map<std::string, std::uint32_t> col;
    for (std::size_t j = 0; j < m.names.size(); ++j) col.emplace(m.names[j], static_cast<std::uint32_t>(j));
    for (const auto& fv : vectors) {
        FeatureMatrix::Row row;
        for (const auto& [name, v] : fv.flatten())
            if (v != 0.0) row.emplace_back(col.at(name), v);
        std::sort(row.begin(), row.end());
        m.rows.push_back(std::move(row));
    }
    return m;
}

/// Restricts each vector to one group before flattening.
inline FeatureMatrix build_matrix(std::span<const FeatureVector> vectors, const std::set<std::string>& groups) {
    std::vector<FeatureVector> filtered;
    filtered.reserve(vectors.size());
    for (const auto& fv : vectors) {
        FeatureVector f;
        f.post_id = fv.post_id;
        for (const auto& [g, values] : fv.groups)
            if (groups.count(g)) f.groups.emplace(g, values);
        filtered.push_back(std::move(f));
    }
    return build_matrix(filtered);
}

}  // namespace lexboot
