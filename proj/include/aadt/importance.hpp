#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aadt/forest.hpp"
#include "aadt/matrix.hpp"

namespace aadt {

struct ImportanceReport {
    std::string method;  // "mdi" | "pfi"
    std::vector<std::string> feature_names;
    std::vector<double> scores;      // per feature
    std::vector<double> normalized;  // sums to 1 when scores are nonnegative

    std::string to_json() const;
};

// Split-weighted impurity reduction per feature, averaged over trees; N is
// each tree's in-bag sample size.
ImportanceReport mdi(const QuantileForest& forest,
                     const std::vector<std::string>& feature_names);

// Drop in median-prediction pseudo-R^2 after permuting each feature column,
// averaged over repeats.
ImportanceReport pfi(const QuantileForest& forest, const Matrix& X, std::span<const double> y,
                     const std::vector<std::string>& feature_names, int repeats,
                     std::uint64_t seed, bool parallel = true);

// Descending by score; ties broken by feature name ascending.
std::vector<std::pair<std::string, double>> top_k(const ImportanceReport& report, std::size_t k);

}  // namespace aadt
