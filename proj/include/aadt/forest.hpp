#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aadt/matrix.hpp"

namespace aadt {

struct MaxFeatures {
    enum class Kind { Sqrt, Log2, Fraction };
    Kind kind = Kind::Fraction;
    double fraction = 1.0;  // used when kind == Fraction

    // number of split candidates for d features; floor, minimum 1
    int resolve(int d) const;

    static MaxFeatures sqrt() { return {Kind::Sqrt, 0.0}; }
    static MaxFeatures log2() { return {Kind::Log2, 0.0}; }
    static MaxFeatures frac(double f) { return {Kind::Fraction, f}; }

    std::string str() const;
    static MaxFeatures parse(const std::string& s);
};

struct TreeParams {
    int max_depth = 50;
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    MaxFeatures max_features = MaxFeatures::frac(1.0);
};

struct ForestParams {
    int n_estimators = 100;
    TreeParams tree;
    bool bootstrap = true;
    std::uint64_t seed = 42;
};

struct TreeNode {
    int feature = -1;  // -1 for leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int n_samples = 0;
    double impurity = 0.0;   // node MSE on the tree sample
    double leaf_mean = 0.0;  // valid for leaves
    int payload_begin = 0;   // leaf payload range into RegressionTree::leaf_values
    int payload_end = 0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;
    std::vector<double> leaf_values;  // in-bag targets grouped by leaf

    // index of the leaf node x falls into
    int find_leaf(std::span<const double> x) const;
    double predict(std::span<const double> x) const;
};

struct QuantileForest {
    std::vector<RegressionTree> trees;
    ForestParams params;
    std::size_t n_features = 0;
    double y_min = 0.0;
    double y_max = 0.0;
    bool log_scale = false;
};

struct PredictionInterval {
    double lower = 0.0;
    double median = 0.0;
    double upper = 0.0;
    double coverage_level = 0.0;
};

RegressionTree fit_tree(const Matrix& X, std::span<const double> y, const TreeParams& params,
                        std::uint64_t seed);

QuantileForest fit_forest(const Matrix& X, std::span<const double> y, const ForestParams& params,
                          bool parallel = true);

double predict_mean(const QuantileForest& forest, std::span<const double> x);

// Weighted empirical conditional CDF support points. Elementary pairs are
// gathered tree by tree and stably sorted by value; weights sum to 1.
std::vector<std::pair<double, double>> conditional_cdf_pairs(const QuantileForest& forest,
                                                             std::span<const double> x);
// Same support with equal values merged.
std::vector<std::pair<double, double>> conditional_cdf(const QuantileForest& forest,
                                                       std::span<const double> x);

double predict_quantile(const QuantileForest& forest, std::span<const double> x, double q);

PredictionInterval predict_interval(const QuantileForest& forest, std::span<const double> x,
                                    double coverage);

std::vector<PredictionInterval> predict_intervals(const QuantileForest& forest, const Matrix& X,
                                                  double coverage, bool parallel = true);
std::vector<double> predict_medians(const QuantileForest& forest, const Matrix& X,
                                    bool parallel = true);

std::string forest_to_json(const QuantileForest& forest);
QuantileForest forest_from_json(const std::string& text);

namespace reference {
QuantileForest fit_forest_serial(const Matrix& X, std::span<const double> y,
                                 const ForestParams& params);
}

}  // namespace aadt
