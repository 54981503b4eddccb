#include "aadt/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "aadt/rng.hpp"

namespace aadt {

int MaxFeatures::resolve(int d) const {
    int m;
    switch (kind) {
        case Kind::Sqrt: m = static_cast<int>(std::floor(std::sqrt(static_cast<double>(d)))); break;
        case Kind::Log2: m = static_cast<int>(std::floor(std::log2(static_cast<double>(d)))); break;
        case Kind::Fraction:
            if (fraction <= 0.0 || fraction > 1.0)
                throw std::invalid_argument("max_features fraction must be in (0, 1]");
            m = static_cast<int>(std::floor(fraction * d));
            break;
        default: m = d;
    }
    return std::clamp(m, 1, d);
}

std::string MaxFeatures::str() const {
    switch (kind) {
        case Kind::Sqrt: return "sqrt";
        case Kind::Log2: return "log2";
        default: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%g", fraction);
            return buf;
        }
    }
}

MaxFeatures MaxFeatures::parse(const std::string& s) {
    if (s == "sqrt") return sqrt();
    if (s == "log2") return log2();
    return frac(std::stod(s));
}

int RegressionTree::find_leaf(std::span<const double> x) const {
    int idx = 0;
    while (nodes[idx].feature >= 0) {
        const TreeNode& n = nodes[idx];
        idx = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return idx;
}

double RegressionTree::predict(std::span<const double> x) const {
    return nodes[find_leaf(x)].leaf_mean;
}

namespace {

struct TreeBuilder {
    const Matrix& X;
    const std::vector<std::size_t>& sample_rows;  // into X
    const std::vector<double>& y;                 // per sample
    const TreeParams& params;
    Rng rng;
    RegressionTree tree;
    std::vector<int> feat_scratch;

    TreeBuilder(const Matrix& X_, const std::vector<std::size_t>& rows,
                const std::vector<double>& y_, const TreeParams& p, std::uint64_t seed)
        : X(X_), sample_rows(rows), y(y_), params(p), rng(seed) {
        feat_scratch.resize(X.cols());
    }

    int make_leaf(const std::vector<int>& idx, double mean, double mse) {
        TreeNode node;
        node.n_samples = static_cast<int>(idx.size());
        node.impurity = mse;
        node.leaf_mean = mean;
        node.payload_begin = static_cast<int>(tree.leaf_values.size());
        for (int i : idx) tree.leaf_values.push_back(y[static_cast<std::size_t>(i)]);
        node.payload_end = static_cast<int>(tree.leaf_values.size());
        tree.nodes.push_back(node);
        return static_cast<int>(tree.nodes.size()) - 1;
    }

    int build(const std::vector<int>& idx, int depth) {
        const auto m = static_cast<double>(idx.size());
        double sum = 0.0, sumsq = 0.0;
        for (int i : idx) {
            double v = y[static_cast<std::size_t>(i)];
            sum += v;
            sumsq += v * v;
        }
        double mean = sum / m;
        double sse = sumsq - sum * sum / m;
        if (sse < 0.0) sse = 0.0;
        double mse = sse / m;

        bool stop = depth >= params.max_depth ||
                    static_cast<int>(idx.size()) < params.min_samples_split || sse <= 0.0 ||
                    static_cast<int>(idx.size()) < 2 * params.min_samples_leaf;
        int best_feature = -1;
        double best_threshold = 0.0;
        double best_gain = 0.0;

        if (!stop) {
            int d = static_cast<int>(X.cols());
            int mtry = params.max_features.resolve(d);
            std::iota(feat_scratch.begin(), feat_scratch.end(), 0);
            for (int k = 0; k < mtry; ++k) {
                std::uniform_int_distribution<int> pick(k, d - 1);
                std::swap(feat_scratch[k], feat_scratch[pick(rng)]);
            }
            std::vector<int> cand(feat_scratch.begin(), feat_scratch.begin() + mtry);
            std::sort(cand.begin(), cand.end());  // tie-break: lowest feature index wins

            std::vector<std::pair<double, double>> vals(idx.size());  // (x_f, y)
            for (int f : cand) {
                for (std::size_t i = 0; i < idx.size(); ++i) {
                    std::size_t s = static_cast<std::size_t>(idx[i]);
                    vals[i] = {X(sample_rows[s], static_cast<std::size_t>(f)), y[s]};
                }
                std::sort(vals.begin(), vals.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });

                double sum_l = 0.0, sumsq_l = 0.0;
                const int n = static_cast<int>(vals.size());
                for (int pos = 1; pos < n; ++pos) {
                    double yv = vals[static_cast<std::size_t>(pos - 1)].second;
                    sum_l += yv;
                    sumsq_l += yv * yv;
                    if (vals[static_cast<std::size_t>(pos - 1)].first >=
                        vals[static_cast<std::size_t>(pos)].first)
                        continue;  // not between distinct values
                    if (pos < params.min_samples_leaf || n - pos < params.min_samples_leaf)
                        continue;
                    double nl = pos, nr = n - pos;
                    double sum_r = sum - sum_l, sumsq_r = sumsq - sumsq_l;
                    double sse_l = sumsq_l - sum_l * sum_l / nl;
                    double sse_r = sumsq_r - sum_r * sum_r / nr;
                    double gain = sse - sse_l - sse_r;
                    if (gain > best_gain) {  // strict: earliest (feature, threshold) kept on ties
                        best_gain = gain;
                        best_feature = f;
                        best_threshold = 0.5 * (vals[static_cast<std::size_t>(pos - 1)].first +
                                                vals[static_cast<std::size_t>(pos)].first);
                    }
                }
            }
        }

        if (best_feature < 0) return make_leaf(idx, mean, mse);

        std::vector<int> left_idx, right_idx;
        for (int i : idx) {
            double v = X(sample_rows[static_cast<std::size_t>(i)],
                         static_cast<std::size_t>(best_feature));
            (v <= best_threshold ? left_idx : right_idx).push_back(i);
        }

        TreeNode node;
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.n_samples = static_cast<int>(idx.size());
        node.impurity = mse;
        tree.nodes.push_back(node);
        int self = static_cast<int>(tree.nodes.size()) - 1;
        int left = build(left_idx, depth + 1);
        int right = build(right_idx, depth + 1);
        tree.nodes[static_cast<std::size_t>(self)].left = left;
        tree.nodes[static_cast<std::size_t>(self)].right = right;
        return self;
    }
};

RegressionTree fit_tree_on_sample(const Matrix& X, const std::vector<std::size_t>& sample_rows,
                                  const std::vector<double>& y_sample, const TreeParams& params,
                                  std::uint64_t seed) {
    TreeBuilder b(X, sample_rows, y_sample, params, seed);
    std::vector<int> idx(y_sample.size());
    std::iota(idx.begin(), idx.end(), 0);
    b.build(idx, 0);
    return std::move(b.tree);
}

void validate_tree_params(const TreeParams& p) {
    if (p.max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
    if (p.min_samples_split < 2) throw std::invalid_argument("min_samples_split must be >= 2");
    if (p.min_samples_leaf < 1) throw std::invalid_argument("min_samples_leaf must be >= 1");
}

}  // namespace

RegressionTree fit_tree(const Matrix& X, std::span<const double> y, const TreeParams& params,
                        std::uint64_t seed) {
    if (X.rows() == 0 || y.empty() || X.rows() != y.size())
        throw std::invalid_argument("fit_tree: empty input or row/target mismatch");
    validate_tree_params(params);
    std::vector<std::size_t> rows(X.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::vector<double> ys(y.begin(), y.end());
    return fit_tree_on_sample(X, rows, ys, params, seed);
}

QuantileForest fit_forest(const Matrix& X, std::span<const double> y, const ForestParams& params,
                          bool parallel) {
    if (X.rows() == 0 || y.empty() || X.rows() != y.size())
        throw std::invalid_argument("fit_forest: empty input or row/target mismatch");
    if (params.n_estimators < 1) throw std::invalid_argument("n_estimators must be >= 1");
    validate_tree_params(params.tree);

    QuantileForest forest;
    forest.params = params;
    forest.n_features = X.cols();
    forest.y_min = *std::min_element(y.begin(), y.end());
    forest.y_max = *std::max_element(y.begin(), y.end());
    forest.trees.resize(static_cast<std::size_t>(params.n_estimators));

    const std::size_t n = X.rows();
    const auto T = static_cast<std::ptrdiff_t>(params.n_estimators);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t t = 0; t < T; ++t) {
        std::uint64_t tree_seed = derive_seed(params.seed, static_cast<std::uint64_t>(t));
        std::vector<std::size_t> rows(n);
        std::vector<double> ys(n);
        if (params.bootstrap) {
            Rng boot(derive_seed(tree_seed, 0xb007));
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (std::size_t i = 0; i < n; ++i) rows[i] = pick(boot);
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        for (std::size_t i = 0; i < n; ++i) ys[i] = y[rows[i]];
        forest.trees[static_cast<std::size_t>(t)] =
            fit_tree_on_sample(X, rows, ys, params.tree, tree_seed);
    }
    return forest;
}

namespace reference {
QuantileForest fit_forest_serial(const Matrix& X, std::span<const double> y,
                                 const ForestParams& params) {
    return fit_forest(X, y, params, /*parallel=*/false);
}
}  // namespace reference

namespace {
void check_dim(const QuantileForest& forest, std::span<const double> x) {
    if (x.size() != forest.n_features)
        throw std::invalid_argument("feature vector dimension mismatch: got " +
                                    std::to_string(x.size()) + ", expected " +
                                    std::to_string(forest.n_features));
}
}  // namespace

double predict_mean(const QuantileForest& forest, std::span<const double> x) {
    check_dim(forest, x);
    double s = 0.0;
    for (const auto& t : forest.trees) s += t.predict(x);
    return s / static_cast<double>(forest.trees.size());
}

std::vector<std::pair<double, double>> conditional_cdf_pairs(const QuantileForest& forest,
                                                             std::span<const double> x) {
    check_dim(forest, x);
    const double T = static_cast<double>(forest.trees.size());
    std::vector<std::pair<double, double>> pairs;
    for (const auto& tree : forest.trees) {
        const TreeNode& leaf = tree.nodes[static_cast<std::size_t>(tree.find_leaf(x))];
        const int sz = leaf.payload_end - leaf.payload_begin;
        const double w = 1.0 / (T * static_cast<double>(sz));
        for (int i = leaf.payload_begin; i < leaf.payload_end; ++i)
            pairs.emplace_back(tree.leaf_values[static_cast<std::size_t>(i)], w);
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    return pairs;
}

std::vector<std::pair<double, double>> conditional_cdf(const QuantileForest& forest,
                                                       std::span<const double> x) {
    auto pairs = conditional_cdf_pairs(forest, x);
    std::vector<std::pair<double, double>> merged;
    for (const auto& [v, w] : pairs) {
        if (!merged.empty() && merged.back().first == v)
            merged.back().second += w;
        else
            merged.emplace_back(v, w);
    }
    return merged;
}

double predict_quantile(const QuantileForest& forest, std::span<const double> x, double q) {
    if (q <= 0.0 || q > 1.0) throw std::invalid_argument("quantile q must be in (0, 1]");
    auto pairs = conditional_cdf_pairs(forest, x);
    double cum = 0.0;
    for (const auto& [v, w] : pairs) {
        cum += w;
        if (cum >= q) return v;
    }
    return pairs.back().first;  // guards against accumulated rounding below 1
}

PredictionInterval predict_interval(const QuantileForest& forest, std::span<const double> x,
                                    double coverage) {
    if (coverage <= 0.0 || coverage >= 1.0)
        throw std::invalid_argument("coverage must be in (0, 1)");
    double tail = (1.0 - coverage) / 2.0;
    PredictionInterval pi;
    pi.coverage_level = coverage;
    auto pairs = conditional_cdf_pairs(forest, x);
    auto quant = [&](double q) {
        double cum = 0.0;
        for (const auto& [v, w] : pairs) {
            cum += w;
            if (cum >= q) return v;
        }
        return pairs.back().first;
    };
    pi.lower = quant(tail);
    pi.median = quant(0.5);
    pi.upper = quant(1.0 - tail);
    return pi;
}

std::vector<PredictionInterval> predict_intervals(const QuantileForest& forest, const Matrix& X,
                                                  double coverage, bool parallel) {
    if (X.cols() != forest.n_features)
        throw std::invalid_argument("prediction matrix dimension mismatch");
    std::vector<PredictionInterval> out(X.rows());
    const auto n = static_cast<std::ptrdiff_t>(X.rows());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            predict_interval(forest, X.row(static_cast<std::size_t>(i)), coverage);
    return out;
}

std::vector<double> predict_medians(const QuantileForest& forest, const Matrix& X, bool parallel) {
    if (X.cols() != forest.n_features)
        throw std::invalid_argument("prediction matrix dimension mismatch");
    std::vector<double> out(X.rows());
    const auto n = static_cast<std::ptrdiff_t>(X.rows());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            predict_quantile(forest, X.row(static_cast<std::size_t>(i)), 0.5);
    return out;
}

std::string forest_to_json(const QuantileForest& forest) {
    nlohmann::ordered_json j;
    j["format"] = "quantile-forest";
    j["version"] = 1;
    j["params"] = {{"n_estimators", forest.params.n_estimators},
                   {"bootstrap", forest.params.bootstrap},
                   {"seed", forest.params.seed},
                   {"max_depth", forest.params.tree.max_depth},
                   {"min_samples_split", forest.params.tree.min_samples_split},
                   {"min_samples_leaf", forest.params.tree.min_samples_leaf},
                   {"max_features", forest.params.tree.max_features.str()}};
    j["n_features"] = forest.n_features;
    j["y_min"] = forest.y_min;
    j["y_max"] = forest.y_max;
    j["log_scale"] = forest.log_scale;
    auto trees = nlohmann::ordered_json::array();
    for (const auto& t : forest.trees) {
        auto nodes = nlohmann::ordered_json::array();
        for (const auto& n : t.nodes)
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.n_samples, n.impurity,
                             n.leaf_mean, n.payload_begin, n.payload_end});
        trees.push_back({{"nodes", std::move(nodes)}, {"leaf_values", t.leaf_values}});
    }
    j["trees"] = std::move(trees);
    return j.dump();
}

QuantileForest forest_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "quantile-forest")
        throw std::runtime_error("not a quantile-forest artifact");
    QuantileForest f;
    const auto& p = j.at("params");
    f.params.n_estimators = p.at("n_estimators").get<int>();
    f.params.bootstrap = p.at("bootstrap").get<bool>();
    f.params.seed = p.at("seed").get<std::uint64_t>();
    f.params.tree.max_depth = p.at("max_depth").get<int>();
    f.params.tree.min_samples_split = p.at("min_samples_split").get<int>();
    f.params.tree.min_samples_leaf = p.at("min_samples_leaf").get<int>();
    f.params.tree.max_features = MaxFeatures::parse(p.at("max_features").get<std::string>());
    f.n_features = j.at("n_features").get<std::size_t>();
    f.y_min = j.at("y_min").get<double>();
    f.y_max = j.at("y_max").get<double>();
    f.log_scale = j.at("log_scale").get<bool>();
    for (const auto& te : j.at("trees")) {
        RegressionTree t;
        for (const auto& ne : te.at("nodes")) {
            TreeNode n;
            n.feature = ne.at(0).get<int>();
            n.threshold = ne.at(1).get<double>();
            n.left = ne.at(2).get<int>();
            n.right = ne.at(3).get<int>();
            n.n_samples = ne.at(4).get<int>();
            n.impurity = ne.at(5).get<double>();
            n.leaf_mean = ne.at(6).get<double>();
            n.payload_begin = ne.at(7).get<int>();
            n.payload_end = ne.at(8).get<int>();
            t.nodes.push_back(n);
        }
        t.leaf_values = te.at("leaf_values").get<std::vector<double>>();
        f.trees.push_back(std::move(t));
    }
    return f;
}

}  // namespace aadt
