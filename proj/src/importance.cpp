#include "aadt/importance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "aadt/metrics.hpp"
#include "aadt/rng.hpp"

namespace aadt {

namespace {

void normalize(ImportanceReport& r) {
    double total = std::accumulate(r.scores.begin(), r.scores.end(), 0.0);
    r.normalized.assign(r.scores.size(), 0.0);
    if (total > 0.0)
        for (std::size_t i = 0; i < r.scores.size(); ++i) r.normalized[i] = r.scores[i] / total;
}

double pseudo_r2(std::span<const double> y_true, std::span<const double> y_pred) {
    double ybar = std::accumulate(y_true.begin(), y_true.end(), 0.0) /
                  static_cast<double>(y_true.size());
    double sse = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        sse += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
        sst += (y_true[i] - ybar) * (y_true[i] - ybar);
    }
    return sst > 0.0 ? 1.0 - sse / sst : (sse == 0.0 ? 1.0 : 0.0);
}

}  // namespace

ImportanceReport mdi(const QuantileForest& forest,
                     const std::vector<std::string>& feature_names) {
    if (feature_names.size() != forest.n_features)
        throw std::invalid_argument("mdi: feature name count mismatch");

    ImportanceReport rep;
    rep.method = "mdi";
    rep.feature_names = feature_names;
    rep.scores.assign(forest.n_features, 0.0);

    for (const auto& tree : forest.trees) {
        if (tree.nodes.empty()) continue;
        const double N = tree.nodes[0].n_samples;
        for (const auto& node : tree.nodes) {
            if (node.feature < 0) continue;
            const TreeNode& l = tree.nodes[static_cast<std::size_t>(node.left)];
            const TreeNode& r = tree.nodes[static_cast<std::size_t>(node.right)];
            double nt = node.n_samples;
            double reduction = node.impurity - (l.n_samples / nt) * l.impurity -
                               (r.n_samples / nt) * r.impurity;
            rep.scores[static_cast<std::size_t>(node.feature)] += (nt / N) * reduction;
        }
    }
    for (auto& s : rep.scores) s /= static_cast<double>(forest.trees.size());
    normalize(rep);
    return rep;
}

ImportanceReport pfi(const QuantileForest& forest, const Matrix& X, std::span<const double> y,
                     const std::vector<std::string>& feature_names, int repeats,
                     std::uint64_t seed, bool parallel) {
    if (feature_names.size() != forest.n_features)
        throw std::invalid_argument("pfi: feature name count mismatch");
    if (X.rows() != y.size()) throw std::invalid_argument("pfi: X/y length mismatch");
    if (repeats < 1) throw std::invalid_argument("pfi: repeats must be >= 1");

    auto base_pred = predict_medians(forest, X, parallel);
    const double base_score = pseudo_r2(y, base_pred);

    ImportanceReport rep;
    rep.method = "pfi";
    rep.feature_names = feature_names;
    rep.scores.assign(forest.n_features, 0.0);

    const auto d = static_cast<std::ptrdiff_t>(forest.n_features);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t j = 0; j < d; ++j) {
        double total_drop = 0.0;
        for (int r = 0; r < repeats; ++r) {
            Matrix Xp = X;
            std::vector<std::size_t> perm(X.rows());
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j),
                                static_cast<std::uint64_t>(r)));
            std::shuffle(perm.begin(), perm.end(), rng);
            for (std::size_t i = 0; i < X.rows(); ++i)
                Xp(i, static_cast<std::size_t>(j)) = X(perm[i], static_cast<std::size_t>(j));
            auto pred = predict_medians(forest, Xp, /*parallel=*/false);
            total_drop += base_score - pseudo_r2(y, pred);
        }
        rep.scores[static_cast<std::size_t>(j)] = total_drop / static_cast<double>(repeats);
    }
    normalize(rep);
    return rep;
}

std::vector<std::pair<std::string, double>> top_k(const ImportanceReport& report, std::size_t k) {
    if (k < 1) throw std::invalid_argument("top_k: k must be >= 1");
    std::vector<std::pair<std::string, double>> items;
    for (std::size_t i = 0; i < report.scores.size(); ++i)
        items.emplace_back(report.feature_names[i], report.scores[i]);
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (items.size() > k) items.resize(k);
    return items;
}

std::string ImportanceReport::to_json() const {
    nlohmann::ordered_json j;
    j["method"] = method;
    auto sc = nlohmann::ordered_json::object();
    auto no = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < feature_names.size(); ++i) {
        sc[feature_names[i]] = scores[i];
        no[feature_names[i]] = normalized[i];
    }
    j["scores"] = std::move(sc);
    j["normalized"] = std::move(no);
    return j.dump(2);
}

}  // namespace aadt
