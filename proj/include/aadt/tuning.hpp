#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aadt/forest.hpp"
#include "aadt/matrix.hpp"
#include "aadt/metrics.hpp"

namespace aadt {

struct SearchSpace {
    int n_estimators_min = 30, n_estimators_max = 300;
    std::vector<MaxFeatures> max_features_choices = {
        MaxFeatures::sqrt(), MaxFeatures::log2(), MaxFeatures::frac(0.4), MaxFeatures::frac(0.5),
        MaxFeatures::frac(0.6)};
    int max_depth_min = 10, max_depth_max = 50;
    int min_samples_split_min = 2, min_samples_split_max = 20;
    int min_samples_leaf_min = 1, min_samples_leaf_max = 15;

    bool contains(const ForestParams& p) const;
};

enum class TuneObjective { Rai, MedianRmse };

struct TuneConfig {
    int n_iter = 150;
    int cv_folds = 5;
    double coverage = 0.85;
    TuneObjective objective = TuneObjective::Rai;
    std::uint64_t seed = 42;
};

struct TrialRecord {
    ForestParams params;
    std::vector<double> fold_scores;
    double mean_score = 0.0;
    std::string proposal = "random";  // "random" | "init" | "ei" | "fallback"
};

struct TuneResult {
    ForestParams best;
    std::vector<TrialRecord> trials;
};

// Balanced deterministic folds: validation sets partition [0, n).
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfold_indices(
    std::size_t n, std::size_t k, std::uint64_t seed);

TuneResult random_search(const SearchSpace& space, const TuneConfig& config, const Matrix& X,
                         std::span<const double> y);

TuneResult bayes_search(const SearchSpace& space, const TuneConfig& config, const Matrix& X,
                        std::span<const double> y);

ForestParams select_by_rai(const std::vector<std::pair<ForestParams, IntervalMetrics>>& candidates);

// Generic sequential model-based maximization over [0,1]^dim: random initial
// design, then expected-improvement proposals under a Gaussian-process
// surrogate evaluated over 512 seeded candidate points.
struct BayesStep {
    std::vector<double> x;
    double value = 0.0;
    std::string proposal;
};

struct BayesResult {
    std::vector<double> best_x;
    double best_value = 0.0;
    std::vector<BayesStep> history;
};

BayesResult bayes_optimize(std::size_t dim,
                           const std::function<double(std::span<const double>)>& objective,
                           int n_iter, int n_init, std::uint64_t seed);

std::string trials_to_jsonl(const std::vector<TrialRecord>& trials);

}  // namespace aadt
