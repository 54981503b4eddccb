#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "aadt/rng.hpp"
#include "aadt/table.hpp"
#include "aadt/tuning.hpp"

using namespace aadt;

namespace {

std::pair<Matrix, std::vector<double>> small_problem(std::size_t n, std::uint64_t seed) {
    auto manifest = default_synth_manifest(2, 3);
    auto t = synth_generate(n, manifest, seed, 0.3);
    auto lt = log_transform_target(t);
    auto names = lt.feature_names();
    return {lt.to_matrix(names), lt.target_values()};
}

}  // namespace

TEST_CASE("kfold_indices partitions with balanced sizes") {
    auto folds10 = kfold_indices(10, 5, 1);
    REQUIRE(folds10.size() == 5);
    for (const auto& [train, val] : folds10) {
        CHECK(val.size() == 2);
        CHECK(train.size() == 8);
    }

    auto folds7 = kfold_indices(7, 3, 2);
    std::multiset<std::size_t> sizes;
    for (const auto& [train, val] : folds7) sizes.insert(val.size());
    CHECK(sizes == std::multiset<std::size_t>{3, 2, 2});

    // validation folds form a disjoint cover of [0, n)
    std::set<std::size_t> seen;
    for (const auto& [train, val] : folds7) {
        for (auto i : val) {
            CHECK(!seen.count(i));
            seen.insert(i);
        }
        // train/validation disjoint
        std::set<std::size_t> tr(train.begin(), train.end());
        for (auto i : val) CHECK(!tr.count(i));
    }
    CHECK(seen.size() == 7);

    CHECK(kfold_indices(7, 3, 2) == folds7);  // deterministic
    CHECK_THROWS(kfold_indices(3, 5, 1));
}

TEST_CASE("search space membership") {
    SearchSpace space;
    ForestParams inside;
    inside.n_estimators = 100;
    inside.tree.max_depth = 20;
    inside.tree.min_samples_split = 5;
    inside.tree.min_samples_leaf = 3;
    inside.tree.max_features = MaxFeatures::sqrt();
    CHECK(space.contains(inside));
    auto outside = inside;
    outside.n_estimators = 391;  // out of range
    CHECK(!space.contains(outside));
    auto bad_frac = inside;
    bad_frac.tree.max_features = MaxFeatures::frac(0.9);
    CHECK(!space.contains(bad_frac));
}

TEST_CASE("random_search samples inside the space and is deterministic") {
    auto [X, y] = small_problem(120, 7);
    SearchSpace space;
    TuneConfig config;
    config.n_iter = 6;
    config.cv_folds = 3;
    config.seed = 42;
    auto result = random_search(space, config, X, y);
    REQUIRE(result.trials.size() == 6);
    for (const auto& trial : result.trials) {
        CHECK(space.contains(trial.params));
        CHECK(trial.fold_scores.size() == 3);
        double mean = 0.0;
        for (double s : trial.fold_scores) mean += s;
        mean /= 3.0;
        CHECK(trial.mean_score == doctest::Approx(mean).epsilon(1e-12));
    }

    // best appears in the trial history with a maximal mean score
    double best_score = -1e300;
    for (const auto& trial : result.trials) best_score = std::max(best_score, trial.mean_score);
    bool found = false;
    for (const auto& trial : result.trials)
        if (trial.mean_score == best_score &&
            trial.params.n_estimators == result.best.n_estimators &&
            trial.params.tree.max_depth == result.best.tree.max_depth)
            found = true;
    CHECK(found);

    auto again = random_search(space, config, X, y);
    REQUIRE(again.trials.size() == result.trials.size());
    for (std::size_t i = 0; i < again.trials.size(); ++i) {
        CHECK(again.trials[i].params.n_estimators == result.trials[i].params.n_estimators);
        CHECK(again.trials[i].mean_score == result.trials[i].mean_score);
    }

    TuneConfig one;
    one.n_iter = 1;
    one.cv_folds = 3;
    auto single = random_search(space, one, X, y);
    CHECK(single.best.n_estimators == single.trials[0].params.n_estimators);
}

TEST_CASE("select_by_rai") {
    ForestParams a, b;
    a.n_estimators = 50;
    b.n_estimators = 60;
    IntervalMetrics ma, mb;
    ma.rai = 2.1;
    mb.rai = 3.0;
    CHECK(select_by_rai({{a, ma}, {b, mb}}).n_estimators == 60);
    CHECK(select_by_rai({{a, ma}}).n_estimators == 50);
    mb.rai = 2.1;  // tie -> earliest
    CHECK(select_by_rai({{a, ma}, {b, mb}}).n_estimators == 50);
    CHECK_THROWS(select_by_rai({}));
}

TEST_CASE("bayes_optimize approaches a 1-D optimum and is deterministic") {
    // smooth unimodal objective on [0,1] with optimum at 0.7312
    auto objective = [](std::span<const double> x) {
        double t = x[0] - 0.7312;
        return 1.0 - 10.0 * t * t + 0.2 * std::sin(9.0 * x[0]);
    };
    // 1,000-point grid oracle
    double grid_best = -1e300;
    for (int i = 0; i < 1000; ++i) {
        double x = (i + 0.5) / 1000.0;
        grid_best = std::max(grid_best, objective(std::vector<double>{x}));
    }
    auto result = bayes_optimize(1, objective, 30, 10, 99);
    CHECK(result.history.size() == 30);
    CHECK(result.best_value >= grid_best - 0.1 * std::abs(grid_best));

    // incumbent never below the best of the initial design
    double init_best = -1e300;
    for (int i = 0; i < 10; ++i) init_best = std::max(init_best, result.history[i].value);
    CHECK(result.best_value >= init_best);

    auto again = bayes_optimize(1, objective, 30, 10, 99);
    REQUIRE(again.history.size() == result.history.size());
    for (std::size_t i = 0; i < again.history.size(); ++i) {
        CHECK(again.history[i].x == result.history[i].x);
        CHECK(again.history[i].value == result.history[i].value);
    }
}

TEST_CASE("bayes_optimize falls back to random proposals when scores are flat") {
    auto flat = [](std::span<const double>) { return 1.0; };
    auto result = bayes_optimize(2, flat, 15, 5, 7);
    bool any_fallback = false;
    for (const auto& step : result.history)
        if (step.proposal == "fallback") any_fallback = true;
    CHECK(any_fallback);
}

TEST_CASE("bayes_search produces valid deterministic trials") {
    auto [X, y] = small_problem(100, 3);
    SearchSpace space;
    TuneConfig config;
    config.n_iter = 12;
    config.cv_folds = 3;
    config.seed = 5;
    auto result = bayes_search(space, config, X, y);
    REQUIRE(result.trials.size() == 12);
    for (const auto& trial : result.trials) CHECK(space.contains(trial.params));
    CHECK(space.contains(result.best));

    double best_score = -1e300;
    for (const auto& trial : result.trials) best_score = std::max(best_score, trial.mean_score);
    double init_best = -1e300;
    int n_init = 0;
    for (const auto& trial : result.trials)
        if (trial.proposal == "init") {
            init_best = std::max(init_best, trial.mean_score);
            ++n_init;
        }
    CHECK(n_init == 10);  // max(10, 12/10)
    CHECK(best_score >= init_best);

    auto again = bayes_search(space, config, X, y);
    for (std::size_t i = 0; i < again.trials.size(); ++i) {
        CHECK(again.trials[i].params.n_estimators == result.trials[i].params.n_estimators);
        CHECK(again.trials[i].params.tree.max_features.str() ==
              result.trials[i].params.tree.max_features.str());
        CHECK(again.trials[i].mean_score == result.trials[i].mean_score);
    }
}

TEST_CASE("trials_to_jsonl emits one record per trial") {
    auto [X, y] = small_problem(80, 12);
    SearchSpace space;
    TuneConfig config;
    config.n_iter = 3;
    config.cv_folds = 2;
    auto result = random_search(space, config, X, y);
    auto jsonl = trials_to_jsonl(result.trials);
    CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 3);
    CHECK(jsonl.find("mean_score") != std::string::npos);
}

TEST_CASE("median_rmse objective also runs") {
    auto [X, y] = small_problem(90, 8);
    SearchSpace space;
    TuneConfig config;
    config.n_iter = 2;
    config.cv_folds = 2;
    config.objective = TuneObjective::MedianRmse;
    auto result = random_search(space, config, X, y);
    REQUIRE(result.trials.size() == 2);
    for (const auto& trial : result.trials) CHECK(trial.mean_score <= 0.0);  // negated RMSE
}
