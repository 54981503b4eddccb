// Compares the OpenMP kernels against their serial reference paths and
// reports wall-clock timings plus an equality check per kernel.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>

#include "aadt/accessibility.hpp"
#include "aadt/forest.hpp"
#include "aadt/pca.hpp"
#include "aadt/rng.hpp"
#include "aadt/table.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

void report(const char* name, double t_serial, double t_parallel, bool identical) {
    std::printf("%-28s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  identical: %s\n", name,
                t_serial, t_parallel, t_parallel > 0.0 ? t_serial / t_parallel : 0.0,
                identical ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n_zones = 3000;
    std::size_t n_rows = 4000;
    if (argc > 1) n_zones = std::stoul(argv[1]);
    if (argc > 2) n_rows = std::stoul(argv[2]);

    // accessibility kernels
    std::vector<aadt::Zone> zones(n_zones);
    aadt::Rng rng(aadt::derive_seed(7, 0xbe4c));
    std::uniform_real_distribution<double> uni(0.0, 100000.0);
    for (std::size_t i = 0; i < n_zones; ++i) {
        zones[i] = {"z" + std::to_string(i), uni(rng), uni(rng), 100.0 + uni(rng) / 100.0,
                    1.0e6 + uni(rng)};
    }
    auto t0 = Clock::now();
    auto grav_s = aadt::reference::gravity_potential_serial(zones, 1.0);
    auto t1 = Clock::now();
    auto grav_p = aadt::gravity_potential(zones, 1.0, true);
    auto t2 = Clock::now();
    report("gravity_potential", seconds(t0, t1), seconds(t1, t2),
           grav_s.potential == grav_p.potential);

    t0 = Clock::now();
    auto exp_s = aadt::reference::exponential_potential_serial(zones, 0.5);
    t1 = Clock::now();
    auto exp_p = aadt::exponential_potential(zones, 0.5, true);
    t2 = Clock::now();
    report("exponential_potential", seconds(t0, t1), seconds(t1, t2),
           exp_s.potential == exp_p.potential);

    // forest fit + batch prediction on synthetic data
    auto manifest = aadt::default_synth_manifest(4, 5);
    auto table = aadt::synth_generate(n_rows, manifest, 11, 0.3);
    auto names = table.feature_names();
    auto X = table.to_matrix(names);
    auto y = table.target_values();

    aadt::ForestParams params;
    params.n_estimators = 120;
    params.tree.max_depth = 25;
    params.tree.min_samples_leaf = 2;
    params.tree.max_features = aadt::MaxFeatures::frac(0.5);
    params.seed = 99;

    t0 = Clock::now();
    auto forest_s = aadt::reference::fit_forest_serial(X, y, params);
    t1 = Clock::now();
    auto forest_p = aadt::fit_forest(X, y, params, true);
    t2 = Clock::now();
    bool same_forest = forest_s.trees.size() == forest_p.trees.size();
    for (std::size_t t = 0; same_forest && t < forest_s.trees.size(); ++t)
        same_forest = forest_s.trees[t].leaf_values == forest_p.trees[t].leaf_values &&
                      forest_s.trees[t].nodes.size() == forest_p.trees[t].nodes.size();
    report("fit_forest", seconds(t0, t1), seconds(t1, t2), same_forest);

    t0 = Clock::now();
    auto iv_s = aadt::predict_intervals(forest_s, X, 0.85, false);
    t1 = Clock::now();
    auto iv_p = aadt::predict_intervals(forest_p, X, 0.85, true);
    t2 = Clock::now();
    bool same_iv = iv_s.size() == iv_p.size();
    for (std::size_t i = 0; same_iv && i < iv_s.size(); ++i)
        same_iv = iv_s[i].lower == iv_p[i].lower && iv_s[i].median == iv_p[i].median &&
                  iv_s[i].upper == iv_p[i].upper;
    report("predict_intervals", seconds(t0, t1), seconds(t1, t2), same_iv);

    // grouped PCA fit
    t0 = Clock::now();
    auto pca_s = aadt::reference::fit_group_pca_serial(table, manifest, 0.995);
    t1 = Clock::now();
    auto pca_p = aadt::fit_group_pca(table, manifest, 0.995, true);
    t2 = Clock::now();
    bool same_pca = pca_s.size() == pca_p.size();
    for (std::size_t g = 0; same_pca && g < pca_s.size(); ++g)
        same_pca = pca_s[g].loadings == pca_p[g].loadings && pca_s[g].retained == pca_p[g].retained;
    report("fit_group_pca", seconds(t0, t1), seconds(t1, t2), same_pca);

    return 0;
}
