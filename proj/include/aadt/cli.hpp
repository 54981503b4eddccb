#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aadt/apps.hpp"
#include "aadt/forest.hpp"
#include "aadt/tuning.hpp"

namespace aadt::cli {

struct PipelineConfig {
    std::uint64_t seed = 42;
    std::string out_dir = "out";

    // synth
    std::size_t synth_rows = 600;
    std::size_t synth_groups = 6;
    std::size_t synth_features_per_group = 5;
    double synth_noise = 0.3;
    double synth_missing_fraction = 0.05;

    // prepare
    std::string input_csv;       // defaults to <out_dir>/synth.csv
    std::string manifest_path;   // defaults to <out_dir>/manifest.json
    std::string target = "aadt";
    std::string missing_marker = "NA";
    double max_missing_fraction = 0.25;
    std::string filter_column = "road_class";
    std::vector<double> filter_allowed = {3.0, 4.0};
    bool log_transform = true;

    double train_fraction = 0.8;
    double variance_threshold = 0.995;

    // tune
    std::string tune_method = "bayes";  // "bayes" | "random" | "none"
    int tune_n_iter = 10;
    int cv_folds = 5;
    double coverage = 0.85;
    std::string objective = "rai";  // "rai" | "median_rmse"
    SearchSpace search_space;

    // train fallback when tuning is skipped
    ForestParams train_params{.n_estimators = 100,
                              .tree = {.max_depth = 30,
                                       .min_samples_split = 4,
                                       .min_samples_leaf = 2,
                                       .max_features = MaxFeatures::frac(0.6)},
                              .bootstrap = true,
                              .seed = 0};

    // importance
    int pfi_repeats = 5;
    std::size_t importance_top_k = 10;

    // applications
    BprParams bpr;
    double q_base = 20.0;
    RiskParams risk;
    double link_length_miles = 10.0;
    double trim_threshold = 40.0;

    static PipelineConfig from_json_file(const std::string& path);
    std::string to_json() const;
    std::uint64_t hash() const;
};

// Stage entry points; each reads its inputs from and writes its artifacts to
// config.out_dir. Failures surface as exceptions.
void cmd_synth(const PipelineConfig& config);
void cmd_prepare(const PipelineConfig& config);
void cmd_pca(const PipelineConfig& config);
void cmd_tune(const PipelineConfig& config);
void cmd_train(const PipelineConfig& config);
void cmd_evaluate(const PipelineConfig& config);
void cmd_importance(const PipelineConfig& config);
void cmd_apps(const PipelineConfig& config);
void cmd_figures(const PipelineConfig& config);
void cmd_pipeline(const PipelineConfig& config);

}  // namespace aadt::cli
