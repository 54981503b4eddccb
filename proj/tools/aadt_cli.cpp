// Command-line front end for the AADT interval-prediction pipeline.

#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "aadt/cli.hpp"

namespace {

using aadt::cli::PipelineConfig;

void add_common_options(CLI::App* app, PipelineConfig& config, std::string& config_path) {
    app->add_option("--config", config_path, "JSON config file (flags override its values)");
    app->add_option("--seed", config.seed, "root RNG seed");
    app->add_option("--out", config.out_dir, "output directory for artifacts");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AADT interval prediction: quantile forests over grouped principal components"};
    app.require_subcommand(1);

    PipelineConfig config;
    std::string config_path;

    std::map<std::string, std::function<void(const PipelineConfig&)>> dispatch = {
        {"synth", aadt::cli::cmd_synth},         {"prepare", aadt::cli::cmd_prepare},
        {"pca", aadt::cli::cmd_pca},             {"tune", aadt::cli::cmd_tune},
        {"train", aadt::cli::cmd_train},         {"evaluate", aadt::cli::cmd_evaluate},
        {"importance", aadt::cli::cmd_importance}, {"apps", aadt::cli::cmd_apps},
        {"figures", aadt::cli::cmd_figures},     {"pipeline", aadt::cli::cmd_pipeline}};

    auto* synth = app.add_subcommand("synth", "generate a synthetic survey-station dataset");
    synth->add_option("--rows", config.synth_rows, "number of rows");
    synth->add_option("--groups", config.synth_groups, "number of feature groups");
    synth->add_option("--features-per-group", config.synth_features_per_group,
                      "features in each group");
    synth->add_option("--noise", config.synth_noise, "target noise scale");
    synth->add_option("--missing-fraction", config.synth_missing_fraction,
                      "fraction of knocked-out feature cells");

    auto* prepare = app.add_subcommand("prepare", "clean, filter, and log-transform the table");
    prepare->add_option("--input", config.input_csv, "input CSV (default <out>/synth.csv)");
    prepare->add_option("--manifest", config.manifest_path,
                        "feature-group manifest JSON (default <out>/manifest.json)");
    prepare->add_option("--target", config.target, "target column name");
    prepare->add_option("--max-missing", config.max_missing_fraction,
                        "drop columns with a larger missing fraction");

    auto* pca = app.add_subcommand("pca", "split and project feature groups to components");
    pca->add_option("--train-fraction", config.train_fraction, "train split fraction");
    pca->add_option("--variance", config.variance_threshold,
                    "cumulative explained-variance threshold");

    auto* tune = app.add_subcommand("tune", "search forest hyperparameters by cross-validation");
    tune->add_option("--method", config.tune_method, "bayes | random | none");
    tune->add_option("--iters", config.tune_n_iter, "number of trials");
    tune->add_option("--folds", config.cv_folds, "cross-validation folds");
    tune->add_option("--coverage", config.coverage, "nominal interval coverage");
    tune->add_option("--objective", config.objective, "rai | median_rmse");

    auto* train = app.add_subcommand("train", "fit the quantile forest on the training split");
    train->add_option("--trees", config.train_params.n_estimators,
                      "tree count when no tuning result is present");

    auto* evaluate = app.add_subcommand("evaluate", "score intervals on the held-out split");
    evaluate->add_option("--coverage", config.coverage, "nominal interval coverage");

    auto* importance = app.add_subcommand("importance", "MDI and permutation importances");
    importance->add_option("--repeats", config.pfi_repeats, "permutation repeats per feature");
    importance->add_option("--top-k", config.importance_top_k, "features kept in the report");

    auto* apps = app.add_subcommand("apps", "travel-time and collision-risk applications");
    apps->add_option("--q-base", config.q_base, "baseline link flow (veh/min)");
    apps->add_option("--trim", config.trim_threshold, "dlog trim threshold");

    app.add_subcommand("figures", "emit SVG figures from pipeline artifacts");

    auto* pipeline = app.add_subcommand("pipeline", "run every stage end to end");
    pipeline->add_option("--method", config.tune_method, "bayes | random | none");
    pipeline->add_option("--iters", config.tune_n_iter, "tuning trials");
    pipeline->add_option("--rows", config.synth_rows, "synthetic rows");
    pipeline->add_option("--coverage", config.coverage, "nominal interval coverage");

    for (auto* sub : app.get_subcommands({}))
        add_common_options(sub, config, config_path);

    // Parse once to discover --config, then reparse so flags win over file values.
    try {
        app.parse(argc, argv);
        if (!config_path.empty()) {
            config = PipelineConfig::from_json_file(config_path);
            for (auto* sub : app.get_subcommands({})) sub->clear();
            app.clear();
            app.parse(argc, argv);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        dispatch.at(name)(config);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s: data error: %s\n", name.c_str(), e.what());
        return 2;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "%s: data error: %s\n", name.c_str(), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: internal error: %s\n", name.c_str(), e.what());
        return 3;
    }
    return 0;
}
