#include "aadt/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "aadt/importance.hpp"
#include "aadt/metrics.hpp"
#include "aadt/pca.hpp"
#include "aadt/rng.hpp"
#include "aadt/svg.hpp"
#include "aadt/table.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace aadt::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << content;
}

std::string art(const PipelineConfig& c, const std::string& name) {
    return (fs::path(c.out_dir) / name).string();
}

std::string input_csv_path(const PipelineConfig& c) {
    return c.input_csv.empty() ? art(c, "synth.csv") : c.input_csv;
}

std::string manifest_path(const PipelineConfig& c) {
    return c.manifest_path.empty() ? art(c, "manifest.json") : c.manifest_path;
}

ordered_json point_metrics_json(const PointMetrics& m) {
    return {{"rmse", m.rmse},
            {"mae", m.mae},
            {"mape_percent", m.mape},
            {"pseudo_r2", m.pseudo_r2},
            {"cv_error_percent", m.cv_error}};
}

ordered_json interval_metrics_json(const IntervalMetrics& m) {
    return {{"picp", m.picp},
            {"naw", m.naw},
            {"rai", m.rai},
            {"winkler_mean", m.winkler_mean},
            {"cv_width_percent", m.cv_width},
            {"coverage_level", m.coverage_level},
            {"scale", m.scale}};
}

struct Predictions {
    std::vector<double> y_true, lower, median, upper;
    bool log_scale = false;
};

Predictions load_predictions(const PipelineConfig& c) {
    FeatureTable t = load_table(art(c, "predictions.csv"), "y_true");
    Predictions p;
    p.y_true = t.column("y_true").values;
    p.lower = t.column("lower").values;
    p.median = t.column("median").values;
    p.upper = t.column("upper").values;
    const Column& ls = t.column("log_scale");
    p.log_scale = !ls.values.empty() && ls.values[0] != 0.0;
    return p;
}

ForestParams load_train_params(const PipelineConfig& c) {
    std::string path = art(c, "best_params.json");
    if (!fs::exists(path)) {
        ForestParams p = c.train_params;
        p.seed = derive_seed(c.seed, 0x7121);
        return p;
    }
    auto j = nlohmann::json::parse(read_file(path));
    ForestParams p;
    p.n_estimators = j.at("n_estimators").get<int>();
    p.tree.max_depth = j.at("max_depth").get<int>();
    p.tree.min_samples_split = j.at("min_samples_split").get<int>();
    p.tree.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    p.tree.max_features = MaxFeatures::parse(j.at("max_features").get<std::string>());
    p.bootstrap = j.value("bootstrap", true);
    p.seed = derive_seed(c.seed, 0x7121);
    return p;
}

}  // namespace

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
    auto j = nlohmann::json::parse(read_file(path));
    PipelineConfig c;
    c.seed = j.value("seed", c.seed);
    c.out_dir = j.value("out_dir", c.out_dir);
    if (j.contains("synth")) {
        const auto& s = j["synth"];
        c.synth_rows = s.value("n_rows", c.synth_rows);
        c.synth_groups = s.value("groups", c.synth_groups);
        c.synth_features_per_group = s.value("features_per_group", c.synth_features_per_group);
        c.synth_noise = s.value("noise_scale", c.synth_noise);
        c.synth_missing_fraction = s.value("missing_fraction", c.synth_missing_fraction);
    }
    if (j.contains("prepare")) {
        const auto& p = j["prepare"];
        c.input_csv = p.value("input_csv", c.input_csv);
        c.manifest_path = p.value("manifest", c.manifest_path);
        c.target = p.value("target", c.target);
        c.missing_marker = p.value("missing_marker", c.missing_marker);
        c.max_missing_fraction = p.value("max_missing_fraction", c.max_missing_fraction);
        c.filter_column = p.value("filter_column", c.filter_column);
        if (p.contains("filter_allowed"))
            c.filter_allowed = p["filter_allowed"].get<std::vector<double>>();
        c.log_transform = p.value("log_transform", c.log_transform);
    }
    if (j.contains("split")) c.train_fraction = j["split"].value("train_fraction", c.train_fraction);
    if (j.contains("pca"))
        c.variance_threshold = j["pca"].value("variance_threshold", c.variance_threshold);
    if (j.contains("tune")) {
        const auto& t = j["tune"];
        c.tune_method = t.value("method", c.tune_method);
        c.tune_n_iter = t.value("n_iter", c.tune_n_iter);
        c.cv_folds = t.value("cv_folds", c.cv_folds);
        c.coverage = t.value("coverage", c.coverage);
        c.objective = t.value("objective", c.objective);
        c.search_space.n_estimators_min = t.value("n_estimators_min", c.search_space.n_estimators_min);
        c.search_space.n_estimators_max = t.value("n_estimators_max", c.search_space.n_estimators_max);
        c.search_space.max_depth_min = t.value("max_depth_min", c.search_space.max_depth_min);
        c.search_space.max_depth_max = t.value("max_depth_max", c.search_space.max_depth_max);
    }
    if (j.contains("train")) {
        const auto& t = j["train"];
        c.train_params.n_estimators = t.value("n_estimators", c.train_params.n_estimators);
        c.train_params.tree.max_depth = t.value("max_depth", c.train_params.tree.max_depth);
        c.train_params.tree.min_samples_split =
            t.value("min_samples_split", c.train_params.tree.min_samples_split);
        c.train_params.tree.min_samples_leaf =
            t.value("min_samples_leaf", c.train_params.tree.min_samples_leaf);
        if (t.contains("max_features"))
            c.train_params.tree.max_features =
                MaxFeatures::parse(t["max_features"].get<std::string>());
        c.train_params.bootstrap = t.value("bootstrap", c.train_params.bootstrap);
    }
    if (j.contains("importance")) {
        c.pfi_repeats = j["importance"].value("pfi_repeats", c.pfi_repeats);
        c.importance_top_k = j["importance"].value("top_k", c.importance_top_k);
    }
    if (j.contains("apps")) {
        const auto& a = j["apps"];
        c.bpr.t_f = a.value("t_f", c.bpr.t_f);
        c.bpr.q_k = a.value("q_k", c.bpr.q_k);
        c.bpr.alpha = a.value("alpha", c.bpr.alpha);
        c.bpr.beta = a.value("beta", c.bpr.beta);
        c.q_base = a.value("q_base", c.q_base);
        c.risk.v_base = a.value("v_base", c.risk.v_base);
        c.link_length_miles = a.value("link_length_miles", c.link_length_miles);
        c.trim_threshold = a.value("trim_threshold", c.trim_threshold);
    }
    return c;
}

std::string PipelineConfig::to_json() const {
    ordered_json j;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["synth"] = {{"n_rows", synth_rows},
                  {"groups", synth_groups},
                  {"features_per_group", synth_features_per_group},
                  {"noise_scale", synth_noise},
                  {"missing_fraction", synth_missing_fraction}};
    j["prepare"] = {{"input_csv", input_csv},
                    {"manifest", manifest_path},
                    {"target", target},
                    {"missing_marker", missing_marker},
                    {"max_missing_fraction", max_missing_fraction},
                    {"filter_column", filter_column},
                    {"filter_allowed", filter_allowed},
                    {"log_transform", log_transform}};
    j["split"] = {{"train_fraction", train_fraction}};
    j["pca"] = {{"variance_threshold", variance_threshold}};
    j["tune"] = {{"method", tune_method},
                 {"n_iter", tune_n_iter},
                 {"cv_folds", cv_folds},
                 {"coverage", coverage},
                 {"objective", objective}};
    j["train"] = {{"n_estimators", train_params.n_estimators},
                  {"max_depth", train_params.tree.max_depth},
                  {"min_samples_split", train_params.tree.min_samples_split},
                  {"min_samples_leaf", train_params.tree.min_samples_leaf},
                  {"max_features", train_params.tree.max_features.str()},
                  {"bootstrap", train_params.bootstrap}};
    j["importance"] = {{"pfi_repeats", pfi_repeats}, {"top_k", importance_top_k}};
    j["apps"] = {{"t_f", bpr.t_f},
                 {"q_k", bpr.q_k},
                 {"alpha", bpr.alpha},
                 {"beta", bpr.beta},
                 {"q_base", q_base},
                 {"v_base", risk.v_base},
                 {"link_length_miles", link_length_miles},
                 {"trim_threshold", trim_threshold}};
    return j.dump(2);
}

std::uint64_t PipelineConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : to_json()) h = mix64(h ^ ch);
    return h;
}

void cmd_synth(const PipelineConfig& c) {
    GroupManifest manifest = default_synth_manifest(c.synth_groups, c.synth_features_per_group);
    SynthOptions opts;
    opts.missing_fraction = c.synth_missing_fraction;
    FeatureTable t = synth_generate(c.synth_rows, manifest, c.seed, c.synth_noise, opts);
    fs::create_directories(c.out_dir);
    save_table(t, art(c, "synth.csv"));
    manifest.save(manifest_path(c));
}

void cmd_prepare(const PipelineConfig& c) {
    FeatureTable t = load_table(input_csv_path(c), c.target, c.missing_marker);
    CleaningLog log;
    if (!c.filter_column.empty() && t.has_column(c.filter_column)) {
        std::set<double> allowed(c.filter_allowed.begin(), c.filter_allowed.end());
        auto [filtered, st] = filter_rows(t, c.filter_column, allowed);
        t = std::move(filtered);
        log.stages.push_back(st);
    }
    {
        auto [cleaned, st] = drop_sparse_columns(t, c.max_missing_fraction);
        t = std::move(cleaned);
        log.stages.push_back(st);
    }
    {
        auto [cleaned, st] = drop_incomplete_rows(t);
        t = std::move(cleaned);
        log.stages.push_back(st);
    }
    if (c.log_transform && !t.log_target()) t = log_transform_target(t);
    if (t.n_rows() == 0) throw std::runtime_error("prepare: empty table after cleaning");
    save_table(t, art(c, "prepared.csv"));
    write_file(art(c, "cleaning_log.json"), log.to_json() + "\n");
}

void cmd_pca(const PipelineConfig& c) {
    FeatureTable t = load_table(art(c, "prepared.csv"), c.target, c.missing_marker);
    t.set_log_target(c.log_transform);
    GroupManifest manifest = GroupManifest::load(manifest_path(c));

    // restrict the manifest to columns that survived cleaning
    GroupManifest kept;
    for (const auto& [g, feats] : manifest.groups) {
        std::vector<std::string> alive;
        for (const auto& f : feats)
            if (t.has_column(f)) alive.push_back(f);
        if (!alive.empty()) kept.groups.emplace_back(g, std::move(alive));
    }

    auto [train, test] = split(t, SplitSpec{c.train_fraction, derive_seed(c.seed, 0x5b11)});
    auto models = fit_group_pca(train, kept, c.variance_threshold);
    write_file(art(c, "pca_models.json"), pca_models_to_json(models) + "\n");
    save_table(pca_transform(models, train), art(c, "pca_train.csv"));
    save_table(pca_transform(models, test), art(c, "pca_test.csv"));

    auto report = retention_report(models);
    ordered_json rows = ordered_json::array();
    for (const auto& r : report)
        rows.push_back({{"group", r.group},
                        {"original_dim", r.original_dim},
                        {"retained_dim", r.retained_dim},
                        {"retention_rate", r.retention_rate}});
    write_file(art(c, "pca_retention.json"), rows.dump(2) + "\n");
}

namespace {

std::pair<Matrix, std::vector<double>> load_design(const PipelineConfig& c,
                                                   const std::string& file,
                                                   std::vector<std::string>* names = nullptr) {
    FeatureTable t = load_table((fs::path(c.out_dir) / file).string(), c.target,
                                c.missing_marker);
    auto feats = t.feature_names();
    // drop pass-through non-model columns that are not PCA components or potentials
    if (names) *names = feats;
    return {t.to_matrix(feats), t.target_values()};
}

}  // namespace

void cmd_tune(const PipelineConfig& c) {
    auto [X, y] = load_design(c, "pca_train.csv");
    TuneConfig tc;
    tc.n_iter = c.tune_n_iter;
    tc.cv_folds = c.cv_folds;
    tc.coverage = c.coverage;
    tc.objective = c.objective == "median_rmse" ? TuneObjective::MedianRmse : TuneObjective::Rai;
    tc.seed = derive_seed(c.seed, 0x40e);

    TuneResult result;
    if (c.tune_method == "random")
        result = random_search(c.search_space, tc, X, y);
    else if (c.tune_method == "bayes")
        result = bayes_search(c.search_space, tc, X, y);
    else
        throw std::runtime_error("unknown tune method: " + c.tune_method);

    write_file(art(c, "trials.jsonl"), trials_to_jsonl(result.trials));
    ordered_json best{{"n_estimators", result.best.n_estimators},
                      {"max_depth", result.best.tree.max_depth},
                      {"min_samples_split", result.best.tree.min_samples_split},
                      {"min_samples_leaf", result.best.tree.min_samples_leaf},
                      {"max_features", result.best.tree.max_features.str()},
                      {"bootstrap", result.best.bootstrap}};
    write_file(art(c, "best_params.json"), best.dump(2) + "\n");
}

void cmd_train(const PipelineConfig& c) {
    auto [X, y] = load_design(c, "pca_train.csv");
    ForestParams p = load_train_params(c);
    QuantileForest forest = fit_forest(X, y, p);
    forest.log_scale = c.log_transform;
    write_file(art(c, "model.json"), forest_to_json(forest));
}

void cmd_evaluate(const PipelineConfig& c) {
    QuantileForest forest = forest_from_json(read_file(art(c, "model.json")));
    auto [X, y] = load_design(c, "pca_test.csv");
    auto intervals = predict_intervals(forest, X, c.coverage);

    const std::size_t n = y.size();
    std::vector<double> lo(n), med(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = intervals[i].lower;
        med[i] = intervals[i].median;
        hi[i] = intervals[i].upper;
    }

    std::string csv = "y_true,lower,median,upper,log_scale\n";
    {
        std::ostringstream ss;
        ss.precision(17);
        for (std::size_t i = 0; i < n; ++i)
            ss << y[i] << "," << lo[i] << "," << med[i] << "," << hi[i] << ","
               << (forest.log_scale ? 1 : 0) << "\n";
        csv += ss.str();
    }
    write_file(art(c, "predictions.csv"), csv);

    ordered_json metrics;
    metrics["coverage_level"] = c.coverage;
    {
        IntervalMetrics im = interval_metrics(y, lo, hi, c.coverage);
        im.scale = forest.log_scale ? "log" : "raw";
        metrics["model_scale"] = interval_metrics_json(im);
        metrics["model_scale"]["point"] = point_metrics_json(point_metrics(y, med));
    }
    if (forest.log_scale) {
        std::vector<double> ye(n), loe(n), mede(n), hie(n);
        for (std::size_t i = 0; i < n; ++i) {
            ye[i] = std::exp(y[i]);
            loe[i] = std::exp(lo[i]);
            mede[i] = std::exp(med[i]);
            hie[i] = std::exp(hi[i]);
        }
        IntervalMetrics im = interval_metrics(ye, loe, hie, c.coverage);
        im.scale = "raw";
        metrics["raw_scale"] = interval_metrics_json(im);
        metrics["raw_scale"]["point"] = point_metrics_json(point_metrics(ye, mede));
    }
    write_file(art(c, "metrics.json"), metrics.dump(2) + "\n");
}

void cmd_importance(const PipelineConfig& c) {
    QuantileForest forest = forest_from_json(read_file(art(c, "model.json")));
    std::vector<std::string> names;
    auto [X, y] = load_design(c, "pca_test.csv", &names);

    ImportanceReport m = mdi(forest, names);
    ImportanceReport p = pfi(forest, X, y, names, c.pfi_repeats, derive_seed(c.seed, 0x9f1));
    write_file(art(c, "importance_mdi.json"), m.to_json() + "\n");
    write_file(art(c, "importance_pfi.json"), p.to_json() + "\n");

    // top-k horizontal bar chart, both methods side by side
    auto mk = top_k(m, c.importance_top_k);
    auto pk = top_k(p, c.importance_top_k);
    SvgCanvas svg(760, 60.0 + 26.0 * (mk.size() + pk.size()), "Feature importance (top-k)");
    double ypos = 50.0;
    auto draw = [&](const std::vector<std::pair<std::string, double>>& items,
                    const std::string& color, const std::string& label) {
        svg.text(60, ypos, label, 13.0);
        ypos += 10.0;
        double maxv = items.empty() ? 1.0 : std::max(items[0].second, 1e-12);
        for (const auto& [name, score] : items) {
            double w = 420.0 * std::max(score, 0.0) / maxv;
            svg.rect(220, ypos, w, 16, color, 0.85);
            svg.text(214, ypos + 13, name, 11.0, "end");
            ypos += 26.0;
        }
        ypos += 14.0;
    };
    draw(mk, "#2166ac", "MDI");
    draw(pk, "#d6604d", "PFI");
    write_file(art(c, "importance.svg"), svg.finish());
}

void cmd_apps(const PipelineConfig& c) {
    Predictions p = load_predictions(c);
    const std::size_t n = p.y_true.size();

    std::vector<double> dlogs(n);
    for (std::size_t i = 0; i < n; ++i) {
        PredictionInterval pi;
        pi.lower = p.log_scale ? std::exp(p.lower[i]) : p.lower[i];
        pi.median = p.log_scale ? std::exp(p.median[i]) : p.median[i];
        pi.upper = p.log_scale ? std::exp(p.upper[i]) : p.upper[i];
        dlogs[i] = dlog_width(pi);
    }
    std::vector<double> kept = trim_extremes(dlogs, c.trim_threshold);

    std::ostringstream csv;
    csv.precision(17);
    csv << "dlog,dt_minutes,dr_fatal,dr_serious,dr_slight\n";
    std::vector<double> dr_fatal, dr_serious, dr_slight, dts;
    for (double d : kept) {
        double dt = travel_time_delta(c.bpr, c.q_base, d);
        double t_after = bpr_time(c.bpr, c.q_base * (1.0 + d));
        double v_after = c.link_length_miles / (t_after / 60.0);  // mph
        double f = collision_delta_r(c.risk, v_after, Severity::Fatal);
        double s = collision_delta_r(c.risk, v_after, Severity::Serious);
        double l = collision_delta_r(c.risk, v_after, Severity::Slight);
        dts.push_back(dt);
        dr_fatal.push_back(f);
        dr_serious.push_back(s);
        dr_slight.push_back(l);
        csv << d << "," << dt << "," << f << "," << s << "," << l << "\n";
    }
    write_file(art(c, "apps_links.csv"), csv.str());

    auto summary_row = [](const RiskSummary& s) {
        return ordered_json{{"mean", s.mean}, {"variance", s.variance}, {"iqr", s.iqr}};
    };
    ordered_json summary;
    summary["n_links"] = n;
    summary["n_links_kept"] = kept.size();
    summary["trim_threshold"] = c.trim_threshold;
    summary["dlog"] = summary_row(risk_summary(dlogs));
    summary["collision_risk"] = {
        {"fatal", summary_row(risk_summary(dr_fatal))},
        {"serious", summary_row(risk_summary(dr_serious))},
        {"slight", summary_row(risk_summary(dr_slight))}};
    summary["travel_time_delta_minutes"] = summary_row(risk_summary(dts));
    write_file(art(c, "apps_summary.json"), summary.dump(2) + "\n");
}

void cmd_figures(const PipelineConfig& c) {
    Predictions p = load_predictions(c);
    const std::size_t n = p.y_true.size();

    fs::create_directories(art(c, "figures"));
    write_file(art(c, "figures/intervals_vs_true.svg"),
               fig_error_scatter(p.y_true, p.lower, p.median, p.upper,
                                 "Interval predictions vs true values"));

    FeatureTable test = load_table(art(c, "pca_test.csv"), c.target, c.missing_marker);
    if (test.has_column("x") && test.has_column("y")) {
        std::vector<double> xs = test.column("x").values;
        std::vector<double> ys = test.column("y").values;
        std::vector<double> abs_err(n), widths(n);
        for (std::size_t i = 0; i < n; ++i) {
            abs_err[i] = std::abs(p.y_true[i] - p.median[i]);
            widths[i] = p.upper[i] - p.lower[i];
        }
        write_file(art(c, "figures/error_map.svg"),
                   fig_coord_scatter(xs, ys, abs_err, "Median prediction error magnitude", false));
        write_file(art(c, "figures/width_map.svg"),
                   fig_coord_scatter(xs, ys, widths, "Interval width quintiles", true));
    }

    if (fs::exists(art(c, "apps_links.csv"))) {
        FeatureTable links = load_table(art(c, "apps_links.csv"), "dlog");
        write_file(art(c, "figures/dlog_density.svg"),
                   fig_density(links.column("dlog").values,
                               "Proportional change in AADT over interval widths", "dlog"));
        write_file(art(c, "figures/dt_density.svg"),
                   fig_density(links.column("dt_minutes").values,
                               "Travel-time change over interval widths", "dt (minutes)"));
    }

    // interval width vs point estimate, with an OLS fit
    {
        std::vector<double> widths(n), meds(n);
        for (std::size_t i = 0; i < n; ++i) {
            widths[i] = p.upper[i] - p.lower[i];
            meds[i] = p.median[i];
        }
        auto reg = simple_regression(meds, widths);
        write_file(art(c, "figures/width_vs_point.svg"),
                   fig_regression_scatter(meds, widths, reg.slope, reg.intercept,
                                          "Interval width vs point estimate", "median prediction",
                                          "interval width"));
    }
}

void cmd_pipeline(const PipelineConfig& c) {
    using clock = std::chrono::steady_clock;
    ordered_json manifest;
    manifest["config_hash"] = c.hash();
    manifest["seed"] = c.seed;
    ordered_json stages = ordered_json::array();

    auto run_stage = [&](const std::string& name, auto&& fn) {
        auto t0 = clock::now();
        try {
            fn(c);
        } catch (const std::exception& e) {
            throw std::runtime_error("stage '" + name + "' failed: " + e.what());
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t0);
        stages.push_back({{"stage", name}, {"elapsed_ms", ms.count()}});
    };

    run_stage("synth", cmd_synth);
    run_stage("prepare", cmd_prepare);
    run_stage("pca", cmd_pca);
    if (c.tune_method != "none") run_stage("tune", cmd_tune);
    run_stage("train", cmd_train);
    run_stage("evaluate", cmd_evaluate);
    run_stage("importance", cmd_importance);
    run_stage("apps", cmd_apps);
    run_stage("figures", cmd_figures);

    manifest["stages"] = std::move(stages);
    std::vector<std::string> artifacts = {
        "synth.csv",       "manifest.json",      "prepared.csv",       "cleaning_log.json",
        "pca_models.json", "pca_train.csv",      "pca_test.csv",       "pca_retention.json",
        "model.json",      "predictions.csv",    "metrics.json",       "importance_mdi.json",
        "importance_pfi.json", "importance.svg", "apps_links.csv",     "apps_summary.json"};
    if (c.tune_method != "none") {
        artifacts.push_back("trials.jsonl");
        artifacts.push_back("best_params.json");
    }
    for (const auto& a : artifacts)
        if (!fs::exists(art(c, a)))
            throw std::runtime_error("pipeline finished but artifact missing: " + a);
    manifest["artifacts"] = artifacts;
    manifest["metrics"] = nlohmann::json::parse(read_file(art(c, "metrics.json")));
    write_file(art(c, "run_manifest.json"), manifest.dump(2) + "\n");
}

}  // namespace aadt::cli
