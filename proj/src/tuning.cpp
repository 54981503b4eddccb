#include "aadt/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "aadt/rng.hpp"

namespace aadt {

bool SearchSpace::contains(const ForestParams& p) const {
    bool mf_ok = false;
    for (const auto& c : max_features_choices)
        if (c.kind == p.tree.max_features.kind &&
            (c.kind != MaxFeatures::Kind::Fraction ||
             std::abs(c.fraction - p.tree.max_features.fraction) < 1e-12))
            mf_ok = true;
    return mf_ok && p.n_estimators >= n_estimators_min && p.n_estimators <= n_estimators_max &&
           p.tree.max_depth >= max_depth_min && p.tree.max_depth <= max_depth_max &&
           p.tree.min_samples_split >= min_samples_split_min &&
           p.tree.min_samples_split <= min_samples_split_max &&
           p.tree.min_samples_leaf >= min_samples_leaf_min &&
           p.tree.min_samples_leaf <= min_samples_leaf_max;
}

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfold_indices(
    std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold_indices: k must be >= 2");
    if (k > n) throw std::invalid_argument("kfold_indices: k exceeds n");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> folds;
    std::size_t base = n / k, rem = n % k, start = 0;
    for (std::size_t f = 0; f < k; ++f) {
        std::size_t sz = base + (f < rem ? 1 : 0);
        std::vector<std::size_t> val(idx.begin() + start, idx.begin() + start + sz);
        std::vector<std::size_t> train;
        train.reserve(n - sz);
        train.insert(train.end(), idx.begin(), idx.begin() + start);
        train.insert(train.end(), idx.begin() + start + sz, idx.end());
        folds.emplace_back(std::move(train), std::move(val));
        start += sz;
    }
    return folds;
}

namespace {

Matrix take_rows(const Matrix& X, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < X.cols(); ++j) out(i, j) = X(rows[i], j);
    return out;
}

double cv_objective(const ForestParams& base, const TuneConfig& config, const Matrix& X,
                    std::span<const double> y, std::vector<double>& fold_scores) {
    auto folds = kfold_indices(X.rows(), static_cast<std::size_t>(config.cv_folds),
                               derive_seed(config.seed, 0xf01d));
    fold_scores.clear();
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const auto& [tr, va] = folds[f];
        Matrix Xtr = take_rows(X, tr), Xva = take_rows(X, va);
        std::vector<double> ytr(tr.size()), yva(va.size());
        for (std::size_t i = 0; i < tr.size(); ++i) ytr[i] = y[tr[i]];
        for (std::size_t i = 0; i < va.size(); ++i) yva[i] = y[va[i]];

        ForestParams p = base;
        p.seed = derive_seed(config.seed, 0xcf0, f);
        QuantileForest forest = fit_forest(Xtr, ytr, p);

        double score;
        if (config.objective == TuneObjective::Rai) {
            auto intervals = predict_intervals(forest, Xva, config.coverage);
            std::vector<double> lo(va.size()), hi(va.size());
            for (std::size_t i = 0; i < va.size(); ++i) {
                lo[i] = intervals[i].lower;
                hi[i] = intervals[i].upper;
            }
            try {
                score = rai(naw(yva, lo, hi), picp(yva, lo, hi));
            } catch (const std::invalid_argument&) {
                score = 0.0;  // degenerate fold (zero range or zero widths)
            }
        } else {
            auto med = predict_medians(forest, Xva);
            double sse = 0.0;
            for (std::size_t i = 0; i < va.size(); ++i)
                sse += (yva[i] - med[i]) * (yva[i] - med[i]);
            // negated so both objectives maximize
            score = -std::sqrt(sse / static_cast<double>(va.size()));
        }
        fold_scores.push_back(score);
    }
    double mean = std::accumulate(fold_scores.begin(), fold_scores.end(), 0.0) /
                  static_cast<double>(fold_scores.size());
    return mean;
}

constexpr std::size_t kIntDims = 4;

std::size_t encoding_dim(const SearchSpace& space) {
    return kIntDims + space.max_features_choices.size();
}

int decode_int(double x, int lo, int hi) {
    int v = lo + static_cast<int>(std::llround(x * static_cast<double>(hi - lo)));
    return std::clamp(v, lo, hi);
}

ForestParams decode_params(const SearchSpace& space, std::span<const double> x,
                           std::uint64_t seed) {
    ForestParams p;
    p.n_estimators = decode_int(x[0], space.n_estimators_min, space.n_estimators_max);
    p.tree.max_depth = decode_int(x[1], space.max_depth_min, space.max_depth_max);
    p.tree.min_samples_split =
        decode_int(x[2], space.min_samples_split_min, space.min_samples_split_max);
    p.tree.min_samples_leaf =
        decode_int(x[3], space.min_samples_leaf_min, space.min_samples_leaf_max);
    std::size_t best = 0;
    for (std::size_t c = 1; c < space.max_features_choices.size(); ++c)
        if (x[kIntDims + c] > x[kIntDims + best]) best = c;
    p.tree.max_features = space.max_features_choices[best];
    p.bootstrap = true;
    p.seed = seed;
    return p;
}

}  // namespace

TuneResult random_search(const SearchSpace& space, const TuneConfig& config, const Matrix& X,
                         std::span<const double> y) {
    if (X.rows() == 0) throw std::invalid_argument("random_search: empty data");
    if (config.n_iter < 1) throw std::invalid_argument("random_search: n_iter must be >= 1");

    Rng rng(derive_seed(config.seed, 0x5a3d));
    std::uniform_int_distribution<int> d_est(space.n_estimators_min, space.n_estimators_max);
    std::uniform_int_distribution<int> d_dep(space.max_depth_min, space.max_depth_max);
    std::uniform_int_distribution<int> d_spl(space.min_samples_split_min,
                                             space.min_samples_split_max);
    std::uniform_int_distribution<int> d_lea(space.min_samples_leaf_min,
                                             space.min_samples_leaf_max);
    std::uniform_int_distribution<std::size_t> d_mf(0, space.max_features_choices.size() - 1);

    TuneResult result;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < config.n_iter; ++t) {
        ForestParams p;
        p.n_estimators = d_est(rng);
        p.tree.max_depth = d_dep(rng);
        p.tree.min_samples_split = d_spl(rng);
        p.tree.min_samples_leaf = d_lea(rng);
        p.tree.max_features = space.max_features_choices[d_mf(rng)];
        p.bootstrap = true;
        p.seed = derive_seed(config.seed, 0x7e5, static_cast<std::uint64_t>(t));

        TrialRecord rec;
        rec.params = p;
        rec.proposal = "random";
        rec.mean_score = cv_objective(p, config, X, y, rec.fold_scores);
        if (rec.mean_score > best_score) {  // strict: earliest trial wins ties
            best_score = rec.mean_score;
            result.best = p;
        }
        result.trials.push_back(std::move(rec));
    }
    return result;
}

// ---- Gaussian-process expected improvement core ----

namespace {

constexpr double kXi = 0.01;      // exploration margin
constexpr double kJitter = 1e-6;  // observation noise

double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

BayesResult bayes_optimize(std::size_t dim,
                           const std::function<double(std::span<const double>)>& objective,
                           int n_iter, int n_init, std::uint64_t seed) {
    if (n_iter < 1) throw std::invalid_argument("bayes_optimize: n_iter must be >= 1");
    n_init = std::min(std::max(n_init, 1), n_iter);

    Rng rng(derive_seed(seed, 0xbae5));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    auto draw = [&]() {
        std::vector<double> x(dim);
        for (auto& v : x) v = uni(rng);
        return x;
    };

    BayesResult result;
    result.best_value = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> xs;
    std::vector<double> fs;

    const double lengthscale = 0.3 * std::sqrt(static_cast<double>(dim));

    auto record = [&](std::vector<double> x, const std::string& tag) {
        double f = objective(x);
        if (f > result.best_value) {
            result.best_value = f;
            result.best_x = x;
        }
        result.history.push_back({x, f, tag});
        xs.push_back(std::move(x));
        fs.push_back(f);
    };

    for (int t = 0; t < n_init; ++t) record(draw(), "init");

    for (int t = n_init; t < n_iter; ++t) {
        double fmin = *std::min_element(fs.begin(), fs.end());
        double fmax = *std::max_element(fs.begin(), fs.end());
        if (fmax - fmin <= 0.0) {
            // surrogate degenerate: all observations equal
            record(draw(), "fallback");
            continue;
        }

        const auto m = static_cast<Eigen::Index>(xs.size());
        double fmean = std::accumulate(fs.begin(), fs.end(), 0.0) / static_cast<double>(m);
        double fvar = 0.0;
        for (double f : fs) fvar += (f - fmean) * (f - fmean);
        double fstd = std::sqrt(fvar / static_cast<double>(m));

        auto kernel = [&](std::span<const double> a, std::span<const double> b) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < dim; ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
            return std::exp(-d2 / (2.0 * lengthscale * lengthscale));
        };

        Eigen::MatrixXd K(m, m);
        Eigen::VectorXd z(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            z(i) = (fs[static_cast<std::size_t>(i)] - fmean) / fstd;
            for (Eigen::Index j = 0; j < m; ++j)
                K(i, j) = kernel(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)]);
            K(i, i) += kJitter;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(K);
        Eigen::VectorXd alpha = llt.solve(z);

        double best_z = (result.best_value - fmean) / fstd;
        double best_ei = -1.0;
        std::vector<double> best_cand;
        for (int c = 0; c < 512; ++c) {
            std::vector<double> cand = draw();
            Eigen::VectorXd kx(m);
            for (Eigen::Index i = 0; i < m; ++i)
                kx(i) = kernel(cand, xs[static_cast<std::size_t>(i)]);
            double mu = kx.dot(alpha);
            Eigen::VectorXd v = llt.matrixL().solve(kx);
            double var = 1.0 + kJitter - v.squaredNorm();
            double sd = var > 0.0 ? std::sqrt(var) : 0.0;
            double ei;
            if (sd <= 0.0) {
                ei = std::max(mu - best_z - kXi, 0.0);
            } else {
                double imp = mu - best_z - kXi;
                double u = imp / sd;
                ei = imp * norm_cdf(u) + sd * norm_pdf(u);
            }
            if (ei > best_ei) {
                best_ei = ei;
                best_cand = std::move(cand);
            }
        }
        record(std::move(best_cand), "ei");
    }
    return result;
}

TuneResult bayes_search(const SearchSpace& space, const TuneConfig& config, const Matrix& X,
                        std::span<const double> y) {
    if (X.rows() == 0) throw std::invalid_argument("bayes_search: empty data");

    TuneResult result;
    std::vector<std::vector<double>> trial_folds;
    auto objective = [&](std::span<const double> x) {
        ForestParams p = decode_params(
            space, x, derive_seed(config.seed, 0xbe5, result.trials.size()));
        TrialRecord rec;
        rec.params = p;
        rec.mean_score = cv_objective(p, config, X, y, rec.fold_scores);
        result.trials.push_back(rec);
        return rec.mean_score;
    };

    int n_init = std::max(10, config.n_iter / 10);
    BayesResult br = bayes_optimize(encoding_dim(space), objective, config.n_iter, n_init,
                                    config.seed);
    for (std::size_t i = 0; i < result.trials.size() && i < br.history.size(); ++i)
        result.trials[i].proposal = br.history[i].proposal;

    double best_score = -std::numeric_limits<double>::infinity();
    for (const auto& rec : result.trials)
        if (rec.mean_score > best_score) {
            best_score = rec.mean_score;
            result.best = rec.params;
        }
    return result;
}

ForestParams select_by_rai(
    const std::vector<std::pair<ForestParams, IntervalMetrics>>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("select_by_rai: empty candidate list");
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
        if (candidates[i].second.rai > candidates[best].second.rai) best = i;
    return candidates[best].first;
}

std::string trials_to_jsonl(const std::vector<TrialRecord>& trials) {
    std::string out;
    for (const auto& t : trials) {
        nlohmann::ordered_json j{{"n_estimators", t.params.n_estimators},
                                 {"max_depth", t.params.tree.max_depth},
                                 {"min_samples_split", t.params.tree.min_samples_split},
                                 {"min_samples_leaf", t.params.tree.min_samples_leaf},
                                 {"max_features", t.params.tree.max_features.str()},
                                 {"fold_scores", t.fold_scores},
                                 {"mean_score", t.mean_score},
                                 {"proposal", t.proposal}};
        out += j.dump();
        out += "\n";
    }
    return out;
}

}  // namespace aadt
