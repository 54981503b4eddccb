#include "aadt/pca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace aadt {

namespace {

PcaGroupModel fit_one_group(const FeatureTable& train, const std::string& group,
                            const std::vector<std::string>& feats, double threshold) {
    const std::size_t n = train.n_rows();
    const std::size_t d = feats.size();

    PcaGroupModel m;
    m.group = group;
    m.feature_names = feats;
    m.mean.resize(d);
    m.scale.resize(d);

    Eigen::MatrixXd X(n, d);
    for (std::size_t j = 0; j < d; ++j) {
        const Column& c = train.column(feats[j]);
        for (std::size_t i = 0; i < n; ++i) {
            if (c.missing[i])
                throw std::runtime_error("fit_group_pca: missing value in " + feats[j]);
            X(i, j) = c.values[i];
        }
    }

    for (std::size_t j = 0; j < d; ++j) {
        double mu = X.col(j).mean();
        double ss = (X.col(j).array() - mu).square().sum();
        double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
        m.mean[j] = mu;
        m.scale[j] = sd > 0.0 ? sd : 1.0;
        X.col(j) = (X.col(j).array() - mu) / m.scale[j];
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinV);
    Eigen::VectorXd sv = svd.singularValues();
    Eigen::MatrixXd V = svd.matrixV();  // d x min(n,d)

    double total = sv.array().square().sum();
    if (total <= 0.0) {
        // whole group constant: single zero component via the first axis
        m.degenerate = true;
        m.retained = 1;
        m.loadings.assign(d, 0.0);
        m.loadings[0] = 1.0;
        m.explained_variance_ratio = {0.0};
        return m;
    }

    const auto k = static_cast<std::size_t>(sv.size());
    std::vector<double> ratio(k);
    for (std::size_t c = 0; c < k; ++c) ratio[c] = sv(c) * sv(c) / total;

    std::size_t r = k;
    double cum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        cum += ratio[c];
        if (cum >= threshold) {
            r = c + 1;
            break;
        }
    }

    // sign convention: largest-magnitude loading entry positive
    for (std::size_t c = 0; c < r; ++c) {
        Eigen::Index imax = 0;
        V.col(c).cwiseAbs().maxCoeff(&imax);
        if (V(imax, c) < 0.0) V.col(c) = -V.col(c);
    }

    m.retained = r;
    m.loadings.resize(d * r);
    for (std::size_t c = 0; c < r; ++c)
        for (std::size_t j = 0; j < d; ++j) m.loadings[c * d + j] = V(j, c);
    m.explained_variance_ratio.assign(ratio.begin(), ratio.begin() + r);
    return m;
}

}  // namespace

std::vector<PcaGroupModel> fit_group_pca(const FeatureTable& train, const GroupManifest& manifest,
                                         double variance_threshold, bool parallel) {
    manifest.validate();
    if (variance_threshold <= 0.0 || variance_threshold > 1.0)
        throw std::invalid_argument("variance_threshold must be in (0, 1]");
    for (const auto& [g, feats] : manifest.groups)
        for (const auto& f : feats)
            if (!train.has_column(f))
                throw std::invalid_argument("manifest feature not in table: " + f);

    std::vector<PcaGroupModel> models(manifest.groups.size());
    const auto n = static_cast<std::ptrdiff_t>(manifest.groups.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t g = 0; g < n; ++g) {
        const auto& [gname, feats] = manifest.groups[g];
        models[g] = fit_one_group(train, gname, feats, variance_threshold);
    }
    return models;
}

namespace reference {
std::vector<PcaGroupModel> fit_group_pca_serial(const FeatureTable& train,
                                                const GroupManifest& manifest,
                                                double variance_threshold) {
    return fit_group_pca(train, manifest, variance_threshold, /*parallel=*/false);
}
}  // namespace reference

FeatureTable pca_transform(const std::vector<PcaGroupModel>& models, const FeatureTable& table) {
    std::set<std::string> grouped;
    for (const auto& m : models)
        for (const auto& f : m.feature_names) {
            if (!table.has_column(f))
                throw std::invalid_argument("pca_transform: feature missing from table: " + f);
            grouped.insert(f);
        }

    FeatureTable out;
    const std::size_t n = table.n_rows();
    for (const auto& m : models) {
        const std::size_t d = m.original_dim();
        std::vector<std::vector<double>> comps(m.retained, std::vector<double>(n, 0.0));
        std::vector<const Column*> cols(d);
        for (std::size_t j = 0; j < d; ++j) cols[j] = &table.column(m.feature_names[j]);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                if (cols[j]->missing[i])
                    throw std::runtime_error("pca_transform: missing value in " +
                                             m.feature_names[j]);
                double z = (cols[j]->values[i] - m.mean[j]) / m.scale[j];
                for (std::size_t c = 0; c < m.retained; ++c)
                    comps[c][i] += m.loadings[c * d + j] * z;
            }
        }
        for (std::size_t c = 0; c < m.retained; ++c) {
            Column col;
            col.name = m.group + "_PC" + std::to_string(c + 1);
            col.values = std::move(comps[c]);
            col.missing.assign(n, 0);
            out.add_column(std::move(col));
        }
    }
    for (const auto& c : table.columns())
        if (!grouped.count(c.name)) out.add_column(c);

    if (!table.target_name().empty()) out.set_target_name(table.target_name());
    if (table.coord_names())
        out.set_coord_names(table.coord_names()->first, table.coord_names()->second);
    out.set_log_target(table.log_target());
    return out;
}

std::vector<RetentionRow> retention_report(const std::vector<PcaGroupModel>& models) {
    std::vector<RetentionRow> rows;
    std::size_t tot_orig = 0, tot_ret = 0;
    for (const auto& m : models) {
        RetentionRow r;
        r.group = m.group;
        r.original_dim = m.original_dim();
        r.retained_dim = m.retained;
        r.retention_rate =
            static_cast<double>(m.retained) / static_cast<double>(m.original_dim());
        tot_orig += r.original_dim;
        tot_ret += r.retained_dim;
        rows.push_back(std::move(r));
    }
    RetentionRow total;
    total.group = "Total";
    total.original_dim = tot_orig;
    total.retained_dim = tot_ret;
    total.retention_rate =
        tot_orig > 0 ? static_cast<double>(tot_ret) / static_cast<double>(tot_orig) : 0.0;
    rows.push_back(std::move(total));
    return rows;
}

std::string pca_models_to_json(const std::vector<PcaGroupModel>& models) {
    nlohmann::ordered_json j;
    j["format"] = "pca-models";
    j["version"] = 1;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& m : models) {
        arr.push_back({{"group", m.group},
                       {"feature_names", m.feature_names},
                       {"mean", m.mean},
                       {"scale", m.scale},
                       {"retained", m.retained},
                       {"loadings", m.loadings},
                       {"explained_variance_ratio", m.explained_variance_ratio},
                       {"degenerate", m.degenerate}});
    }
    j["models"] = std::move(arr);
    return j.dump(2);
}

std::vector<PcaGroupModel> pca_models_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "pca-models")
        throw std::runtime_error("not a pca-models artifact");
    std::vector<PcaGroupModel> models;
    for (const auto& e : j.at("models")) {
        PcaGroupModel m;
        m.group = e.at("group").get<std::string>();
        m.feature_names = e.at("feature_names").get<std::vector<std::string>>();
        m.mean = e.at("mean").get<std::vector<double>>();
        m.scale = e.at("scale").get<std::vector<double>>();
        m.retained = e.at("retained").get<std::size_t>();
        m.loadings = e.at("loadings").get<std::vector<double>>();
        m.explained_variance_ratio =
            e.at("explained_variance_ratio").get<std::vector<double>>();
        m.degenerate = e.at("degenerate").get<bool>();
        models.push_back(std::move(m));
    }
    return models;
}

}  // namespace aadt
