#pragma once

#include <string>
#include <vector>

#include "aadt/table.hpp"

namespace aadt {

struct PcaGroupModel {
    std::string group;
    std::vector<std::string> feature_names;
    std::vector<double> mean;   // per feature
    std::vector<double> scale;  // per feature, > 0 (zero-std features get 1)
    // loadings: original_dim x retained_dim, column-major, orthonormal columns
    std::vector<double> loadings;
    std::size_t retained = 0;
    std::vector<double> explained_variance_ratio;  // one per retained component
    bool degenerate = false;  // whole group constant

    std::size_t original_dim() const { return feature_names.size(); }
    double loading(std::size_t feature, std::size_t component) const {
        return loadings[component * original_dim() + feature];
    }
};

// One model per manifest group. Retained dimension is the smallest r whose
// cumulative explained-variance ratio reaches the threshold.
std::vector<PcaGroupModel> fit_group_pca(const FeatureTable& train, const GroupManifest& manifest,
                                         double variance_threshold = 0.995,
                                         bool parallel = true);

// Projects grouped features to {group}_PC{k} columns; columns not covered by
// any model (target, coordinates, extras) pass through unchanged.
FeatureTable pca_transform(const std::vector<PcaGroupModel>& models, const FeatureTable& table);

struct RetentionRow {
    std::string group;
    std::size_t original_dim = 0;
    std::size_t retained_dim = 0;
    double retention_rate = 0.0;
};

// Per-group rows plus a "Total" row.
std::vector<RetentionRow> retention_report(const std::vector<PcaGroupModel>& models);

std::string pca_models_to_json(const std::vector<PcaGroupModel>& models);
std::vector<PcaGroupModel> pca_models_from_json(const std::string& text);

namespace reference {
std::vector<PcaGroupModel> fit_group_pca_serial(const FeatureTable& train,
                                                const GroupManifest& manifest,
                                                double variance_threshold = 0.995);
}

}  // namespace aadt
