#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aadt/matrix.hpp"

namespace aadt {

struct Column {
    std::string name;
    std::vector<double> values;
    std::vector<std::uint8_t> missing;  // parallel to values; 1 = missing

    std::size_t missing_count() const;
};

// Observation table with named numeric columns and explicit per-cell missing
// flags. Immutable by convention once built: every cleaning operation returns
// a new table.
class FeatureTable {
public:
    FeatureTable() = default;

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return cols_.size(); }

    void add_column(Column col);

    bool has_column(const std::string& name) const;
    const Column& column(const std::string& name) const;
    const Column& column(std::size_t i) const { return cols_[i]; }
    std::size_t column_index(const std::string& name) const;

    const std::vector<Column>& columns() const { return cols_; }

    const std::string& target_name() const { return target_name_; }
    void set_target_name(std::string name);

    const std::optional<std::pair<std::string, std::string>>& coord_names() const {
        return coord_names_;
    }
    void set_coord_names(std::string x, std::string y) {
        coord_names_ = {std::move(x), std::move(y)};
    }

    bool log_target() const { return log_target_; }
    void set_log_target(bool v) { log_target_ = v; }

    // Feature columns: everything except target and coordinates.
    std::vector<std::string> feature_names() const;

    std::size_t total_missing() const;

    // Dense matrix over the given columns; throws if any referenced cell is
    // missing or a column is absent.
    Matrix to_matrix(const std::vector<std::string>& names) const;
    std::vector<double> target_values() const;

    FeatureTable select_rows(const std::vector<std::size_t>& rows) const;

private:
    std::size_t n_rows_ = 0;
    bool first_column_ = true;
    std::vector<Column> cols_;
    std::unordered_map<std::string, std::size_t> index_;
    std::string target_name_;
    std::optional<std::pair<std::string, std::string>> coord_names_;
    bool log_target_ = false;
};

struct CleaningStage {
    std::string name;
    std::size_t rows_before = 0;
    std::size_t rows_after = 0;
    std::size_t cols_before = 0;
    std::size_t cols_after = 0;
    std::vector<std::string> dropped_columns;
};

struct CleaningLog {
    std::vector<CleaningStage> stages;
    std::string to_json() const;
};

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 42;
};

// Feature-name -> group mapping for grouped PCA.
struct GroupManifest {
    // group name -> ordered feature names
    std::vector<std::pair<std::string, std::vector<std::string>>> groups;

    bool empty() const { return groups.empty(); }
    std::vector<std::string> all_features() const;
    void validate() const;  // no empty group, no feature in two groups

    std::string to_json() const;
    static GroupManifest from_json(const std::string& text);
    static GroupManifest load(const std::string& path);
    void save(const std::string& path) const;
};

// ---- CSV I/O ----

FeatureTable load_table(const std::string& path, const std::string& target,
                        const std::string& missing_marker = "NA");
void save_table(const FeatureTable& table, const std::string& path);

// ---- Cleaning pipeline (returns new tables; log records shape deltas) ----

std::pair<FeatureTable, CleaningStage> filter_rows(const FeatureTable& table,
                                                   const std::string& column,
                                                   const std::set<double>& allowed);

std::pair<FeatureTable, CleaningStage> drop_sparse_columns(const FeatureTable& table,
                                                           double max_missing_fraction = 0.25);

std::pair<FeatureTable, CleaningStage> drop_incomplete_rows(const FeatureTable& table);

FeatureTable log_transform_target(const FeatureTable& table);

std::pair<FeatureTable, FeatureTable> split(const FeatureTable& table, const SplitSpec& spec);

// ---- Synthetic data ----

struct SynthOptions {
    double missing_fraction = 0.0;   // applied to a subset of feature columns
    bool add_road_class = true;      // categorical column for the filter stage
    double coord_extent = 100000.0;  // metres
};

FeatureTable synth_generate(std::size_t n_rows, const GroupManifest& manifest,
                            std::uint64_t seed, double noise_scale,
                            const SynthOptions& opts = {});

// Desk-scale manifest mirroring the grouped spatial-feature layout
// (per-radius buffer groups plus ungrouped basics).
GroupManifest default_synth_manifest(std::size_t n_buffer_groups = 4,
                                     std::size_t features_per_group = 5);

}  // namespace aadt
