#include "aadt/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "aadt/rng.hpp"

namespace aadt {

std::size_t Column::missing_count() const {
    return static_cast<std::size_t>(std::count(missing.begin(), missing.end(), std::uint8_t{1}));
}

void FeatureTable::add_column(Column col) {
    if (col.values.size() != col.missing.size())
        throw std::invalid_argument("column '" + col.name + "': values/missing size mismatch");
    if (index_.count(col.name))
        throw std::invalid_argument("duplicate column name: " + col.name);
    if (first_column_) {
        n_rows_ = col.values.size();
        first_column_ = false;
    } else if (col.values.size() != n_rows_) {
        throw std::invalid_argument("column '" + col.name + "': row count mismatch");
    }
    index_[col.name] = cols_.size();
    cols_.push_back(std::move(col));
}

bool FeatureTable::has_column(const std::string& name) const { return index_.count(name) > 0; }

const Column& FeatureTable::column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("unknown column: " + name);
    return cols_[it->second];
}

std::size_t FeatureTable::column_index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("unknown column: " + name);
    return it->second;
}

void FeatureTable::set_target_name(std::string name) {
    if (!has_column(name)) throw std::invalid_argument("target column not found: " + name);
    target_name_ = std::move(name);
}

std::vector<std::string> FeatureTable::feature_names() const {
    std::vector<std::string> out;
    for (const auto& c : cols_) {
        if (c.name == target_name_) continue;
        if (coord_names_ && (c.name == coord_names_->first || c.name == coord_names_->second))
            continue;
        out.push_back(c.name);
    }
    return out;
}

std::size_t FeatureTable::total_missing() const {
    std::size_t n = 0;
    for (const auto& c : cols_) n += c.missing_count();
    return n;
}

Matrix FeatureTable::to_matrix(const std::vector<std::string>& names) const {
    Matrix m(n_rows_, names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
        const Column& c = column(names[j]);
        for (std::size_t i = 0; i < n_rows_; ++i) {
            if (c.missing[i])
                throw std::runtime_error("missing value in column '" + c.name + "' row " +
                                         std::to_string(i));
            m(i, j) = c.values[i];
        }
    }
    return m;
}

std::vector<double> FeatureTable::target_values() const {
    if (target_name_.empty()) throw std::runtime_error("no target column set");
    const Column& c = column(target_name_);
    for (std::size_t i = 0; i < n_rows_; ++i)
        if (c.missing[i])
            throw std::runtime_error("missing target value at row " + std::to_string(i));
    return c.values;
}

FeatureTable FeatureTable::select_rows(const std::vector<std::size_t>& rows) const {
    FeatureTable out;
    for (const auto& c : cols_) {
        Column nc;
        nc.name = c.name;
        nc.values.reserve(rows.size());
        nc.missing.reserve(rows.size());
        for (std::size_t r : rows) {
            nc.values.push_back(c.values[r]);
            nc.missing.push_back(c.missing[r]);
        }
        out.add_column(std::move(nc));
    }
    if (!target_name_.empty()) out.set_target_name(target_name_);
    if (coord_names_) out.set_coord_names(coord_names_->first, coord_names_->second);
    out.set_log_target(log_target_);
    return out;
}

std::string CleaningLog::to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& s : stages) {
        j.push_back({{"stage", s.name},
                     {"rows_before", s.rows_before},
                     {"rows_after", s.rows_after},
                     {"cols_before", s.cols_before},
                     {"cols_after", s.cols_after},
                     {"dropped_columns", s.dropped_columns}});
    }
    return j.dump(2);
}

std::vector<std::string> GroupManifest::all_features() const {
    std::vector<std::string> out;
    for (const auto& [g, feats] : groups) out.insert(out.end(), feats.begin(), feats.end());
    return out;
}

void GroupManifest::validate() const {
    std::set<std::string> seen;
    for (const auto& [g, feats] : groups) {
        if (feats.empty()) throw std::invalid_argument("empty feature group: " + g);
        for (const auto& f : feats)
            if (!seen.insert(f).second)
                throw std::invalid_argument("feature in more than one group: " + f);
    }
}

std::string GroupManifest::to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [g, feats] : groups) j[g] = feats;
    return j.dump(2);
}

GroupManifest GroupManifest::from_json(const std::string& text) {
    auto j = nlohmann::ordered_json::parse(text);
    GroupManifest m;
    for (auto& [key, val] : j.items())
        m.groups.emplace_back(key, val.get<std::vector<std::string>>());
    m.validate();
    return m;
}

GroupManifest GroupManifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void GroupManifest::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << to_json() << "\n";
}

// ---- CSV ----

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

FeatureTable load_table(const std::string& path, const std::string& target,
                        const std::string& missing_marker) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
    std::vector<std::string> header = split_csv_line(line);

    std::set<std::string> names(header.begin(), header.end());
    if (names.size() != header.size())
        throw std::runtime_error("duplicate column names in " + path);
    if (!names.count(target))
        throw std::runtime_error("target column '" + target + "' not found in " + path);

    std::vector<Column> cols(header.size());
    for (std::size_t j = 0; j < header.size(); ++j) cols[j].name = header[j];

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() && in.eof()) break;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error(path + ": row " + std::to_string(row + 1) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const std::string& cell = cells[j];
            if (cell.empty() || cell == missing_marker) {
                cols[j].values.push_back(0.0);
                cols[j].missing.push_back(1);
            } else {
                double v = 0.0;
                auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
                    throw std::runtime_error(path + ": unparseable cell '" + cell + "' at row " +
                                             std::to_string(row + 1) + " column " + header[j]);
                cols[j].values.push_back(v);
                cols[j].missing.push_back(0);
            }
        }
        ++row;
    }

    FeatureTable t;
    for (auto& c : cols) t.add_column(std::move(c));
    t.set_target_name(target);
    if (t.has_column("x") && t.has_column("y")) t.set_coord_names("x", "y");
    return t;
}

void save_table(const FeatureTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    const auto& cols = table.columns();
    for (std::size_t j = 0; j < cols.size(); ++j)
        out << cols[j].name << (j + 1 < cols.size() ? "," : "\n");
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (!cols[j].missing[i]) out << format_double(cols[j].values[i]);
            out << (j + 1 < cols.size() ? "," : "\n");
        }
    }
}

// ---- Cleaning ----

std::pair<FeatureTable, CleaningStage> filter_rows(const FeatureTable& table,
                                                   const std::string& column,
                                                   const std::set<double>& allowed) {
    const Column& c = table.column(column);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < table.n_rows(); ++i)
        if (!c.missing[i] && allowed.count(c.values[i])) keep.push_back(i);

    CleaningStage st;
    st.name = "filter_rows(" + column + ")";
    st.rows_before = table.n_rows();
    st.rows_after = keep.size();
    st.cols_before = st.cols_after = table.n_cols();
    return {table.select_rows(keep), st};
}

std::pair<FeatureTable, CleaningStage> drop_sparse_columns(const FeatureTable& table,
                                                           double max_missing_fraction) {
    if (max_missing_fraction < 0.0 || max_missing_fraction > 1.0)
        throw std::invalid_argument("max_missing_fraction must be in [0, 1]");

    CleaningStage st;
    st.name = "drop_sparse_columns";
    st.rows_before = st.rows_after = table.n_rows();
    st.cols_before = table.n_cols();

    FeatureTable out;
    const double n = static_cast<double>(table.n_rows());
    for (const auto& c : table.columns()) {
        bool is_target = c.name == table.target_name();
        double frac = n > 0 ? static_cast<double>(c.missing_count()) / n : 0.0;
        if (!is_target && frac > max_missing_fraction) {
            st.dropped_columns.push_back(c.name);
        } else {
            out.add_column(c);
        }
    }
    st.cols_after = out.n_cols();
    if (!table.target_name().empty()) out.set_target_name(table.target_name());
    if (table.coord_names() && out.has_column(table.coord_names()->first) &&
        out.has_column(table.coord_names()->second))
        out.set_coord_names(table.coord_names()->first, table.coord_names()->second);
    out.set_log_target(table.log_target());
    return {std::move(out), st};
}

std::pair<FeatureTable, CleaningStage> drop_incomplete_rows(const FeatureTable& table) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        bool complete = true;
        for (const auto& c : table.columns())
            if (c.missing[i]) {
                complete = false;
                break;
            }
        if (complete) keep.push_back(i);
    }
    if (keep.empty()) throw std::runtime_error("drop_incomplete_rows: no complete rows remain");

    CleaningStage st;
    st.name = "drop_incomplete_rows";
    st.rows_before = table.n_rows();
    st.rows_after = keep.size();
    st.cols_before = st.cols_after = table.n_cols();
    return {table.select_rows(keep), st};
}

FeatureTable log_transform_target(const FeatureTable& table) {
    if (table.log_target()) throw std::runtime_error("target already log-transformed");
    const Column& t = table.column(table.target_name());
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        if (t.missing[i])
            throw std::runtime_error("missing target at row " + std::to_string(i));
        if (t.values[i] <= 0.0)
            throw std::runtime_error("non-positive target value at row " + std::to_string(i));
    }
    FeatureTable out;
    for (const auto& c : table.columns()) {
        if (c.name == table.target_name()) {
            Column nc = c;
            for (auto& v : nc.values) v = std::log(v);
            out.add_column(std::move(nc));
        } else {
            out.add_column(c);
        }
    }
    out.set_target_name(table.target_name());
    if (table.coord_names())
        out.set_coord_names(table.coord_names()->first, table.coord_names()->second);
    out.set_log_target(true);
    return out;
}

std::pair<FeatureTable, FeatureTable> split(const FeatureTable& table, const SplitSpec& spec) {
    if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0)
        throw std::invalid_argument("train_fraction must be in (0, 1)");
    if (table.n_rows() < 2) throw std::invalid_argument("need at least 2 rows to split");

    std::vector<std::size_t> idx(table.n_rows());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(spec.seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    auto n_train = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(table.n_rows())));
    if (n_train == 0 || n_train == table.n_rows())
        throw std::runtime_error("degenerate split: one partition is empty");

    std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + n_train);
    std::vector<std::size_t> test_idx(idx.begin() + n_train, idx.end());
    return {table.select_rows(train_idx), table.select_rows(test_idx)};
}

// ---- Synthetic generator ----

GroupManifest default_synth_manifest(std::size_t n_buffer_groups, std::size_t features_per_group) {
    static const char* kinds[] = {"BCount", "employment", "population", "transport",
                                  "vehicles", "earnings", "junc"};
    static const int radii[] = {500, 800, 1000, 1600, 2000, 3200};
    GroupManifest m;
    // accessibility-style group plus per-radius buffer groups
    {
        std::vector<std::string> feats;
        for (std::size_t f = 0; f < features_per_group; ++f)
            feats.push_back("access_f" + std::to_string(f));
        m.groups.emplace_back("group_accessibility", std::move(feats));
    }
    for (std::size_t g = 0; g < n_buffer_groups; ++g) {
        const char* kind = kinds[g % 7];
        int radius = radii[(g / 7) % 6];
        std::string gname = "group_" + std::string(kind) + "_" + std::to_string(radius);
        std::vector<std::string> feats;
        for (std::size_t f = 0; f < features_per_group; ++f)
            feats.push_back(std::string(kind) + "_" + std::to_string(radius) + "_f" +
                            std::to_string(f));
        m.groups.emplace_back(std::move(gname), std::move(feats));
    }
    return m;
}

FeatureTable synth_generate(std::size_t n_rows, const GroupManifest& manifest,
                            std::uint64_t seed, double noise_scale, const SynthOptions& opts) {
    if (n_rows == 0) throw std::invalid_argument("synth_generate: n_rows must be positive");
    if (manifest.empty()) throw std::invalid_argument("synth_generate: empty manifest");
    manifest.validate();

    Rng coord_rng(derive_seed(seed, 1));
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    std::vector<double> xs(n_rows), ys(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) {
        xs[i] = uni(coord_rng) * opts.coord_extent;
        ys[i] = uni(coord_rng) * opts.coord_extent;
    }

    // latent spatial intensity: sum of Gaussian bumps on the plane
    const std::size_t n_bumps = 5;
    std::vector<double> bx(n_bumps), by(n_bumps), bw(n_bumps);
    Rng bump_rng(derive_seed(seed, 2));
    for (std::size_t b = 0; b < n_bumps; ++b) {
        bx[b] = uni(bump_rng) * opts.coord_extent;
        by[b] = uni(bump_rng) * opts.coord_extent;
        bw[b] = (0.1 + 0.2 * uni(bump_rng)) * opts.coord_extent;
    }
    std::vector<double> intensity(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) {
        double s = 0.0;
        for (std::size_t b = 0; b < n_bumps; ++b) {
            double dx = xs[i] - bx[b], dy = ys[i] - by[b];
            s += std::exp(-(dx * dx + dy * dy) / (2.0 * bw[b] * bw[b]));
        }
        intensity[i] = s;
    }

    FeatureTable out;
    {
        Column cx{"x", xs, std::vector<std::uint8_t>(n_rows, 0)};
        Column cy{"y", ys, std::vector<std::uint8_t>(n_rows, 0)};
        out.add_column(std::move(cx));
        out.add_column(std::move(cy));
    }

    // group-correlated features: shared latent factor per group (standardized
    // to unit variance) plus feature-level noise with amplitude 0.4, giving
    // pairwise correlation ~ 1/(1+0.16) ~ 0.86
    std::vector<std::vector<double>> group_means(manifest.groups.size(),
                                                 std::vector<double>(n_rows, 0.0));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t g = 0; g < manifest.groups.size(); ++g) {
        const auto& [gname, feats] = manifest.groups[g];
        Rng grng(derive_seed(seed, 100 + g));
        double spatial_w = 0.4 + 0.4 * uni(grng);
        std::vector<double> factor(n_rows);
        for (std::size_t i = 0; i < n_rows; ++i)
            factor[i] = spatial_w * intensity[i] + (1.0 - spatial_w) * gauss(grng);
        if (n_rows > 1) {
            double mean = 0.0;
            for (double v : factor) mean += v;
            mean /= static_cast<double>(n_rows);
            double var = 0.0;
            for (double v : factor) var += (v - mean) * (v - mean);
            var /= static_cast<double>(n_rows - 1);
            double sd = var > 0.0 ? std::sqrt(var) : 1.0;
            for (double& v : factor) v = (v - mean) / sd;
        }
        for (std::size_t f = 0; f < feats.size(); ++f) {
            Rng frng(derive_seed(seed, 1000 + g * 64 + f));
            double offset = 2.0 * uni(frng) - 1.0;
            double scale = 0.5 + uni(frng);
            Column col;
            col.name = feats[f];
            col.values.resize(n_rows);
            col.missing.assign(n_rows, 0);
            for (std::size_t i = 0; i < n_rows; ++i) {
                double v = factor[i] + 0.4 * gauss(frng);
                col.values[i] = offset + scale * v;
                group_means[g][i] += col.values[i] / static_cast<double>(feats.size());
            }
            out.add_column(std::move(col));
        }
    }

    if (opts.add_road_class) {
        Rng crng(derive_seed(seed, 3));
        Column col;
        col.name = "road_class";
        col.values.resize(n_rows);
        col.missing.assign(n_rows, 0);
        std::uniform_int_distribution<int> cls(1, 4);
        for (std::size_t i = 0; i < n_rows; ++i) col.values[i] = cls(crng);
        out.add_column(std::move(col));
    }

    // positive target: exp(linear signal in group means + heteroscedastic noise)
    {
        Rng trng(derive_seed(seed, 4));
        std::size_t n_signal = std::min<std::size_t>(3, manifest.groups.size());
        std::vector<double> beta(n_signal);
        for (std::size_t g = 0; g < n_signal; ++g) beta[g] = 0.5 + 0.5 * uni(trng);
        Column col;
        col.name = "aadt";
        col.values.resize(n_rows);
        col.missing.assign(n_rows, 0);
        for (std::size_t i = 0; i < n_rows; ++i) {
            double lin = 1.0;
            for (std::size_t g = 0; g < n_signal; ++g) lin += beta[g] * group_means[g][i];
            double het = 0.3 + 0.7 / (1.0 + std::exp(-intensity[i]));
            col.values[i] = std::exp(lin + noise_scale * het * gauss(trng));
        }
        out.add_column(std::move(col));
    }

    out.set_target_name("aadt");
    out.set_coord_names("x", "y");

    if (opts.missing_fraction > 0.0) {
        // knock out cells in a couple of feature columns only
        Rng mrng(derive_seed(seed, 5));
        auto feats = manifest.all_features();
        std::size_t n_cols_hit = std::min<std::size_t>(feats.size(), 2);
        FeatureTable holed;
        std::set<std::string> hit(feats.begin(), feats.begin() + n_cols_hit);
        for (const auto& c : out.columns()) {
            Column nc = c;
            if (hit.count(c.name)) {
                for (std::size_t i = 0; i < n_rows; ++i)
                    if (uni(mrng) < opts.missing_fraction) {
                        nc.missing[i] = 1;
                        nc.values[i] = 0.0;
                    }
            }
            holed.add_column(std::move(nc));
        }
        holed.set_target_name("aadt");
        holed.set_coord_names("x", "y");
        return holed;
    }
    return out;
}

}  // namespace aadt
