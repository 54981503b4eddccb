#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "aadt/table.hpp"

namespace fs = std::filesystem;
using namespace aadt;

namespace {

std::string write_tmp(const std::string& name, const std::string& text) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << text;
    return p.string();
}

FeatureTable small_table() {
    FeatureTable t;
    t.add_column({"a", {1, 2, 3, 4, 5}, {0, 0, 0, 0, 0}});
    t.add_column({"b", {10, 20, 30, 40, 50}, {0, 0, 0, 0, 0}});
    t.add_column({"cls", {1, 2, 1, 3, 2}, {0, 0, 0, 0, 0}});
    t.add_column({"y", {1, 1, 2, 3, 5}, {0, 0, 0, 0, 0}});
    t.set_target_name("y");
    return t;
}

}  // namespace

TEST_CASE("load_table parses missing cells and values") {
    auto path = write_tmp("tbl1.csv", "a,b,y\n1,,3\n4,5,6\nNA,8,9\n");
    auto t = load_table(path, "y");
    CHECK(t.n_rows() == 3);
    CHECK(t.n_cols() == 3);
    CHECK(t.total_missing() == 2);
    CHECK(t.column("a").values[1] == 4.0);
    CHECK(t.column("b").missing[0] == 1);
    CHECK(t.column("a").missing[2] == 1);
    CHECK(t.target_name() == "y");
}

TEST_CASE("load_table rejects bad inputs") {
    CHECK_THROWS(load_table("/nonexistent/file.csv", "y"));
    auto no_target = write_tmp("tbl2.csv", "a,b\n1,2\n");
    CHECK_THROWS(load_table(no_target, "y"));
    auto dup = write_tmp("tbl3.csv", "a,a,y\n1,2,3\n");
    CHECK_THROWS(load_table(dup, "y"));
    auto garbled = write_tmp("tbl4.csv", "a,y\nfoo,3\n");
    CHECK_THROWS(load_table(garbled, "y"));
}

TEST_CASE("save/load round-trips a synthetic wide table exactly") {
    auto manifest = default_synth_manifest(6, 5);
    auto t = synth_generate(211, manifest, 17, 0.3, {.missing_fraction = 0.08});
    auto path = (fs::temp_directory_path() / "roundtrip.csv").string();
    save_table(t, path);
    auto t2 = load_table(path, "aadt");
    REQUIRE(t2.n_rows() == t.n_rows());
    REQUIRE(t2.n_cols() == t.n_cols());
    for (std::size_t c = 0; c < t.n_cols(); ++c) {
        CHECK(t.column(c).name == t2.column(c).name);
        CHECK(t.column(c).missing == t2.column(c).missing);
        for (std::size_t r = 0; r < t.n_rows(); ++r)
            if (!t.column(c).missing[r])
                CHECK(t.column(c).values[r] == t2.column(c).values[r]);
    }
    // second save produces identical bytes
    auto path2 = (fs::temp_directory_path() / "roundtrip2.csv").string();
    save_table(t2, path2);
    std::ifstream f1(path), f2(path2);
    std::string s1((std::istreambuf_iterator<char>(f1)), {});
    std::string s2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(s1 == s2);
}

TEST_CASE("filter_rows keeps matching rows and logs counts") {
    auto t = small_table();
    auto [kept, log] = filter_rows(t, "cls", {1.0, 2.0});
    CHECK(kept.n_rows() == 4);
    CHECK(log.rows_before == 5);
    CHECK(log.rows_after == 4);
    CHECK(kept.column("a").values == std::vector<double>{1, 2, 3, 5});

    auto [all, log2] = filter_rows(t, "cls", {1.0, 2.0, 3.0});
    CHECK(all.n_rows() == 5);
    CHECK_THROWS(filter_rows(t, "nope", {1.0}));
}

TEST_CASE("drop_sparse_columns applies the 25% threshold and keeps target") {
    FeatureTable t;
    t.add_column({"dense", {1, 2, 3, 4}, {0, 0, 0, 0}});
    t.add_column({"sparse", {0, 0, 3, 4}, {1, 1, 0, 0}});   // 50% missing
    t.add_column({"border", {0, 2, 3, 4}, {1, 0, 0, 0}});   // 25% missing: kept
    t.add_column({"y", {0, 1, 2, 0}, {1, 0, 0, 1}});        // target never dropped
    t.set_target_name("y");
    auto [kept, log] = drop_sparse_columns(t, 0.25);
    CHECK(kept.has_column("dense"));
    CHECK(!kept.has_column("sparse"));
    CHECK(kept.has_column("border"));
    CHECK(kept.has_column("y"));
    CHECK(log.cols_before == 4);
    CHECK(log.cols_after == 3);
    CHECK(log.dropped_columns == std::vector<std::string>{"sparse"});

    auto [same, log2] = drop_sparse_columns(small_table(), 0.25);
    CHECK(same.n_cols() == 4);
    CHECK(log2.dropped_columns.empty());
}

TEST_CASE("drop_incomplete_rows leaves zero missing cells") {
    FeatureTable t;
    t.add_column({"a", {1, 2, 3, 4}, {0, 1, 0, 0}});
    t.add_column({"y", {5, 6, 7, 8}, {0, 0, 0, 0}});
    t.set_target_name("y");
    auto [kept, log] = drop_incomplete_rows(t);
    CHECK(kept.n_rows() == 3);
    CHECK(kept.total_missing() == 0);
    CHECK(log.rows_before == 4);
    CHECK(log.rows_after == 3);

    FeatureTable all_bad;
    all_bad.add_column({"a", {1}, {1}});
    all_bad.set_target_name("a");
    CHECK_THROWS(drop_incomplete_rows(all_bad));
}

TEST_CASE("sparse-column then incomplete-row drop yields a complete table") {
    auto manifest = default_synth_manifest(4, 5);
    auto t = synth_generate(300, manifest, 3, 0.3, {.missing_fraction = 0.3});
    auto [t1, l1] = drop_sparse_columns(t, 0.25);
    auto [t2, l2] = drop_incomplete_rows(t1);
    CHECK(t2.total_missing() == 0);
    CHECK(l2.rows_after == t2.n_rows());
}

TEST_CASE("log_transform_target") {
    FeatureTable t;
    t.add_column({"y", {1.0, std::exp(1.0), 10.0}, {0, 0, 0}});
    t.set_target_name("y");
    auto lt = log_transform_target(t);
    CHECK(lt.column("y").values[0] == doctest::Approx(0.0));
    CHECK(lt.column("y").values[1] == doctest::Approx(1.0));
    CHECK(lt.log_target());
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(std::exp(lt.column("y").values[i]) ==
              doctest::Approx(t.column("y").values[i]).epsilon(1e-12));

    FeatureTable bad;
    bad.add_column({"y", {1.0, 0.0}, {0, 0}});
    bad.set_target_name("y");
    CHECK_THROWS(log_transform_target(bad));
}

TEST_CASE("split sizes, determinism, and bijection") {
    auto manifest = default_synth_manifest(2, 3);
    auto t = synth_generate(2247, manifest, 9, 0.2);
    auto [train, test] = split(t, {.train_fraction = 0.8, .seed = 5});
    CHECK(train.n_rows() == 1798);
    CHECK(test.n_rows() == 449);

    auto [train2, test2] = split(t, {.train_fraction = 0.8, .seed = 5});
    CHECK(train2.column("aadt").values == train.column("aadt").values);
    CHECK(test2.column("aadt").values == test.column("aadt").values);

    // partition: multiset of target values matches the original
    std::vector<double> joined = train.column("aadt").values;
    auto tv = test.column("aadt").values;
    joined.insert(joined.end(), tv.begin(), tv.end());
    auto orig = t.column("aadt").values;
    std::sort(joined.begin(), joined.end());
    std::sort(orig.begin(), orig.end());
    CHECK(joined == orig);

    auto small = synth_generate(10, manifest, 1, 0.2);
    auto [tr10, te10] = split(small, {.train_fraction = 0.8, .seed = 1});
    CHECK(tr10.n_rows() == 8);
    CHECK(te10.n_rows() == 2);
}

TEST_CASE("synth_generate determinism and group correlation") {
    auto manifest = default_synth_manifest(4, 5);
    auto a = synth_generate(400, manifest, 123, 0.3);
    auto b = synth_generate(400, manifest, 123, 0.3);
    for (std::size_t c = 0; c < a.n_cols(); ++c)
        CHECK(a.column(c).values == b.column(c).values);

    // within-group mean absolute pairwise correlation >= 0.5
    for (const auto& [gname, feats] : manifest.groups) {
        double sum_corr = 0.0;
        int n_pairs = 0;
        for (std::size_t i = 0; i < feats.size(); ++i) {
            for (std::size_t j = i + 1; j < feats.size(); ++j) {
                const auto& u = a.column(feats[i]).values;
                const auto& v = a.column(feats[j]).values;
                double mu = 0, mv = 0;
                for (std::size_t r = 0; r < u.size(); ++r) {
                    mu += u[r];
                    mv += v[r];
                }
                mu /= u.size();
                mv /= v.size();
                double suv = 0, suu = 0, svv = 0;
                for (std::size_t r = 0; r < u.size(); ++r) {
                    suv += (u[r] - mu) * (v[r] - mv);
                    suu += (u[r] - mu) * (u[r] - mu);
                    svv += (v[r] - mv) * (v[r] - mv);
                }
                sum_corr += std::abs(suv / std::sqrt(suu * svv));
                ++n_pairs;
            }
        }
        CHECK(sum_corr / n_pairs >= 0.5);
    }

    CHECK_THROWS(synth_generate(0, manifest, 1, 0.1));
    CHECK_THROWS(synth_generate(10, GroupManifest{}, 1, 0.1));
    CHECK(a.column("aadt").values[0] > 0.0);
}

TEST_CASE("cleaning commutes with row permutation") {
    FeatureTable t;
    t.add_column({"a", {1, 2, 3, 4, 5, 6}, {0, 1, 0, 0, 1, 0}});
    t.add_column({"y", {9, 8, 7, 6, 5, 4}, {0, 0, 0, 0, 0, 0}});
    t.set_target_name("y");
    auto perm = t.select_rows({5, 3, 1, 0, 2, 4});
    auto [c1, l1] = drop_incomplete_rows(t);
    auto [c2, l2] = drop_incomplete_rows(perm);
    auto v1 = c1.column("y").values, v2 = c2.column("y").values;
    std::sort(v1.begin(), v1.end());
    std::sort(v2.begin(), v2.end());
    CHECK(v1 == v2);
}

TEST_CASE("manifest validation and JSON round trip") {
    auto m = default_synth_manifest(3, 4);
    m.validate();
    auto m2 = GroupManifest::from_json(m.to_json());
    CHECK(m2.groups == m.groups);

    GroupManifest dup;
    dup.groups = {{"g1", {"a", "b"}}, {"g2", {"b"}}};
    CHECK_THROWS(dup.validate());
    GroupManifest empty_group;
    empty_group.groups = {{"g1", {}}};
    CHECK_THROWS(empty_group.validate());
}
