#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "aadt/metrics.hpp"
#include "aadt/rng.hpp"

using namespace aadt;

TEST_CASE("point_metrics hand cases") {
    std::vector<double> y{1, 2, 3}, perfect{1, 2, 3};
    auto pm = point_metrics(y, perfect);
    CHECK(pm.rmse == 0.0);
    CHECK(pm.mae == 0.0);
    CHECK(pm.pseudo_r2 == doctest::Approx(1.0));

    std::vector<double> mean_pred{2, 2, 2};
    CHECK(point_metrics(y, mean_pred).pseudo_r2 == doctest::Approx(0.0));

    std::vector<double> off{1, 2, 6};
    auto m = point_metrics(y, off);
    CHECK(m.mae == doctest::Approx(1.0));
    CHECK(m.rmse == doctest::Approx(std::sqrt(3.0)));
    CHECK(m.pseudo_r2 == doctest::Approx(-3.5));
    CHECK(m.mape == doctest::Approx(100.0 / 3.0));

    CHECK_THROWS(point_metrics(y, std::vector<double>{1, 2}));
    CHECK_THROWS(point_metrics(std::vector<double>{0, 1, 2}, off));  // zero true for MAPE
    CHECK(point_metrics(y, perfect).cv_error == 0.0);  // zero MAE -> 0 without throwing
}

TEST_CASE("rmse >= mae on random residual vectors") {
    Rng rng(3141);
    std::normal_distribution<double> gauss(0.0, 2.0);
    std::uniform_real_distribution<double> uni(1.0, 10.0);
    for (int rep = 0; rep < 1000; ++rep) {
        std::size_t n = 2 + static_cast<std::size_t>(uni(rng));
        std::vector<double> y(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = uni(rng);
            p[i] = y[i] + gauss(rng);
        }
        auto m = point_metrics(y, p);
        CHECK(m.rmse >= m.mae - 1e-12);
    }
}

TEST_CASE("picp hand cases") {
    std::vector<double> y{1, 5, 10};
    std::vector<double> lo{0, 6, 9}, up{2, 7, 11};
    CHECK(picp(y, lo, up) == doctest::Approx(2.0 / 3.0));
    std::vector<double> wide_lo{0, 0, 0}, wide_up{20, 20, 20};
    CHECK(picp(y, wide_lo, wide_up) == 1.0);
    // closed interval: endpoint counts as covered
    std::vector<double> edge_lo{1, 5, 10}, edge_up{1, 5, 10};
    CHECK(picp(y, edge_lo, edge_up) == 1.0);
    CHECK_THROWS(picp(y, up, lo));  // lower > upper
    CHECK_THROWS(picp(y, lo, std::vector<double>{2, 7}));
}

TEST_CASE("naw hand cases") {
    std::vector<double> y{0, 4};  // range 4
    std::vector<double> lo{0, 0}, up{1, 3};
    CHECK(naw(y, lo, up) == doctest::Approx(0.5));
    std::vector<double> z{0, 0};
    CHECK(naw(y, z, z) == 0.0);
    CHECK_THROWS(naw(std::vector<double>{2, 2}, lo, up));  // zero range
}

TEST_CASE("rai hand cases") {
    CHECK(rai(1.0, 1.0) == doctest::Approx(1.0));
    CHECK(rai(0.5, 0.9) == doctest::Approx(1.45));
    CHECK(rai(0.23, 0.8822) == doctest::Approx(0.5 / 0.23 + 0.5 * 0.8822).epsilon(1e-9));
    CHECK_THROWS(rai(0.0, 0.5));
    CHECK_THROWS(rai(1.0, 0.5, 0.7, 0.7));  // weights must sum to 1
}

TEST_CASE("winkler hand cases") {
    std::vector<double> y{3}, lo{2}, up{4};
    auto [mean_in, per_in] = winkler(y, lo, up, 0.85);
    CHECK(mean_in == doctest::Approx(2.0));  // inside -> width
    CHECK(per_in[0] == doctest::Approx(2.0));

    std::vector<double> below{1};
    auto [mean_lo, per_lo] = winkler(below, lo, up, 0.85);
    CHECK(mean_lo == doctest::Approx(2.0 + (2.0 / 0.15) * 1.0).epsilon(1e-9));

    std::vector<double> above{6};
    auto [mean_hi, per_hi] = winkler(above, lo, up, 0.85);
    CHECK(mean_hi == doctest::Approx(2.0 + (2.0 / 0.15) * 2.0).epsilon(1e-9));

    CHECK_THROWS(winkler(y, lo, up, 0.0));
    CHECK_THROWS(winkler(y, lo, up, 1.0));
}

TEST_CASE("winkler dominates width with equality iff covered") {
    Rng rng(55);
    std::uniform_real_distribution<double> uni(0.0, 10.0);
    for (int rep = 0; rep < 200; ++rep) {
        double a = uni(rng), b = uni(rng);
        double lo = std::min(a, b), up = std::max(a, b);
        double y = uni(rng);
        auto [mean, per] = winkler(std::vector<double>{y}, std::vector<double>{lo},
                                   std::vector<double>{up}, 0.85);
        CHECK(per[0] >= up - lo - 1e-12);
        if (y >= lo && y <= up)
            CHECK(per[0] == doctest::Approx(up - lo));
        else
            CHECK(per[0] > up - lo);
    }
}

TEST_CASE("cv_width hand cases") {
    std::vector<double> lo{0, 0}, up{1, 3};
    CHECK(cv_width(lo, up) == doctest::Approx(100.0 * std::sqrt(2.0) / 2.0).epsilon(1e-9));
    std::vector<double> const_up{2, 2};
    CHECK(cv_width(lo, std::vector<double>{2, 2}) == doctest::Approx(0.0));
    CHECK_THROWS(cv_width(lo, lo));  // zero mean width
}

TEST_CASE("interval_metrics aggregates consistently") {
    std::vector<double> y{1, 5, 10, 3};
    std::vector<double> lo{0, 4, 9, 4}, up{2, 6, 11, 5};
    auto m = interval_metrics(y, lo, up, 0.85);
    CHECK(m.picp == doctest::Approx(picp(y, lo, up)));
    CHECK(m.naw == doctest::Approx(naw(y, lo, up)));
    CHECK(m.rai == doctest::Approx(rai(m.naw, m.picp)));
    CHECK(m.winkler_mean == doctest::Approx(winkler(y, lo, up, 0.85).first));
    CHECK(m.cv_width == doctest::Approx(cv_width(lo, up)));
    CHECK(m.coverage_level == 0.85);
}

TEST_CASE("metric invariances") {
    Rng rng(202);
    std::uniform_real_distribution<double> uni(1.0, 5.0);
    std::vector<double> y(30), lo(30), up(30);
    for (std::size_t i = 0; i < 30; ++i) {
        y[i] = uni(rng);
        lo[i] = y[i] - uni(rng) * 0.5;
        up[i] = y[i] + uni(rng) * 0.5;
    }
    // picp under a strictly monotone transform (exp)
    std::vector<double> ye(30), loe(30), upe(30);
    for (std::size_t i = 0; i < 30; ++i) {
        ye[i] = std::exp(y[i]);
        loe[i] = std::exp(lo[i]);
        upe[i] = std::exp(up[i]);
    }
    CHECK(picp(ye, loe, upe) == doctest::Approx(picp(y, lo, up)));

    // naw under affine rescaling
    std::vector<double> ya(30), loa(30), upa(30);
    for (std::size_t i = 0; i < 30; ++i) {
        ya[i] = 3.0 * y[i] + 7.0;
        loa[i] = 3.0 * lo[i] + 7.0;
        upa[i] = 3.0 * up[i] + 7.0;
    }
    CHECK(naw(ya, loa, upa) == doctest::Approx(naw(y, lo, up)).epsilon(1e-12));

    // widening covered intervals raises winkler and naw, leaves picp fixed
    auto base = interval_metrics(y, lo, up, 0.85);
    std::vector<double> lo_w(30), up_w(30);
    for (std::size_t i = 0; i < 30; ++i) {
        lo_w[i] = lo[i] - 0.1;
        up_w[i] = up[i] + 0.1;
    }
    auto wide = interval_metrics(y, lo_w, up_w, 0.85);
    CHECK(wide.picp == base.picp);
    CHECK(wide.naw > base.naw);
    CHECK(wide.winkler_mean > base.winkler_mean);
    CHECK(wide.rai < base.rai);  // NAW^-1 term strictly decreasing in width
}
