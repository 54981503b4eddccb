#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "aadt/accessibility.hpp"
#include "aadt/rng.hpp"

using namespace aadt;
constexpr double kPi = std::numbers::pi;

namespace {

std::vector<Zone> random_zones(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1000.0);
    std::vector<Zone> zones(n);
    for (std::size_t i = 0; i < n; ++i)
        zones[i] = {"z" + std::to_string(i), uni(rng), uni(rng), 1.0 + uni(rng), 1.0 + uni(rng)};
    return zones;
}

}  // namespace

TEST_CASE("pairwise_distance") {
    Zone a{"a", 0, 0, 1, kPi};
    Zone b{"b", 3, 4, 1, 1};
    CHECK(pairwise_distance(a, b) == doctest::Approx(5.0));
    CHECK(pairwise_distance(a, a) == doctest::Approx(1.0));  // sqrt(pi/pi)
    Zone c{"c", 10, 10, 1, 4.0 * kPi};
    CHECK(pairwise_distance(c, c) == doctest::Approx(2.0));
}

TEST_CASE("gravity_potential hand cases") {
    // single zone m=2, area=pi, alpha=1: (1/1)*2*(2/1) = 4
    std::vector<Zone> one{{"z", 0, 0, 2, kPi}};
    auto g = gravity_potential(one, 1.0);
    CHECK(g.potential.size() == 1);
    CHECK(g.potential[0] == doctest::Approx(4.0));

    // zero mass -> zero potential
    std::vector<Zone> zones{{"a", 0, 0, 0, 1}, {"b", 10, 0, 5, 1}};
    auto g2 = gravity_potential(zones, 1.0);
    CHECK(g2.potential[0] == 0.0);

    // symmetric pair -> equal potentials
    std::vector<Zone> sym{{"a", 0, 0, 3, 2}, {"b", 7, 0, 3, 2}};
    auto g3 = gravity_potential(sym, 1.5);
    CHECK(g3.potential[0] == doctest::Approx(g3.potential[1]));

    CHECK_THROWS(gravity_potential(one, 0.0));
    CHECK_THROWS(gravity_potential(one, -1.0));
}

TEST_CASE("exponential_potential hand cases") {
    std::vector<Zone> one{{"z", 0, 0, 7, 3}};
    CHECK(exponential_potential(one, 2.0).potential[0] == doctest::Approx(7.0));

    std::vector<Zone> pair{{"a", 0, 0, 1, 1}, {"b", 0, 5, 1, 1}};
    double alpha = 0.3;
    auto e = exponential_potential(pair, alpha);
    CHECK(e.potential[0] == doctest::Approx(1.0 + std::exp(-alpha * 5.0)));
    CHECK(e.potential[1] == doctest::Approx(1.0 + std::exp(-alpha * 5.0)));

    // alpha large -> potential tends to own mass
    auto big = exponential_potential(pair, 50.0);
    CHECK(big.potential[0] == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS(exponential_potential(pair, 0.0));
}

TEST_CASE("rigid-motion invariance") {
    auto zones = random_zones(40, 77);
    auto base_g = gravity_potential(zones, 1.5);
    auto base_e = exponential_potential(zones, 0.01);

    double theta = 0.83, tx = 500.0, ty = -120.0;
    auto moved = zones;
    for (auto& z : moved) {
        double x = z.x * std::cos(theta) - z.y * std::sin(theta) + tx;
        double y = z.x * std::sin(theta) + z.y * std::cos(theta) + ty;
        z.x = x;
        z.y = y;
    }
    auto mg = gravity_potential(moved, 1.5);
    auto me = exponential_potential(moved, 0.01);
    for (std::size_t i = 0; i < zones.size(); ++i) {
        CHECK(mg.potential[i] == doctest::Approx(base_g.potential[i]).epsilon(1e-9));
        CHECK(me.potential[i] == doctest::Approx(base_e.potential[i]).epsilon(1e-9));
    }
}

TEST_CASE("gravity decreases when a pair moves apart") {
    std::vector<Zone> zones{{"a", 0, 0, 2, 1}, {"b", 4, 0, 3, 1}, {"c", 1, 9, 1, 1}};
    auto before = gravity_potential(zones, 1.2);
    zones[1].x = 40.0;  // move b away from a
    auto after = gravity_potential(zones, 1.2);
    CHECK(after.potential[0] < before.potential[0]);
    CHECK(after.potential[1] < before.potential[1]);
}

TEST_CASE("exponential potential bounds") {
    auto zones = random_zones(30, 5);
    double total_mass = 0.0;
    for (const auto& z : zones) total_mass += z.mass;
    auto e = exponential_potential(zones, 0.002);
    for (std::size_t i = 0; i < zones.size(); ++i) {
        CHECK(e.potential[i] <= total_mass + 1e-9);
        CHECK(e.potential[i] >= zones[i].mass - 1e-12);
    }
}

TEST_CASE("parallel kernels match the serial reference bit-for-bit") {
    auto zones = random_zones(257, 31);
    for (double alpha : {1.0, 1.5, 2.0}) {
        auto gs = reference::gravity_potential_serial(zones, alpha);
        auto gp = gravity_potential(zones, alpha, true);
        CHECK(gs.potential == gp.potential);
        auto es = reference::exponential_potential_serial(zones, alpha * 0.01);
        auto ep = exponential_potential(zones, alpha * 0.01, true);
        CHECK(es.potential == ep.potential);
    }
}

TEST_CASE("load_zones and append_potentials") {
    namespace fs = std::filesystem;
    auto path = (fs::temp_directory_path() / "zones.csv").string();
    {
        std::ofstream out(path);
        out << "id,x,y,mass,area\nz0,0,0,2,3.14159265358979\nz1,3,4,5,1\n";
    }
    auto zones = load_zones(path);
    REQUIRE(zones.size() == 2);
    CHECK(zones[1].mass == 5.0);

    FeatureTable t;
    t.add_column({"y", {1.0, 2.0}, {0, 0}});
    t.set_target_name("y");
    auto out = append_potentials(t, zones, {1.0, 1.5, 2.0});
    CHECK(out.has_column("rhoG_a10"));
    CHECK(out.has_column("rhoG_a15"));
    CHECK(out.has_column("rhoE_a20"));
    CHECK(out.n_cols() == 1 + 6);
    auto expect = gravity_potential(zones, 1.0);
    CHECK(out.column("rhoG_a10").values == expect.potential);
}
