#include "aadt/accessibility.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace aadt {

double pairwise_distance(const Zone& a, const Zone& b) {
    if (&a == &b || a.id == b.id) {
        if (a.area <= 0.0) throw std::invalid_argument("zone area must be positive: " + a.id);
        return std::sqrt(a.area / std::numbers::pi);
    }
    double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

namespace {

void check_zones(const std::vector<Zone>& zones, double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("alpha must be positive");
    for (const auto& z : zones) {
        if (z.area <= 0.0) throw std::invalid_argument("zone area must be positive: " + z.id);
        if (z.mass < 0.0) throw std::invalid_argument("zone mass must be nonnegative: " + z.id);
    }
}

double gravity_one(const std::vector<Zone>& zones, std::size_t i, double alpha) {
    const double n = static_cast<double>(zones.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < zones.size(); ++j) {
        double d = (i == j) ? std::sqrt(zones[i].area / std::numbers::pi)
                            : pairwise_distance(zones[i], zones[j]);
        acc += zones[j].mass / std::pow(d, alpha);
    }
    return zones[i].mass * acc / n;
}

double exponential_one(const std::vector<Zone>& zones, std::size_t i, double alpha) {
    double acc = 0.0;
    for (std::size_t j = 0; j < zones.size(); ++j) {
        double d = (i == j) ? 0.0 : pairwise_distance(zones[i], zones[j]);
        acc += zones[j].mass * std::exp(-alpha * d);
    }
    return acc;
}

}  // namespace

AccessibilityVector gravity_potential(const std::vector<Zone>& zones, double alpha,
                                      bool parallel) {
    check_zones(zones, alpha);
    AccessibilityVector out;
    out.kind = AccessKind::Gravity;
    out.alpha = alpha;
    out.zone_ids.reserve(zones.size());
    for (const auto& z : zones) out.zone_ids.push_back(z.id);
    out.potential.resize(zones.size());

    const auto n = static_cast<std::ptrdiff_t>(zones.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out.potential[i] = gravity_one(zones, static_cast<std::size_t>(i), alpha);
    return out;
}

AccessibilityVector exponential_potential(const std::vector<Zone>& zones, double alpha,
                                          bool parallel) {
    check_zones(zones, alpha);
    AccessibilityVector out;
    out.kind = AccessKind::Exponential;
    out.alpha = alpha;
    out.zone_ids.reserve(zones.size());
    for (const auto& z : zones) out.zone_ids.push_back(z.id);
    out.potential.resize(zones.size());

    const auto n = static_cast<std::ptrdiff_t>(zones.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out.potential[i] = exponential_one(zones, static_cast<std::size_t>(i), alpha);
    return out;
}

namespace reference {

AccessibilityVector gravity_potential_serial(const std::vector<Zone>& zones, double alpha) {
    return gravity_potential(zones, alpha, /*parallel=*/false);
}

AccessibilityVector exponential_potential_serial(const std::vector<Zone>& zones, double alpha) {
    return exponential_potential(zones, alpha, /*parallel=*/false);
}

}  // namespace reference

std::vector<Zone> load_zones(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open zones file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty zones file: " + path);
    // expected header: id,x,y,mass,area
    std::vector<Zone> zones;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        Zone z;
        std::string cell;
        std::getline(ss, z.id, ',');
        auto read = [&](double& v) {
            if (!std::getline(ss, cell, ','))
                throw std::runtime_error("malformed zone row: " + line);
            v = std::stod(cell);
        };
        read(z.x);
        read(z.y);
        read(z.mass);
        read(z.area);
        zones.push_back(std::move(z));
    }
    return zones;
}

FeatureTable append_potentials(const FeatureTable& table, const std::vector<Zone>& zones,
                               const std::vector<double>& alphas) {
    if (zones.size() != table.n_rows())
        throw std::invalid_argument("zone count does not match table rows");
    FeatureTable out;
    for (const auto& c : table.columns()) out.add_column(c);

    auto fmt_alpha = [](double a) {
        // 1.5 -> "15", 1.0 -> "10", matching the rho{G,E}a{alpha*10} naming
        double tenths = a * 10.0;
        if (std::abs(tenths - std::round(tenths)) < 1e-9)
            return std::to_string(static_cast<long long>(std::llround(tenths)));
        std::string s = std::to_string(a);
        std::string clean;
        for (char ch : s)
            if (ch != '.') clean.push_back(ch);
        while (clean.size() > 1 && clean.back() == '0') clean.pop_back();
        return clean;
    };

    for (double a : alphas) {
        auto g = gravity_potential(zones, a);
        auto e = exponential_potential(zones, a);
        Column cg{"rhoG_a" + fmt_alpha(a), g.potential,
                  std::vector<std::uint8_t>(zones.size(), 0)};
        Column ce{"rhoE_a" + fmt_alpha(a), e.potential,
                  std::vector<std::uint8_t>(zones.size(), 0)};
        out.add_column(std::move(cg));
        out.add_column(std::move(ce));
    }
    if (!table.target_name().empty()) out.set_target_name(table.target_name());
    if (table.coord_names())
        out.set_coord_names(table.coord_names()->first, table.coord_names()->second);
    out.set_log_target(table.log_target());
    return out;
}

}  // namespace aadt
