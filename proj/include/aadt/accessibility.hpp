#pragma once

#include <string>
#include <vector>

#include "aadt/table.hpp"

namespace aadt {

struct Zone {
    std::string id;
    double x = 0.0;
    double y = 0.0;
    double mass = 0.0;  // population or employment
    double area = 1.0;  // squared length units, > 0
};

enum class AccessKind { Gravity, Exponential };

struct AccessibilityVector {
    AccessKind kind = AccessKind::Gravity;
    double alpha = 1.0;
    std::vector<std::string> zone_ids;
    std::vector<double> potential;
};

// Euclidean centroid distance; the intra-zonal case (a == b by id) uses the
// effective internal radius sqrt(area / pi).
double pairwise_distance(const Zone& a, const Zone& b);

// rho_i = (1/n) * m_i * sum_j m_j / d_ij^alpha, j running over all zones
// including i with the intra-zonal distance.
AccessibilityVector gravity_potential(const std::vector<Zone>& zones, double alpha,
                                      bool parallel = true);

// rho_i = sum_j m_j * exp(-alpha * d_ij), with d_ii = 0.
AccessibilityVector exponential_potential(const std::vector<Zone>& zones, double alpha,
                                          bool parallel = true);

std::vector<Zone> load_zones(const std::string& path);

// Appends potential columns rhoG_a{alpha} / rhoE_a{alpha} for each alpha,
// matching table rows to zones by index.
FeatureTable append_potentials(const FeatureTable& table, const std::vector<Zone>& zones,
                               const std::vector<double>& alphas);

namespace reference {
// Serial implementations kept as the comparison baseline for the parallel
// kernels.
AccessibilityVector gravity_potential_serial(const std::vector<Zone>& zones, double alpha);
AccessibilityVector exponential_potential_serial(const std::vector<Zone>& zones, double alpha);
}  // namespace reference

}  // namespace aadt
