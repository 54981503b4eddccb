#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace aadt {

struct PointMetrics {
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;       // percent
    double pseudo_r2 = 0.0;
    double cv_error = 0.0;   // percent; std of |err| over mean |err|
};

struct IntervalMetrics {
    double picp = 0.0;  // fraction in [0, 1]
    double naw = 0.0;
    double rai = 0.0;
    double winkler_mean = 0.0;
    double cv_width = 0.0;  // percent
    double coverage_level = 0.0;
    std::string scale = "log";
};

PointMetrics point_metrics(std::span<const double> y_true, std::span<const double> y_pred);

double picp(std::span<const double> y_true, std::span<const double> lower,
            std::span<const double> upper);

double naw(std::span<const double> y_true, std::span<const double> lower,
           std::span<const double> upper);

// rai = w1 / naw + w2 * picp, with picp a fraction in [0, 1]
double rai(double naw_value, double picp_fraction, double w1 = 0.5, double w2 = 0.5);

std::pair<double, std::vector<double>> winkler(std::span<const double> y_true,
                                               std::span<const double> lower,
                                               std::span<const double> upper, double coverage);

double cv_width(std::span<const double> lower, std::span<const double> upper);

IntervalMetrics interval_metrics(std::span<const double> y_true, std::span<const double> lower,
                                 std::span<const double> upper, double coverage);

}  // namespace aadt
