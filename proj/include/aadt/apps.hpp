#pragma once

#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "aadt/forest.hpp"

namespace aadt {

struct BprParams {
    double t_f = 15.0;    // free-flow minutes
    double q_k = 100.0;   // capacity flow
    double alpha = 0.15;
    double beta = 4.0;
};

enum class Severity { Fatal, Serious, Slight };

struct RiskParams {
    double v_base = 40.0;  // mph
    double beta_fatal = 3.6;
    double beta_serious = 2.4;
    double beta_slight = 1.2;

    double beta_for(Severity s) const;
};

struct SimpleRegressionResult {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_std_error = 0.0;
    double r2 = 0.0;
};

struct RiskSummary {
    double mean = 0.0;
    double variance = 0.0;  // n-1 denominator
    double iqr = 0.0;       // Q3 - Q1, linear interpolation
};

// (upper - lower) / median, on the raw scale
double dlog_width(const PredictionInterval& interval);

// Drops entries strictly above the threshold.
std::vector<double> trim_extremes(std::span<const double> values, double threshold);

// BPR volume-delay: t = t_f * (1 + alpha * (q / q_k)^beta)
double bpr_time(const BprParams& params, double q);

// bpr_time at q_base * (1 + dlog) minus bpr_time at q_base
double travel_time_delta(const BprParams& params, double q_base, double dlog);

// (v_after / v_base)^beta for the severity's power-law exponent
double collision_delta_r(const RiskParams& params, double v_after, Severity severity);

RiskSummary risk_summary(std::span<const double> delta_rs);

SimpleRegressionResult simple_regression(std::span<const double> x, std::span<const double> y);

}  // namespace aadt
