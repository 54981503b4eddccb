#include "aadt/apps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aadt {

double RiskParams::beta_for(Severity s) const {
    switch (s) {
        case Severity::Fatal: return beta_fatal;
        case Severity::Serious: return beta_serious;
        default: return beta_slight;
    }
}

double dlog_width(const PredictionInterval& interval) {
    if (interval.median <= 0.0)
        throw std::invalid_argument("dlog_width: median must be positive (raw scale)");
    return (interval.upper - interval.lower) / interval.median;
}

std::vector<double> trim_extremes(std::span<const double> values, double threshold) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values)
        if (v <= threshold) out.push_back(v);
    return out;
}

double bpr_time(const BprParams& params, double q) {
    if (params.t_f <= 0.0 || params.q_k <= 0.0)
        throw std::invalid_argument("bpr_time: t_f and q_k must be positive");
    if (q < 0.0) throw std::invalid_argument("bpr_time: flow must be nonnegative");
    return params.t_f * (1.0 + params.alpha * std::pow(q / params.q_k, params.beta));
}

double travel_time_delta(const BprParams& params, double q_base, double dlog) {
    if (dlog < 0.0) throw std::invalid_argument("travel_time_delta: dlog must be nonnegative");
    return bpr_time(params, q_base * (1.0 + dlog)) - bpr_time(params, q_base);
}

double collision_delta_r(const RiskParams& params, double v_after, Severity severity) {
    if (v_after <= 0.0 || params.v_base <= 0.0)
        throw std::invalid_argument("collision_delta_r: speeds must be positive");
    return std::pow(v_after / params.v_base, params.beta_for(severity));
}

namespace {

// quantile with linear interpolation between order statistics
double interp_quantile(std::vector<double> sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    double h = p * static_cast<double>(n - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, n - 1);
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

RiskSummary risk_summary(std::span<const double> delta_rs) {
    if (delta_rs.empty()) throw std::invalid_argument("risk_summary: empty input");
    RiskSummary s;
    const auto n = static_cast<double>(delta_rs.size());
    for (double v : delta_rs) s.mean += v;
    s.mean /= n;
    if (delta_rs.size() > 1) {
        for (double v : delta_rs) s.variance += (v - s.mean) * (v - s.mean);
        s.variance /= (n - 1.0);
    }
    std::vector<double> sorted(delta_rs.begin(), delta_rs.end());
    std::sort(sorted.begin(), sorted.end());
    s.iqr = interp_quantile(sorted, 0.75) - interp_quantile(sorted, 0.25);
    return s;
}

SimpleRegressionResult simple_regression(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("simple_regression: length mismatch");
    if (x.size() < 3) throw std::invalid_argument("simple_regression: need at least 3 points");
    const auto n = static_cast<double>(x.size());
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xbar += x[i];
        ybar += y[i];
    }
    xbar /= n;
    ybar /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
        syy += (y[i] - ybar) * (y[i] - ybar);
    }
    if (sxx <= 0.0) throw std::invalid_argument("simple_regression: x has zero variance");

    SimpleRegressionResult r;
    r.slope = sxy / sxx;
    r.intercept = ybar - r.slope * xbar;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double resid = y[i] - (r.intercept + r.slope * x[i]);
        ssr += resid * resid;
    }
    r.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    double sigma2 = x.size() > 2 ? ssr / (n - 2.0) : 0.0;
    r.slope_std_error = std::sqrt(sigma2 / sxx);
    return r;
}

}  // namespace aadt
