#include "aadt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aadt {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b, const char* what) {
    if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

double sample_std(std::span<const double> v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

PointMetrics point_metrics(std::span<const double> y_true, std::span<const double> y_pred) {
    check_lengths(y_true, y_pred, "point_metrics");
    if (y_true.size() < 2) throw std::invalid_argument("point_metrics: need at least 2 points");
    const auto n = static_cast<double>(y_true.size());

    double sse = 0.0, sae = 0.0, sape = 0.0, ybar = 0.0;
    std::vector<double> abs_err(y_true.size());
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        double e = y_true[i] - y_pred[i];
        sse += e * e;
        abs_err[i] = std::abs(e);
        sae += abs_err[i];
        if (y_true[i] == 0.0)
            throw std::invalid_argument("point_metrics: zero true value, MAPE undefined");
        sape += std::abs(e / y_true[i]);
        ybar += y_true[i];
    }
    ybar /= n;
    double sst = 0.0;
    for (double yt : y_true) sst += (yt - ybar) * (yt - ybar);

    PointMetrics m;
    m.rmse = std::sqrt(sse / n);
    m.mae = sae / n;
    m.mape = 100.0 * sape / n;
    m.pseudo_r2 = sst > 0.0 ? 1.0 - sse / sst : (sse == 0.0 ? 1.0 : 0.0);
    double mu = m.mae;
    m.cv_error = mu > 0.0 ? 100.0 * sample_std(abs_err, mu) / mu : 0.0;
    return m;
}

double picp(std::span<const double> y_true, std::span<const double> lower,
            std::span<const double> upper) {
    check_lengths(y_true, lower, "picp");
    check_lengths(y_true, upper, "picp");
    if (y_true.empty()) throw std::invalid_argument("picp: empty input");
    std::size_t covered = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (lower[i] > upper[i]) throw std::invalid_argument("picp: lower > upper");
        if (lower[i] <= y_true[i] && y_true[i] <= upper[i]) ++covered;
    }
    return static_cast<double>(covered) / static_cast<double>(y_true.size());
}

double naw(std::span<const double> y_true, std::span<const double> lower,
           std::span<const double> upper) {
    check_lengths(y_true, lower, "naw");
    check_lengths(y_true, upper, "naw");
    if (y_true.empty()) throw std::invalid_argument("naw: empty input");
    auto [mn, mx] = std::minmax_element(y_true.begin(), y_true.end());
    double range = *mx - *mn;
    if (range <= 0.0) throw std::invalid_argument("naw: zero range of true values");
    double s = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) s += (upper[i] - lower[i]) / range;
    return s / static_cast<double>(y_true.size());
}

double rai(double naw_value, double picp_fraction, double w1, double w2) {
    if (naw_value <= 0.0) throw std::invalid_argument("rai: naw must be positive");
    if (std::abs(w1 + w2 - 1.0) > 1e-12) throw std::invalid_argument("rai: weights must sum to 1");
    if (picp_fraction < 0.0 || picp_fraction > 1.0)
        throw std::invalid_argument("rai: picp must be a fraction in [0, 1]");
    return w1 / naw_value + w2 * picp_fraction;
}

std::pair<double, std::vector<double>> winkler(std::span<const double> y_true,
                                               std::span<const double> lower,
                                               std::span<const double> upper, double coverage) {
    check_lengths(y_true, lower, "winkler");
    check_lengths(y_true, upper, "winkler");
    if (coverage <= 0.0 || coverage >= 1.0)
        throw std::invalid_argument("winkler: coverage must be in (0, 1)");
    if (y_true.empty()) throw std::invalid_argument("winkler: empty input");
    const double alpha = 1.0 - coverage;
    std::vector<double> per(y_true.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (lower[i] > upper[i]) throw std::invalid_argument("winkler: lower > upper");
        double width = upper[i] - lower[i];
        double s = width;
        if (y_true[i] < lower[i])
            s += (2.0 / alpha) * (lower[i] - y_true[i]);
        else if (y_true[i] > upper[i])
            s += (2.0 / alpha) * (y_true[i] - upper[i]);
        per[i] = s;
        sum += s;
    }
    return {sum / static_cast<double>(y_true.size()), std::move(per)};
}

double cv_width(std::span<const double> lower, std::span<const double> upper) {
    check_lengths(lower, upper, "cv_width");
    if (lower.empty()) throw std::invalid_argument("cv_width: empty input");
    std::vector<double> widths(lower.size());
    double mu = 0.0;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        widths[i] = upper[i] - lower[i];
        mu += widths[i];
    }
    mu /= static_cast<double>(widths.size());
    if (mu <= 0.0) throw std::invalid_argument("cv_width: zero mean width");
    return 100.0 * sample_std(widths, mu) / mu;
}

IntervalMetrics interval_metrics(std::span<const double> y_true, std::span<const double> lower,
                                 std::span<const double> upper, double coverage) {
    IntervalMetrics m;
    m.coverage_level = coverage;
    m.picp = picp(y_true, lower, upper);
    m.naw = naw(y_true, lower, upper);
    m.rai = m.naw > 0.0 ? rai(m.naw, m.picp) : 0.0;
    m.winkler_mean = winkler(y_true, lower, upper, coverage).first;
    m.cv_width = cv_width(lower, upper);
    return m;
}

}  // namespace aadt
