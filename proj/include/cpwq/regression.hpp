#pragma once

// Ordinary least squares of resonator loss against bridge count, with slope
// and intercept standard errors, plus the per-capacitance rate conversion.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "errors.hpp"

namespace cpwq {

struct LossPoint {
    int bridge_count = 0;
    double loss = 0.0; // 1/Qi
    std::optional<double> loss_err;
};

enum class PowerLabel { low, high };

struct LossDataset {
    std::vector<LossPoint> points;
    PowerLabel power_label = PowerLabel::low;
};

struct SlopeResult {
    double intercept = 0.0;        // bare loss at zero bridges
    double slope = 0.0;            // added loss per bridge
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
    double r_squared = 0.0;
};

// Straight-line fit of loss vs bridge count. Weighted by 1/err^2 when every
// point carries an error, unweighted otherwise (mixed datasets are rejected).
// Points are sorted and accumulated in long double so the result does not
// depend on input order.
inline SlopeResult fit_loss_per_bridge(const LossDataset& dataset) {
    const auto& pts = dataset.points;
    if (pts.size() < 3)
        throw std::domain_error("need at least 3 points");

    std::size_t with_err = 0;
    for (const auto& p : pts) {
        if (!(p.loss > 0.0))
            throw std::domain_error("loss values must be positive");
        if (p.loss_err) {
            check_positive(*p.loss_err, "loss_err");
            ++with_err;
        }
    }
    if (with_err != 0 && with_err != pts.size())
        throw std::domain_error("loss_err must be given for all points or none");
    const bool weighted = with_err == pts.size();

    std::vector<LossPoint> sorted(pts);
    std::sort(sorted.begin(), sorted.end(), [](const LossPoint& a, const LossPoint& b) {
        if (a.bridge_count != b.bridge_count) return a.bridge_count < b.bridge_count;
        return a.loss < b.loss;
    });

    int distinct = 1;
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].bridge_count != sorted[i - 1].bridge_count) ++distinct;
    if (distinct < 3)
        throw std::domain_error(
            "degenerate design: need at least 3 distinct bridge counts");

    long double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : sorted) {
        const long double w = weighted ? 1.0L / ((long double)*p.loss_err * (long double)*p.loss_err) : 1.0L;
        const long double x = p.bridge_count;
        const long double y = p.loss;
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    const long double xbar = sx / sw;
    const long double ybar = sy / sw;
    const long double sxx_c = sxx - sx * xbar; // sum w (x - xbar)^2
    const long double sxy_c = sxy - sx * ybar;

    SlopeResult r;
    const long double slope = sxy_c / sxx_c;
    const long double intercept = ybar - slope * xbar;
    r.slope = static_cast<double>(slope);
    r.intercept = static_cast<double>(intercept);

    long double ss_res = 0, ss_tot = 0;
    for (const auto& p : sorted) {
        const long double w = weighted ? 1.0L / ((long double)*p.loss_err * (long double)*p.loss_err) : 1.0L;
        const long double res = (long double)p.loss - (intercept + slope * p.bridge_count);
        const long double dev = (long double)p.loss - ybar;
        ss_res += w * res * res;
        ss_tot += w * dev * dev;
    }
    r.r_squared = ss_tot > 0 ? static_cast<double>(1.0L - ss_res / ss_tot) : 1.0;

    const std::size_t n = sorted.size();
    if (weighted) {
        // Errors taken at face value: covariance from the normal equations.
        r.slope_stderr = static_cast<double>(std::sqrt((double)(1.0L / sxx_c)));
        r.intercept_stderr =
            static_cast<double>(std::sqrt((double)(1.0L / sw + xbar * xbar / sxx_c)));
    } else {
        const long double sigma2 = n > 2 ? ss_res / (long double)(n - 2) : 0.0L;
        r.slope_stderr = static_cast<double>(std::sqrt((double)(sigma2 / sxx_c)));
        r.intercept_stderr = static_cast<double>(
            std::sqrt((double)(sigma2 * (1.0L / sw + xbar * xbar / sxx_c))));
    }
    return r;
}

// Converts a per-bridge slope to a rate per farad of added capacitance.
inline double loss_per_capacitance(double slope_per_bridge, double bridge_cap) {
    check_positive(bridge_cap, "bridge_cap");
    check_nonnegative(slope_per_bridge, "slope_per_bridge");
    return slope_per_bridge / bridge_cap;
}

// The same rate per femtofarad, the unit used for reported comparisons.
inline double loss_per_femtofarad(double slope_per_bridge, double bridge_cap) {
    return loss_per_capacitance(slope_per_bridge, bridge_cap) * 1e-15;
}

} // namespace cpwq
