#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "cpwq/reference.hpp"
#include "cpwq/regression.hpp"
#include "cpwq/rng.hpp"

using namespace cpwq;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

const std::vector<int> kCounts{0, 12, 24, 49, 98};

LossDataset exact_line(double intercept, double slope) {
    LossDataset ds;
    for (int n : kCounts)
        ds.points.push_back({n, intercept + slope * n, std::nullopt});
    return ds;
}

// Independent oracle: dense grid search over (intercept, slope) whose ranges
// come from the data envelope, not from the analytic fit.
std::pair<double, double> grid_argmin(const LossDataset& ds) {
    double y_min = ds.points[0].loss, y_max = y_min;
    int x_min = ds.points[0].bridge_count, x_max = x_min;
    for (const auto& p : ds.points) {
        y_min = std::min(y_min, p.loss);
        y_max = std::max(y_max, p.loss);
        x_min = std::min(x_min, p.bridge_count);
        x_max = std::max(x_max, p.bridge_count);
    }
    const double slope_hi = 2.0 * (y_max - y_min) / (x_max - x_min);
    const int ns = 801, ni = 801;
    double best_cost = 1e300, best_slope = 0, best_int = 0;
    for (int i = 0; i < ns; ++i) {
        const double s = slope_hi * i / (ns - 1);
        for (int j = 0; j < ni; ++j) {
            const double b = y_min + (y_max - y_min) * j / (ni - 1);
            double cost = 0;
            for (const auto& p : ds.points) {
                const double r = p.loss - (b + s * p.bridge_count);
                cost += r * r;
            }
            if (cost < best_cost) {
                best_cost = cost;
                best_slope = s;
                best_int = b;
            }
        }
    }
    return {best_int, best_slope};
}

} // namespace

TEST_CASE("fit_loss_per_bridge recovers an exact line", "[regression]") {
    const auto r = fit_loss_per_bridge(exact_line(6.7e-7, 3.9e-8));
    REQUIRE(rel_err(r.slope, 3.9e-8) < 1e-12);
    REQUIRE(rel_err(r.intercept, 6.7e-7) < 1e-12);
    REQUIRE(r.r_squared > 1.0 - 1e-12);
    REQUIRE(r.slope_stderr < 1e-20);

    const auto high = fit_loss_per_bridge(exact_line(4e-7, 1.2e-8));
    REQUIRE(rel_err(high.slope, 1.2e-8) < 1e-12);
}

TEST_CASE("slope is invariant under a constant loss offset", "[regression]") {
    SeededRng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        LossDataset ds = exact_line(6.7e-7, 3.9e-8);
        for (auto& p : ds.points) p.loss += 2e-8 * rng.normal();
        const double offset = rng.uniform(1e-8, 1e-6);
        LossDataset shifted = ds;
        for (auto& p : shifted.points) p.loss += offset;
        const auto a = fit_loss_per_bridge(ds);
        const auto b = fit_loss_per_bridge(shifted);
        REQUIRE(rel_err(a.slope, b.slope) < 1e-9);
        REQUIRE(rel_err(b.intercept, a.intercept + offset) < 1e-9);
    }
}

TEST_CASE("result does not depend on point order", "[regression]") {
    SeededRng rng(17);
    LossDataset ds = exact_line(6.7e-7, 3.9e-8);
    for (auto& p : ds.points) p.loss += 2e-8 * rng.normal();

    LossDataset shuffled = ds;
    std::reverse(shuffled.points.begin(), shuffled.points.end());
    std::swap(shuffled.points[0], shuffled.points[2]);

    const auto a = fit_loss_per_bridge(ds);
    const auto b = fit_loss_per_bridge(shuffled);
    REQUIRE(std::memcmp(&a, &b, sizeof a) == 0);
}

TEST_CASE("closed form matches the grid-search oracle", "[regression]") {
    SeededRng rng(23);
    LossDataset ds = exact_line(6.7e-7, 3.9e-8);
    for (auto& p : ds.points) p.loss += 2e-8 * rng.normal();

    const auto r = fit_loss_per_bridge(ds);
    const auto [gi, gs] = grid_argmin(ds);
    // Grid resolution bounds the comparison.
    double y_min = 1e300, y_max = 0;
    for (const auto& p : ds.points) {
        y_min = std::min(y_min, p.loss);
        y_max = std::max(y_max, p.loss);
    }
    const double slope_step = 2.0 * (y_max - y_min) / 98.0 / 800.0;
    const double int_step = (y_max - y_min) / 800.0;
    REQUIRE(std::abs(r.slope - gs) <= slope_step);
    REQUIRE(std::abs(r.intercept - gi) <= int_step);
}

TEST_CASE("Monte-Carlo slope coverage", "[regression]") {
    // With noise sigma = 2e-8 on five points, the +-1 stderr interval should
    // cover the true slope in well over half the trials.
    SeededRng rng(2024);
    int covered = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        LossDataset ds = exact_line(6.7e-7, 3.9e-8);
        for (auto& p : ds.points) p.loss += 2e-8 * rng.normal();
        const auto r = fit_loss_per_bridge(ds);
        if (std::abs(r.slope - 3.9e-8) <= r.slope_stderr) ++covered;
    }
    INFO("covered = " << covered << " / " << trials);
    REQUIRE(covered >= trials * 60 / 100);
}

TEST_CASE("weighted fit", "[regression]") {
    // Equal errors reproduce the unweighted slope and intercept.
    SeededRng rng(31);
    LossDataset ds = exact_line(6.7e-7, 3.9e-8);
    for (auto& p : ds.points) p.loss += 2e-8 * rng.normal();
    LossDataset wds = ds;
    for (auto& p : wds.points) p.loss_err = 2e-8;
    const auto u = fit_loss_per_bridge(ds);
    const auto w = fit_loss_per_bridge(wds);
    REQUIRE(rel_err(u.slope, w.slope) < 1e-12);
    REQUIRE(rel_err(u.intercept, w.intercept) < 1e-12);

    // Down-weighting a corrupted point pulls the slope back to the truth.
    LossDataset corrupt = exact_line(6.7e-7, 3.9e-8);
    for (auto& p : corrupt.points) p.loss_err = 2e-9;
    corrupt.points[4].loss *= 2.0;
    corrupt.points[4].loss_err = corrupt.points[4].loss; // barely informative
    const auto wfit = fit_loss_per_bridge(corrupt);
    LossDataset naive = corrupt;
    for (auto& p : naive.points) p.loss_err.reset();
    const auto ufit = fit_loss_per_bridge(naive);
    REQUIRE(std::abs(wfit.slope - 3.9e-8) < std::abs(ufit.slope - 3.9e-8));

    // Mixed errors are rejected.
    LossDataset mixed = exact_line(6.7e-7, 3.9e-8);
    mixed.points[1].loss_err = 1e-9;
    REQUIRE_THROWS_AS(fit_loss_per_bridge(mixed), std::domain_error);
}

TEST_CASE("degenerate designs are rejected", "[regression]") {
    LossDataset ds;
    for (int i = 0; i < 5; ++i) ds.points.push_back({12, 1e-6 + i * 1e-8, std::nullopt});
    REQUIRE_THROWS_AS(fit_loss_per_bridge(ds), std::domain_error);

    LossDataset two;
    two.points = {{0, 1e-6, std::nullopt}, {12, 2e-6, std::nullopt}, {12, 2.1e-6, std::nullopt}};
    REQUIRE_THROWS_AS(fit_loss_per_bridge(two), std::domain_error);

    LossDataset neg = exact_line(6.7e-7, 3.9e-8);
    neg.points[0].loss = -1e-7;
    REQUIRE_THROWS_AS(fit_loss_per_bridge(neg), std::domain_error);
}

TEST_CASE("loss_per_capacitance", "[regression]") {
    const double cap = 0.266e-15;
    REQUIRE(rel_err(loss_per_capacitance(3.9e-8, cap), 1.4661654135338346e8) <
            1e-12);
    REQUIRE(rel_err(loss_per_femtofarad(3.9e-8, cap), 1.4661654135338346e-7) <
            1e-12);
    REQUIRE(loss_per_capacitance(0.0, cap) == 0.0);
    REQUIRE_THROWS_AS(loss_per_capacitance(3.9e-8, 0.0), std::domain_error);

    // Comparison constants stay available for reports.
    REQUIRE(reference::loss_per_femtofarad_low_power == 1.2e-7);
    REQUIRE(reference::photoresist_loss_per_femtofarad == 5.08e-8);
    // The per-bridge slope over the bridge capacitance lands within 25% of
    // the reported per-fF figure.
    REQUIRE(rel_err(loss_per_femtofarad(reference::loss_per_bridge_low_power, cap),
                    reference::loss_per_femtofarad_low_power) < 0.25);
}
