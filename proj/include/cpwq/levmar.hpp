#pragma once

// Small dense Levenberg-Marquardt minimizer for nonlinear least squares with
// a handful of parameters. The Jacobian comes from forward differences; the
// damped normal equations are solved by Gaussian elimination with partial
// pivoting.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace cpwq {

struct LevMarOptions {
    int max_iterations = 200;
    double step_tolerance = 1e-10;    // relative parameter step
    double gradient_tolerance = 1e-12;
    double initial_lambda = 1e-3;
};

struct LevMarResult {
    std::vector<double> params;
    double cost = 0.0; // sum of squared residuals at the optimum
    int iterations = 0;
    bool converged = false;
    // sigma^2 (J^T J)^-1, row-major p x p; sigma^2 = cost / (m - p).
    std::vector<double> covariance;
};

namespace detail {

// Solves A x = b in place for small dense systems.
inline bool solve_dense(std::vector<double> a, std::vector<double> b,
                        std::size_t n, std::vector<double>& x) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col]))
                pivot = r;
        if (std::abs(a[pivot * n + col]) < 1e-300) return false;
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c)
                std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) s -= a[ri * n + c] * x[c];
        x[ri] = s / a[ri * n + ri];
    }
    return true;
}

// Inverse of a symmetric positive (semi)definite matrix by Gauss-Jordan;
// returns an empty vector when singular.
inline std::vector<double> invert_dense(std::vector<double> a, std::size_t n) {
    std::vector<double> inv(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col]))
                pivot = r;
        if (std::abs(a[pivot * n + col]) < 1e-300) return {};
        if (pivot != col)
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a[col * n + c], a[pivot * n + c]);
                std::swap(inv[col * n + c], inv[pivot * n + c]);
            }
        const double d = a[col * n + col];
        for (std::size_t c = 0; c < n; ++c) {
            a[col * n + c] /= d;
            inv[col * n + c] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r * n + col];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a[r * n + c] -= f * a[col * n + c];
                inv[r * n + c] -= f * inv[col * n + c];
            }
        }
    }
    return inv;
}

} // namespace detail

// residuals(p, r) fills r with the residual vector at parameters p; the
// residual length must not change between calls.
inline LevMarResult levmar(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>&
        residuals,
    std::vector<double> params, const LevMarOptions& options = {}) {
    const std::size_t np = params.size();
    if (np == 0) throw std::invalid_argument("levmar: no parameters");

    std::vector<double> r;
    residuals(params, r);
    const std::size_t m = r.size();
    if (m < np) throw std::invalid_argument("levmar: fewer residuals than parameters");

    auto cost_of = [](const std::vector<double>& v) {
        double c = 0.0;
        for (double x : v) c += x * x;
        return c;
    };

    double cost = cost_of(r);
    double lambda = options.initial_lambda;
    std::vector<double> jac(m * np);     // row-major, m x np
    std::vector<double> jtj(np * np), jtr(np), step, trial_r, trial(np);

    LevMarResult out;
    out.params = params;
    out.cost = cost;

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        // Forward-difference Jacobian; parameters are assumed O(1) or larger.
        for (std::size_t j = 0; j < np; ++j) {
            const double h = 1.5e-8 * (std::abs(params[j]) + 1.0);
            std::vector<double> pj(params);
            pj[j] += h;
            std::vector<double> rj;
            residuals(pj, rj);
            for (std::size_t i = 0; i < m; ++i)
                jac[i * np + j] = (rj[i] - r[i]) / h;
        }
        for (std::size_t a = 0; a < np; ++a) {
            jtr[a] = 0.0;
            for (std::size_t b = a; b < np; ++b) {
                double s = 0.0;
                for (std::size_t i = 0; i < m; ++i)
                    s += jac[i * np + a] * jac[i * np + b];
                jtj[a * np + b] = s;
                jtj[b * np + a] = s;
            }
            for (std::size_t i = 0; i < m; ++i) jtr[a] += jac[i * np + a] * r[i];
        }

        double grad_inf = 0.0;
        for (std::size_t a = 0; a < np; ++a)
            grad_inf = std::max(grad_inf, std::abs(jtr[a]));
        if (grad_inf < options.gradient_tolerance) {
            out.converged = true;
            break;
        }

        bool stepped = false;
        for (int attempt = 0; attempt < 32; ++attempt) {
            std::vector<double> damped(jtj);
            for (std::size_t a = 0; a < np; ++a)
                damped[a * np + a] += lambda * std::max(jtj[a * np + a], 1e-300);
            std::vector<double> neg_g(np);
            for (std::size_t a = 0; a < np; ++a) neg_g[a] = -jtr[a];
            if (!detail::solve_dense(damped, neg_g, np, step)) {
                lambda *= 10.0;
                continue;
            }
            for (std::size_t a = 0; a < np; ++a) trial[a] = params[a] + step[a];
            residuals(trial, trial_r);
            const double trial_cost = cost_of(trial_r);
            if (trial_cost < cost) {
                double step_norm = 0.0, p_norm = 0.0;
                for (std::size_t a = 0; a < np; ++a) {
                    step_norm += step[a] * step[a];
                    p_norm += params[a] * params[a];
                }
                params = trial;
                r = trial_r;
                const double improvement = cost - trial_cost;
                cost = trial_cost;
                lambda = std::max(lambda / 3.0, 1e-14);
                stepped = true;
                if (std::sqrt(step_norm) <=
                        options.step_tolerance * (std::sqrt(p_norm) + options.step_tolerance) ||
                    improvement <= 1e-16 * (cost + 1e-300)) {
                    out.converged = true;
                }
                break;
            }
            lambda *= 5.0;
        }
        if (!stepped) {
            // Damping saturated without improvement: local minimum.
            out.converged = true;
            break;
        }
        if (out.converged) break;
    }

    out.params = params;
    out.cost = cost;
    out.iterations = iter + 1;

    if (m > np) {
        // Fresh Jacobian at the optimum for the covariance estimate.
        for (std::size_t j = 0; j < np; ++j) {
            const double h = 1.5e-8 * (std::abs(params[j]) + 1.0);
            std::vector<double> pj(params);
            pj[j] += h;
            std::vector<double> rj;
            residuals(pj, rj);
            for (std::size_t i = 0; i < m; ++i)
                jac[i * np + j] = (rj[i] - r[i]) / h;
        }
        for (std::size_t a = 0; a < np; ++a)
            for (std::size_t b = a; b < np; ++b) {
                double s = 0.0;
                for (std::size_t i = 0; i < m; ++i)
                    s += jac[i * np + a] * jac[i * np + b];
                jtj[a * np + b] = s;
                jtj[b * np + a] = s;
            }
        auto inv = detail::invert_dense(jtj, np);
        if (!inv.empty()) {
            const double sigma2 = cost / static_cast<double>(m - np);
            for (double& v : inv) v *= sigma2;
            out.covariance = std::move(inv);
        }
    }
    return out;
}

} // namespace cpwq
