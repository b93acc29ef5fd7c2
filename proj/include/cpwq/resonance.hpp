#pragma once

// Notch-type resonator scattering traces: synthesis, least-squares extraction
// of internal and coupling quality factors, photon-number calibration, and
// the two-level-system power-dependence fit.
//
// Model (diameter-corrected notch, complex coupling):
//   S21(f) = 1 - (Ql / |Qc|) e^{i phi} / (1 + 2 i Ql (f - f0) / f0)
// with 1/Ql = 1/Qi + cos(phi)/|Qc|.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "levmar.hpp"
#include "rng.hpp"

namespace cpwq {

struct S21Trace {
    std::vector<double> frequencies;          // Hz, strictly increasing
    std::vector<std::complex<double>> s21;    // linear complex transmission
    std::optional<double> input_power_dbm;    // at the feedline reference plane

    void validate() const {
        if (frequencies.empty())
            throw std::domain_error("trace is empty");
        if (frequencies.size() != s21.size())
            throw std::domain_error("frequency and s21 lengths differ");
        for (std::size_t i = 1; i < frequencies.size(); ++i)
            if (!(frequencies[i] > frequencies[i - 1]))
                throw std::domain_error("frequencies must be strictly increasing");
    }
};

struct FitResult {
    double f0 = 0.0;
    double qi = 0.0;
    double qc = 0.0; // |Qc|
    double ql = 0.0;
    double asymmetry_angle = 0.0; // phi, radians
    double residual_rms = 0.0;    // complex rms of data - model

    double f0_err = 0.0;
    double qi_err = 0.0;
    double qc_err = 0.0;
    double ql_err = 0.0;
    double asymmetry_angle_err = 0.0;

    // Non-fatal diagnostics, e.g. a trace narrower than +-3 linewidths.
    std::string warning;
};

struct PowerSweepPoint {
    double mean_photon_number = 0.0;
    double qi = 0.0;
    double qi_err = 0.0;
};

struct PowerSweepResult {
    std::vector<PowerSweepPoint> points;
};

// Saturable two-level-system loss plus a power-independent floor.
struct TlsFitResult {
    double f_tan_delta = 0.0;           // F tan(delta) at zero power
    double critical_photon_number = 0.0;
    double saturation_exponent = 0.0;
    double power_independent_loss = 0.0; // 1/Q at full saturation
};

class fit_error : public std::runtime_error {
public:
    explicit fit_error(const std::string& msg) : std::runtime_error(msg) {}
    fit_error(const std::string& msg, FitResult best)
        : std::runtime_error(msg), best_(std::move(best)) {}

    const std::optional<FitResult>& best_so_far() const noexcept { return best_; }

private:
    std::optional<FitResult> best_;
};

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n < 2) throw std::domain_error("linspace needs at least 2 points");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

inline double loaded_q(double qi, double qc_mag, double phi) {
    check_positive(qi, "qi");
    check_positive(qc_mag, "qc");
    const double inv = 1.0 / qi + std::cos(phi) / qc_mag;
    if (!(inv > 0.0))
        throw std::domain_error("loaded Q is not positive for these parameters");
    return 1.0 / inv;
}

inline std::complex<double> notch_s21(double f, double f0, double ql,
                                      double qc_mag, double phi) {
    const std::complex<double> num =
        std::polar(ql / qc_mag, phi);
    const std::complex<double> den(1.0, 2.0 * ql * (f - f0) / f0);
    return 1.0 - num / den;
}

// Frequency grid of n points covering +-span_linewidths FWHM around f0.
inline std::vector<double> symmetric_frequency_grid(double f0, double ql,
                                                    std::size_t n = 401,
                                                    double span_linewidths = 5.0) {
    check_positive(f0, "f0");
    check_positive(ql, "ql");
    const double half = span_linewidths * f0 / ql;
    return linspace(f0 - half, f0 + half, n);
}

// Evaluates the notch model on the given grid and adds complex Gaussian
// noise, noise_rms per quadrature. Deterministic per seed.
inline S21Trace simulate_s21(double f0, double qi, double qc, double phi,
                             std::vector<double> frequencies, double noise_rms,
                             std::uint64_t seed,
                             std::optional<double> input_power_dbm = {}) {
    check_positive(f0, "f0");
    check_nonnegative(noise_rms, "noise_rms");
    const double ql = loaded_q(qi, qc, phi);

    S21Trace trace;
    trace.frequencies = std::move(frequencies);
    trace.s21.reserve(trace.frequencies.size());
    SeededRng rng(seed);
    for (double f : trace.frequencies) {
        std::complex<double> s = notch_s21(f, f0, ql, qc, phi);
        if (noise_rms > 0.0)
            s += std::complex<double>(noise_rms * rng.normal(),
                                      noise_rms * rng.normal());
        trace.s21.push_back(s);
    }
    trace.input_power_dbm = input_power_dbm;
    trace.validate();
    return trace;
}

namespace detail {

struct Baseline {
    std::complex<double> c0{1.0, 0.0};
    std::complex<double> c1{0.0, 0.0};
    double f_mid = 0.0;
    double f_span = 1.0;

    std::complex<double> at(double f) const {
        return c0 + c1 * ((f - f_mid) / f_span);
    }
};

// Complex linear baseline fitted to the outer fifth of the span.
inline Baseline fit_baseline(const S21Trace& t) {
    const std::size_t n = t.frequencies.size();
    const std::size_t edge = std::max<std::size_t>(2, n / 10);
    Baseline b;
    b.f_mid = 0.5 * (t.frequencies.front() + t.frequencies.back());
    b.f_span = t.frequencies.back() - t.frequencies.front();

    double su = 0, suu = 0;
    std::complex<double> ss{}, sus{};
    std::size_t m = 0;
    auto accumulate = [&](std::size_t i) {
        const double u = (t.frequencies[i] - b.f_mid) / b.f_span;
        su += u;
        suu += u * u;
        ss += t.s21[i];
        sus += u * t.s21[i];
        ++m;
    };
    for (std::size_t i = 0; i < edge; ++i) accumulate(i);
    for (std::size_t i = n - edge; i < n; ++i) accumulate(i);

    const double det = static_cast<double>(m) * suu - su * su;
    if (std::abs(det) < 1e-30) return b;
    b.c0 = (ss * suu - sus * su) / det;
    b.c1 = (sus * static_cast<double>(m) - ss * su) / det;
    return b;
}

// Noise floor (complex rms) from successive differences over the outer fifth;
// differences cancel the slowly varying resonance tail.
inline double estimate_noise(const std::vector<std::complex<double>>& y) {
    const std::size_t n = y.size();
    const std::size_t edge = std::max<std::size_t>(2, n / 10);
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 1; i < edge; ++i) {
        sum += std::norm(y[i] - y[i - 1]);
        ++pairs;
    }
    for (std::size_t i = n - edge + 1; i < n; ++i) {
        sum += std::norm(y[i] - y[i - 1]);
        ++pairs;
    }
    return pairs > 0 ? std::sqrt(sum / (2.0 * static_cast<double>(pairs))) : 0.0;
}

} // namespace detail

// Extracts f0, Qi, |Qc|, Ql and the asymmetry angle from a notch trace by
// damped least squares on the complex residuals. The trace is first
// normalized by a linear complex baseline so a global amplitude/phase scale
// does not shift the optimum. Seeds come from the dip location, width and
// depth unless an initial guess is supplied.
inline FitResult fit_s21(const S21Trace& trace,
                         const std::optional<FitResult>& initial_guess = {}) {
    trace.validate();
    const std::size_t n = trace.frequencies.size();
    if (n < 16)
        throw std::domain_error("trace must contain at least 16 points");

    const detail::Baseline base = detail::fit_baseline(trace);
    std::vector<std::complex<double>> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> b = base.at(trace.frequencies[i]);
        if (std::abs(b) < 1e-30)
            throw fit_error("degenerate baseline (vanishing transmission)");
        y[i] = trace.s21[i] / b;
    }

    const double noise_floor = detail::estimate_noise(y);

    // Dip detection.
    std::size_t dip = 0;
    double min_mag = std::abs(y[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const double m = std::abs(y[i]);
        if (m < min_mag) {
            min_mag = m;
            dip = i;
        }
    }
    const double depth = 1.0 - min_mag;
    if (depth < std::max(3.0 * noise_floor, 1e-12))
        throw fit_error("no resonance dip above the noise floor");

    double f0_seed = trace.frequencies[dip];
    double ql_seed = 0.0;
    double qc_seed = 0.0;
    double phi_seed = 0.0;
    if (initial_guess) {
        f0_seed = initial_guess->f0;
        ql_seed = initial_guess->ql;
        qc_seed = initial_guess->qc;
        phi_seed = initial_guess->asymmetry_angle;
    } else {
        // Full width where |S21| recovers to half depth.
        const double target = 1.0 - 0.5 * depth;
        double f_left = trace.frequencies.front();
        double f_right = trace.frequencies.back();
        for (std::size_t i = dip; i-- > 0;)
            if (std::abs(y[i]) >= target) {
                f_left = trace.frequencies[i];
                break;
            }
        for (std::size_t i = dip + 1; i < n; ++i)
            if (std::abs(y[i]) >= target) {
                f_right = trace.frequencies[i];
                break;
            }
        const double width = std::max(f_right - f_left,
                                      (trace.frequencies[1] - trace.frequencies[0]));
        ql_seed = f0_seed / width;
        qc_seed = ql_seed / depth;
    }

    const double w_seed = f0_seed / ql_seed; // linewidth, scales the f0 parameter

    // Parameters: (f0 offset in linewidths, ln Ql, ln Qc, phi).
    auto model_params = [&](const std::vector<double>& p, double f) {
        const double f0 = f0_seed + p[0] * w_seed;
        return notch_s21(f, f0, std::exp(p[1]), std::exp(p[2]), p[3]);
    };
    auto residuals = [&](const std::vector<double>& p, std::vector<double>& r) {
        r.resize(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::complex<double> d = y[i] - model_params(p, trace.frequencies[i]);
            r[2 * i] = d.real();
            r[2 * i + 1] = d.imag();
        }
    };

    LevMarOptions options;
    options.max_iterations = 200;
    options.step_tolerance = 1e-10;
    const LevMarResult lm = levmar(
        residuals, {0.0, std::log(ql_seed), std::log(qc_seed), phi_seed}, options);

    FitResult out;
    out.f0 = f0_seed + lm.params[0] * w_seed;
    out.ql = std::exp(lm.params[1]);
    out.qc = std::exp(lm.params[2]);
    out.asymmetry_angle = lm.params[3];
    out.residual_rms = std::sqrt(lm.cost / static_cast<double>(n));

    const double inv_qi = 1.0 / out.ql - std::cos(out.asymmetry_angle) / out.qc;
    if (!(inv_qi > 0.0))
        throw fit_error("fit converged to a non-physical internal Q", out);
    out.qi = 1.0 / inv_qi;

    if (!lm.converged)
        throw fit_error("fit did not converge within the iteration budget", out);
    if (out.residual_rms > 3.0 * std::max(noise_floor, 1e-12))
        throw fit_error("residuals exceed three times the noise floor", out);

    if (!lm.covariance.empty()) {
        const auto& c = lm.covariance; // 4x4 row-major
        out.f0_err = w_seed * std::sqrt(std::max(c[0], 0.0));
        out.ql_err = out.ql * std::sqrt(std::max(c[5], 0.0));
        out.qc_err = out.qc * std::sqrt(std::max(c[10], 0.0));
        out.asymmetry_angle_err = std::sqrt(std::max(c[15], 0.0));
        // Delta method for Qi over (ln Ql, ln Qc, phi).
        const double qi2 = out.qi * out.qi;
        const double g1 = qi2 / out.ql;
        const double g2 = -qi2 * std::cos(out.asymmetry_angle) / out.qc;
        const double g3 = -qi2 * std::sin(out.asymmetry_angle) / out.qc;
        const double grad[4] = {0.0, g1, g2, g3};
        double var = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) var += grad[a] * c[a * 4 + b] * grad[b];
        out.qi_err = std::sqrt(std::max(var, 0.0));
    }

    // Span diagnostic: want at least +-3 linewidths around the dip.
    const double lw = out.f0 / out.ql;
    if (out.f0 - trace.frequencies.front() < 3.0 * lw ||
        trace.frequencies.back() - out.f0 < 3.0 * lw)
        out.warning = "trace spans less than 3 linewidths on at least one side";

    return out;
}

// Steady-state mean photon number in the resonator for a feedline drive of
// the given power: <n> = 2 Ql^2 P / (hbar omega0^2 Qc). The factor-of-two
// convention matches an on-resonance notch drive; absolute attenuation is
// setup dependent.
inline double photon_number(const FitResult& fit, double input_power_dbm) {
    check_positive(fit.f0, "f0");
    check_positive(fit.ql, "ql");
    check_positive(fit.qc, "qc");
    const double p_watt = 1e-3 * std::pow(10.0, input_power_dbm / 10.0);
    const double omega0 = 2.0 * pi * fit.f0;
    return 2.0 * fit.ql * fit.ql * p_watt /
           (reduced_planck * omega0 * omega0 * fit.qc);
}

// Loss model behind fit_tls_power_dependence.
inline double tls_loss(double photon_number, const TlsFitResult& p) {
    return p.f_tan_delta /
               std::pow(1.0 + photon_number / p.critical_photon_number,
                        p.saturation_exponent) +
           p.power_independent_loss;
}

// Weighted least-squares fit of 1/Qi(<n>) to the saturable TLS form. Needs at
// least 5 points spanning 3 decades of photon number.
inline TlsFitResult fit_tls_power_dependence(const PowerSweepResult& sweep) {
    const auto& pts = sweep.points;
    if (pts.size() < 5)
        throw std::domain_error("need at least 5 sweep points");
    double n_min = pts.front().mean_photon_number;
    double n_max = n_min;
    std::size_t with_err = 0;
    for (const auto& p : pts) {
        check_positive(p.mean_photon_number, "mean_photon_number");
        check_positive(p.qi, "qi");
        n_min = std::min(n_min, p.mean_photon_number);
        n_max = std::max(n_max, p.mean_photon_number);
        if (p.qi_err > 0.0) ++with_err;
    }
    if (n_max / n_min < 1e3)
        throw std::domain_error(
            "insufficient dynamic range: need 3 decades in photon number");
    const bool weighted = with_err == pts.size();

    std::vector<PowerSweepPoint> sorted(pts);
    std::sort(sorted.begin(), sorted.end(),
              [](const PowerSweepPoint& a, const PowerSweepPoint& b) {
                  return a.mean_photon_number < b.mean_photon_number;
              });

    std::vector<double> loss(sorted.size()), sigma(sorted.size(), 1.0);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        loss[i] = 1.0 / sorted[i].qi;
        if (weighted)
            sigma[i] = sorted[i].qi_err / (sorted[i].qi * sorted[i].qi);
    }

    // Seeds: the floor from the saturated end, the TLS part from the
    // low-power end, n_c from where the excess loss has fallen to ~70%.
    const double hp0 = std::max(loss.back() * 0.8, 1e-12);
    const double f0 = std::max(loss.front() - hp0, loss.front() * 0.05);
    double nc0 = std::sqrt(n_min * n_max);
    for (std::size_t i = 0; i < sorted.size(); ++i)
        if (loss[i] - hp0 <= 0.7 * f0) {
            nc0 = sorted[i].mean_photon_number;
            break;
        }

    auto residuals = [&](const std::vector<double>& q, std::vector<double>& r) {
        TlsFitResult t{std::exp(q[0]), std::exp(q[1]), std::exp(q[2]),
                       std::exp(q[3])};
        r.resize(sorted.size());
        for (std::size_t i = 0; i < sorted.size(); ++i)
            r[i] = (tls_loss(sorted[i].mean_photon_number, t) - loss[i]) / sigma[i];
    };

    const LevMarResult lm = levmar(
        residuals,
        {std::log(f0), std::log(nc0), std::log(0.5), std::log(hp0)});
    if (!lm.converged)
        throw fit_error("TLS power-dependence fit did not converge");

    return TlsFitResult{std::exp(lm.params[0]), std::exp(lm.params[1]),
                        std::exp(lm.params[2]), std::exp(lm.params[3])};
}

} // namespace cpwq
