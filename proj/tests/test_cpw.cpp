#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "cpwq/cpw.hpp"
#include "cpwq/rng.hpp"

using namespace cpwq;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Independent oracle: composite Simpson of the defining integral
// K(k) = int_0^{pi/2} dtheta / sqrt(1 - k^2 sin^2 theta).
double elliptic_k_quadrature(double k) {
    const int n = 1 << 15;
    const double h = (pi / 2.0) / n;
    auto f = [&](double t) {
        const double s = std::sin(t);
        return 1.0 / std::sqrt(1.0 - k * k * s * s);
    };
    double sum = f(0.0) + f(pi / 2.0);
    for (int i = 1; i < n; ++i) sum += f(i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

} // namespace

TEST_CASE("complete_elliptic_k at zero modulus", "[cpw]") {
    REQUIRE(std::abs(complete_elliptic_k(0.0) - pi / 2.0) < 1e-12);
}

TEST_CASE("complete_elliptic_k matches the quadrature oracle", "[cpw]") {
    for (double k : {0.1, 0.3, 0.5, 0.7, 0.866025, 0.95, 0.99}) {
        const double oracle = elliptic_k_quadrature(k);
        INFO("k = " << k << " oracle = " << oracle);
        REQUIRE(rel_err(complete_elliptic_k(k), oracle) < 1e-9);
    }
    // Values frozen from the oracle.
    REQUIRE(rel_err(complete_elliptic_k(0.5), 1.6857503548125960) < 1e-12);
    REQUIRE(rel_err(complete_elliptic_k(0.866025), 2.1565143943574442) < 1e-12);
    REQUIRE(std::abs(complete_elliptic_k(0.5) - 1.6858) < 1e-4);
    REQUIRE(std::abs(complete_elliptic_k(0.866025) - 2.1565) < 1e-4);
}

TEST_CASE("complete_elliptic_k is strictly increasing", "[cpw]") {
    double prev = complete_elliptic_k(0.0);
    for (int i = 1; i <= 999; ++i) {
        const double cur = complete_elliptic_k(i / 1000.0);
        REQUIRE(cur > prev);
        prev = cur;
    }
}

TEST_CASE("complete_elliptic_k rejects out-of-range moduli", "[cpw]") {
    REQUIRE_THROWS_AS(complete_elliptic_k(-0.1), std::domain_error);
    REQUIRE_THROWS_AS(complete_elliptic_k(1.0), std::domain_error);
    REQUIRE_THROWS_AS(complete_elliptic_k(1.5), std::domain_error);
}

TEST_CASE("line_params for the 10/5 silicon geometry", "[cpw]") {
    CpwGeometry g; // defaults: 10 um / 5 um, eps 11.45
    const LineParams p = line_params(g);
    REQUIRE(rel_err(p.eff_permittivity, 6.225) < 1e-15);
    // Frozen from the closed form with oracle K values.
    REQUIRE(rel_err(p.char_impedance, 48.323769428301977) < 1e-10);
    REQUIRE(std::abs(p.char_impedance - 48.3) < 0.1);
    // Sanity band for these devices.
    REQUIRE(p.char_impedance > 40.0);
    REQUIRE(p.char_impedance < 60.0);
}

TEST_CASE("line_params vacuum substrate", "[cpw]") {
    CpwGeometry g;
    g.substrate_rel_permittivity = 1.0;
    REQUIRE(line_params(g).eff_permittivity == 1.0);
}

TEST_CASE("line_params is invariant under uniform scaling", "[cpw]") {
    SeededRng rng(42);
    for (int i = 0; i < 50; ++i) {
        CpwGeometry g;
        g.center_width = rng.uniform(1e-6, 50e-6);
        g.gap = rng.uniform(1e-6, 50e-6);
        g.substrate_rel_permittivity = rng.uniform(1.0, 15.0);
        const double scale = rng.uniform(0.1, 10.0);
        CpwGeometry scaled = g;
        scaled.center_width *= scale;
        scaled.gap *= scale;
        const LineParams a = line_params(g);
        const LineParams b = line_params(scaled);
        REQUIRE(rel_err(a.char_impedance, b.char_impedance) < 1e-12);
        REQUIRE(a.eff_permittivity == b.eff_permittivity);
    }
}

TEST_CASE("line_params internal consistency", "[cpw]") {
    CpwGeometry g;
    const LineParams p = line_params(g);
    REQUIRE(rel_err(p.char_impedance,
                    std::sqrt(p.ind_per_length / p.cap_per_length)) < 1e-12);
    REQUIRE(rel_err(p.phase_velocity,
                    1.0 / std::sqrt(p.ind_per_length * p.cap_per_length)) < 1e-12);
    REQUIRE(rel_err(p.cap_per_length, 1.7222181882762815e-10) < 1e-10);
    REQUIRE(rel_err(p.ind_per_length, 4.0217009935692615e-7) < 1e-10);
}

TEST_CASE("quarter_wave_capacitance", "[cpw]") {
    REQUIRE(rel_err(quarter_wave_capacitance(6e9, 50.0), 4.1666666666666667e-13) <
            1e-14);

    // Identity 8 f0 Z0 C = 1 held to machine precision.
    SeededRng rng(7);
    for (int i = 0; i < 50; ++i) {
        const double f0 = rng.uniform(1e9, 12e9);
        const double z0 = rng.uniform(20.0, 120.0);
        REQUIRE(std::abs(quarter_wave_capacitance(f0, z0) * 8.0 * f0 * z0 - 1.0) <
                1e-14);
    }

    // 1/f0 scaling.
    REQUIRE(rel_err(quarter_wave_capacitance(12e9, 50.0),
                    0.5 * quarter_wave_capacitance(6e9, 50.0)) < 1e-15);

    REQUIRE_THROWS_AS(quarter_wave_capacitance(0.0, 50.0), std::domain_error);
    REQUIRE_THROWS_AS(quarter_wave_capacitance(6e9, -1.0), std::domain_error);
}

TEST_CASE("quarter_wave_capacitance near the 470 fF benchmark", "[cpw]") {
    const LineParams p = line_params(CpwGeometry{});
    const double c = quarter_wave_capacitance(6e9, p.char_impedance);
    REQUIRE(rel_err(c, 4.3111979011165033e-13) < 1e-10);
    REQUIRE(std::abs(c - 470e-15) / 470e-15 < 0.15);
}

TEST_CASE("quarter_wave_length", "[cpw]") {
    REQUIRE(rel_err(quarter_wave_length(6e9, 6.225), 5.0065641281276410e-3) <
            1e-12);
    REQUIRE(std::abs(quarter_wave_length(6e9, 6.22) - 5.01e-3) < 0.01e-3);
    REQUIRE(rel_err(quarter_wave_length(6e9, 1.0), speed_of_light / (4.0 * 6e9)) <
            1e-15);
    REQUIRE(rel_err(quarter_wave_length(12e9, 6.225),
                    0.5 * quarter_wave_length(6e9, 6.225)) < 1e-15);
    REQUIRE_THROWS_AS(quarter_wave_length(-1.0, 6.225), std::domain_error);
    REQUIRE_THROWS_AS(quarter_wave_length(6e9, 0.5), std::domain_error);
}

TEST_CASE("geometry validation", "[cpw]") {
    CpwGeometry g;
    g.center_width = 0.0;
    REQUIRE_THROWS_AS(line_params(g), std::domain_error);
    g = CpwGeometry{};
    g.substrate_rel_permittivity = 0.8;
    REQUIRE_THROWS_AS(line_params(g), std::domain_error);

    ResonatorDesign d;
    d.bridge_count = -1;
    REQUIRE_THROWS_AS(d.validate(), std::domain_error);
}
