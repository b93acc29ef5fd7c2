#pragma once

// Transmission-line parameters of a coplanar waveguide cross-section and
// global quantities of a quarter-wave resonator built from it.
//
// The CPW model is the zero-thickness conformal-mapping one: infinitely thick
// substrate, no kinetic inductance, eff_permittivity = (eps_sub + 1) / 2.

#include <cmath>
#include <stdexcept>
#include <string>

#include "constants.hpp"
#include "errors.hpp"

namespace cpwq {

// Cross-section of a coplanar waveguide: a center trace of width w separated
// from the ground planes by a gap s on either side.
struct CpwGeometry {
    double center_width = 10e-6; // m
    double gap = 5e-6;           // m
    double substrate_rel_permittivity = 11.45;
    std::string film = "Al"; // informational

    void validate() const {
        check_positive(center_width, "center_width");
        check_positive(gap, "gap");
        if (!(substrate_rel_permittivity >= 1.0))
            throw std::domain_error("substrate_rel_permittivity must be >= 1");
    }
};

struct LineParams {
    double char_impedance;  // ohm
    double eff_permittivity;
    double cap_per_length;  // F/m
    double ind_per_length;  // H/m
    double phase_velocity;  // m/s
};

// Airbridge over the center trace. span_width is the trace width under the
// bridge, bridge_width its extent along the line, height the vacuum gap
// between trace and bridge metal. Spans of at least 70 um are practical for
// scaffold-released bridges; this is documentation, not enforced.
struct BridgeGeometry {
    double span_width = 10e-6;  // m
    double bridge_width = 3e-6; // m
    double height = 1e-6;       // m

    void validate() const {
        check_positive(span_width, "span_width");
        check_positive(bridge_width, "bridge_width");
        check_positive(height, "height");
    }
};

// A quarter-wave CPW resonator, capacitively coupled to a feedline, with a
// population of ground-plane bridges over its center trace.
struct ResonatorDesign {
    CpwGeometry geometry;
    double resonance_freq = 6e9; // Hz
    double coupling_q = 7e5;
    int bridge_count = 0;
    BridgeGeometry bridge;

    void validate() const {
        geometry.validate();
        bridge.validate();
        check_positive(resonance_freq, "resonance_freq");
        check_positive(coupling_q, "coupling_q");
        if (bridge_count < 0)
            throw std::domain_error("bridge_count must be >= 0");
    }
};

// Complete elliptic integral of the first kind K(k), modulus k in [0, 1).
// Arithmetic-geometric mean iteration; converges quadratically, relative
// error well below 1e-12 in double precision.
inline double complete_elliptic_k(double modulus) {
    if (!(modulus >= 0.0 && modulus < 1.0))
        throw std::domain_error("complete_elliptic_k: modulus must lie in [0, 1)");
    double a = 1.0;
    double b = std::sqrt((1.0 - modulus) * (1.0 + modulus));
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-15 * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return pi / (2.0 * a);
}

// Characteristic impedance and per-length parameters from conformal mapping:
//   k  = w / (w + 2 s),  k' = sqrt(1 - k^2)
//   Z0 = (30 pi / sqrt(eps_eff)) K(k') / K(k)
// Scale-invariant in (w, s); only the ratio k enters.
inline LineParams line_params(const CpwGeometry& geometry) {
    geometry.validate();
    const double k =
        geometry.center_width / (geometry.center_width + 2.0 * geometry.gap);
    const double kp = std::sqrt((1.0 - k) * (1.0 + k));

    LineParams p{};
    p.eff_permittivity = 0.5 * (geometry.substrate_rel_permittivity + 1.0);
    p.char_impedance = 30.0 * pi / std::sqrt(p.eff_permittivity) *
                       complete_elliptic_k(kp) / complete_elliptic_k(k);
    p.phase_velocity = speed_of_light / std::sqrt(p.eff_permittivity);
    p.cap_per_length = 1.0 / (p.phase_velocity * p.char_impedance);
    p.ind_per_length = p.char_impedance / p.phase_velocity;
    return p;
}

// Lumped equivalent capacitance of a quarter-wave line resonating at f0:
// C = 1 / (8 f0 Z0).
inline double quarter_wave_capacitance(double f0, double z0) {
    check_positive(f0, "f0");
    check_positive(z0, "z0");
    return 1.0 / (8.0 * f0 * z0);
}

// Physical length of a quarter-wave line at f0 for the given effective
// permittivity.
inline double quarter_wave_length(double f0, double eff_permittivity) {
    check_positive(f0, "f0");
    if (!(eff_permittivity >= 1.0))
        throw std::domain_error("eff_permittivity must be >= 1");
    return speed_of_light / std::sqrt(eff_permittivity) / (4.0 * f0);
}

} // namespace cpwq
