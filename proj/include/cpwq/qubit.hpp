#pragma once

// Energy-relaxation model for a gmon qubit: a transmon whose SQUID connects
// to ground through a short geometric inductor tail. Capacitive loss in the
// tail is suppressed by the inductive voltage divider L_g / (L_J + L_g),
// which makes the tail-limited T1 scale as 1/omega^4. A constant effective
// Qi gives the competing 1/omega spectrum.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"

namespace cpwq {

struct GmonCircuit {
    double squid_inductance_zero_flux = 6.3e-9; // H
    double geometric_inductance = 1.0e-9;       // H
    double qubit_capacitance = 100e-15;         // F (typical transmon value)
    double tail_loss_resistance = 4.0e6;        // ohm, effective tail loss

    void validate() const {
        check_positive(squid_inductance_zero_flux, "squid_inductance_zero_flux");
        check_positive(geometric_inductance, "geometric_inductance");
        check_positive(qubit_capacitance, "qubit_capacitance");
        check_positive(tail_loss_resistance, "tail_loss_resistance");
        if (!(geometric_inductance < squid_inductance_zero_flux))
            throw std::domain_error(
                "voltage-divider regime requires L_g < L_J0");
    }
};

struct T1Point {
    double frequency = 0.0; // Hz
    double t1 = 0.0;        // s
};

struct T1Spectrum {
    std::vector<T1Point> points;
};

// Symmetric DC-SQUID inductance vs applied flux: L_J0 / |cos(pi Phi/Phi0)|.
// Diverges at half a flux quantum.
inline double squid_inductance(double l_j0, double flux_fraction) {
    check_positive(l_j0, "l_j0");
    const double c = std::abs(std::cos(pi * flux_fraction));
    if (c < 1e-12)
        throw std::domain_error(
            "squid_inductance diverges at half a flux quantum");
    return l_j0 / c;
}

// Qubit frequency omega_q / 2 pi with omega_q = 1 / sqrt(L_J C_q).
inline double qubit_frequency(const GmonCircuit& circuit, double l_j) {
    circuit.validate();
    check_positive(l_j, "l_j");
    return 1.0 / (2.0 * pi * std::sqrt(l_j * circuit.qubit_capacitance));
}

// Fraction of the qubit voltage dropped across the inductor tail. Exact form
// L_g / (L_J + L_g); the approximate form L_g / L_J is the small-tail limit.
inline double divider_voltage_ratio(const GmonCircuit& circuit, double l_j,
                                    bool exact) {
    circuit.validate();
    check_positive(l_j, "l_j");
    const double lg = circuit.geometric_inductance;
    return exact ? lg / (l_j + lg) : lg / l_j;
}

// Effective quality factor of the tail loss channel at qubit frequency
// omega_q (rad/s). Approximate divider gives the closed form
//   Q = R_g / (C_q L_g^2) omega_q^-3;
// the exact divider multiplies it by ((L_J + L_g) / L_J)^2 with
// L_J = 1 / (omega_q^2 C_q).
inline double tail_loss_q(const GmonCircuit& circuit, double omega_q,
                          bool exact_divider = false) {
    circuit.validate();
    check_positive(omega_q, "omega_q");
    const double lg = circuit.geometric_inductance;
    const double q_approx = circuit.tail_loss_resistance /
                            (circuit.qubit_capacitance * lg * lg) /
                            (omega_q * omega_q * omega_q);
    if (!exact_divider) return q_approx;
    const double l_j = 1.0 / (omega_q * omega_q * circuit.qubit_capacitance);
    const double factor = (l_j + lg) / l_j;
    return q_approx * factor * factor;
}

// Energy-relaxation limit T1 = Q / omega_q from the tail channel; exact
// omega^-4 scaling in the approximate-divider model.
inline double tail_limited_t1(const GmonCircuit& circuit, double omega_q,
                              bool exact_divider = false) {
    return tail_loss_q(circuit, omega_q, exact_divider) / omega_q;
}

// T1 for a frequency-independent effective quality factor.
inline double constant_q_t1(double q_eff, double frequency) {
    check_positive(q_eff, "q_eff");
    check_positive(frequency, "frequency");
    return q_eff / (2.0 * pi * frequency);
}

// Smallest tail resistance consistent with a measured T1 at a given qubit
// frequency; the channel cannot limit T1 below the measurement.
inline double tail_resistance_lower_bound(const GmonCircuit& circuit,
                                          double measured_t1, double omega_q) {
    circuit.validate();
    check_positive(measured_t1, "measured_t1");
    check_positive(omega_q, "omega_q");
    const double lg = circuit.geometric_inductance;
    return measured_t1 * circuit.qubit_capacitance * lg * lg * omega_q *
           omega_q * omega_q * omega_q;
}

} // namespace cpwq
