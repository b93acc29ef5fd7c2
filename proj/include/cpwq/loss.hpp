#pragma once

// Participation-ratio loss budget for airbridges: parallel-plate bridge
// capacitance, per-bridge loss from a thin lossy layer, inversion of that
// model for residue thickness, voltage-profile position weighting, and the
// full-coverage ("tunnel") extrapolation.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "constants.hpp"
#include "cpw.hpp"
#include "errors.hpp"

namespace cpwq {

// A lossy dielectric layer: thickness, relative permittivity, loss tangent.
struct DielectricSpec {
    double thickness = 0.0;      // m
    double rel_permittivity = 1.0;
    double loss_tangent = 0.0;

    void validate() const {
        check_nonnegative(thickness, "thickness");
        if (!(rel_permittivity >= 1.0))
            throw std::domain_error("rel_permittivity must be >= 1");
        check_nonnegative(loss_tangent, "loss_tangent");
    }
};

// participation -> loss -> Q limit bookkeeping for one contribution.
struct LossBudget {
    double participation = 0.0; // fraction of electric-field energy in the layer
    double loss = 0.0;          // contribution to 1/Qi
    double q_limit = std::numeric_limits<double>::infinity();
};

inline LossBudget budget_from_participation(double participation,
                                            double loss_tangent) {
    if (!(participation >= 0.0 && participation <= 1.0))
        throw std::domain_error("participation must lie in [0, 1]");
    check_nonnegative(loss_tangent, "loss_tangent");
    LossBudget b;
    b.participation = participation;
    b.loss = loss_tangent * participation;
    b.q_limit = b.loss > 0.0 ? 1.0 / b.loss
                             : std::numeric_limits<double>::infinity();
    return b;
}

// Vacuum parallel-plate capacitance of one bridge over the center trace:
// C = eps0 w l / h.
inline double bridge_capacitance(const BridgeGeometry& bridge) {
    bridge.validate();
    return vacuum_permittivity * bridge.span_width * bridge.bridge_width /
           bridge.height;
}

// Electric-field participation of a thin lossy layer of the given spec inside
// one bridge capacitor, relative to the whole resonator. The layer sits on
// the top of the center trace and the bottom of the bridge (two surfaces, the
// factor of two); both_surfaces = false keeps a single surface.
inline double bridge_layer_participation(const DielectricSpec& layer,
                                         const BridgeGeometry& bridge,
                                         double resonator_cap,
                                         bool both_surfaces = true) {
    layer.validate();
    check_positive(resonator_cap, "resonator_cap");
    const double surfaces = both_surfaces ? 2.0 : 1.0;
    return surfaces * layer.thickness / bridge.height / layer.rel_permittivity *
           (bridge_capacitance(bridge) / resonator_cap);
}

// Added loss (1/Qi) of one bridge carrying the given lossy layer:
// tan(delta) * (2 t / h) * (1 / eps_r) * (C_bridge / C_resonator).
// This is the distributed-average value for a bridge population spread along
// the resonator; a bridge across a lumped capacitor sees twice this (see
// distributed_bridge_loss).
inline double per_bridge_loss(const DielectricSpec& layer,
                              const BridgeGeometry& bridge,
                              double resonator_cap,
                              bool both_surfaces = true) {
    return layer.loss_tangent *
           bridge_layer_participation(layer, bridge, resonator_cap,
                                      both_surfaces);
}

// Inverts per_bridge_loss for the layer thickness that would explain a
// measured per-bridge loss. Exact algebraic inversion; round-trips with
// per_bridge_loss.
inline double residue_thickness_for_loss(double target_loss,
                                         double rel_permittivity,
                                         double loss_tangent,
                                         const BridgeGeometry& bridge,
                                         double resonator_cap,
                                         bool both_surfaces = true) {
    check_positive(target_loss, "target_loss");
    if (!(rel_permittivity >= 1.0))
        throw std::domain_error("rel_permittivity must be >= 1");
    if (!(loss_tangent > 0.0))
        throw std::domain_error(
            "loss_tangent must be positive to attribute loss to a layer");
    check_positive(resonator_cap, "resonator_cap");
    const double surfaces = both_surfaces ? 2.0 : 1.0;
    return target_loss * rel_permittivity * bridge.height * resonator_cap /
           (surfaces * loss_tangent * bridge_capacitance(bridge));
}

// Squared voltage profile of a quarter-wave resonator at fractional position
// x/L from the open end: cos^2(pi x / 2L). An element at fixed position sees
// this weight relative to the full (antinode) resonator voltage.
inline double position_weight(double position_fraction) {
    if (!(position_fraction >= 0.0 && position_fraction <= 1.0))
        throw std::domain_error("position_fraction must lie in [0, 1]");
    const double c = std::cos(0.5 * pi * position_fraction);
    return c * c;
}

// Midpoint-uniform bridge positions along the resonator, open end toward
// shorted end.
inline std::vector<double> uniform_bridge_positions(int count) {
    if (count < 1)
        throw std::domain_error("bridge count must be >= 1");
    std::vector<double> x(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        x[static_cast<std::size_t>(i)] = (i + 0.5) / count;
    return x;
}

// Total loss of a bridge population at the given fractional positions.
// per_bridge is the distributed-average value, so each bridge contributes
// 2 * per_bridge * cos^2(pi x / 2L); uniformly spread positions sum back to
// count * per_bridge.
inline double distributed_bridge_loss(double per_bridge,
                                      const std::vector<double>& positions) {
    check_nonnegative(per_bridge, "per_bridge");
    if (positions.empty())
        throw std::domain_error("positions must be nonempty");
    double total = 0.0;
    for (double x : positions)
        total += 2.0 * per_bridge * position_weight(x);
    return total;
}

// Q limit of a resonator whose mode has the given capacitive participation in
// a dielectric of the given loss tangent: 1 / (p tan delta). Covers the
// scaffolded (SiO2 left in place) state, where twelve bridges participate at
// the ten-percent level.
inline double scaffold_q_limit(double participation, double loss_tangent) {
    if (!(participation > 0.0 && participation <= 1.0))
        throw std::domain_error("participation must lie in (0, 1]");
    check_positive(loss_tangent, "loss_tangent");
    return 1.0 / (participation * loss_tangent);
}

struct TunnelExtrapolation {
    int full_coverage_count = 0; // bridges at the given pitch over the full length
    double q_low = 0.0;          // low-power Qi of a fully covered resonator
    double q_high = 0.0;         // high-power Qi
};

// Extrapolates measured per-bridge losses to a resonator entirely encased by
// a continuous cover: N = floor(length / pitch) bridges in series with the
// bare resonator loss.
inline TunnelExtrapolation tunnel_extrapolation(const ResonatorDesign& design,
                                                double per_bridge_loss_low,
                                                double per_bridge_loss_high,
                                                double pitch,
                                                double bare_loss_low,
                                                double bare_loss_high) {
    design.validate();
    check_positive(pitch, "pitch");
    check_nonnegative(per_bridge_loss_low, "per_bridge_loss_low");
    check_nonnegative(per_bridge_loss_high, "per_bridge_loss_high");
    check_nonnegative(bare_loss_low, "bare_loss_low");
    check_nonnegative(bare_loss_high, "bare_loss_high");

    const double length = quarter_wave_length(
        design.resonance_freq, line_params(design.geometry).eff_permittivity);
    if (pitch > length)
        throw std::domain_error("pitch exceeds the resonator length");

    TunnelExtrapolation t;
    t.full_coverage_count = static_cast<int>(length / pitch);
    const auto q = [&](double bare, double per_bridge) {
        const double loss = bare + t.full_coverage_count * per_bridge;
        return loss > 0.0 ? 1.0 / loss : std::numeric_limits<double>::infinity();
    };
    t.q_low = q(bare_loss_low, per_bridge_loss_low);
    t.q_high = q(bare_loss_high, per_bridge_loss_high);
    return t;
}

} // namespace cpwq
