#pragma once

// Measured reference values for scaffold-released aluminum airbridges over
// 10/5 um CPW resonators on silicon, used as defaults and comparison anchors
// throughout the toolkit. "Low power" means a mean photon population near
// 10^0, "high power" near 10^6.

namespace cpwq::reference {

// Added loss per ground-plane bridge extracted from loss-vs-count fits.
inline constexpr double loss_per_bridge_low_power = 3.9e-8;
inline constexpr double loss_per_bridge_high_power = 1.2e-8;

// The same low-power slope expressed per femtofarad of added capacitance,
// as reported alongside the per-bridge figure.
inline constexpr double loss_per_femtofarad_low_power = 1.2e-7;

// Comparison value for photoresist-scaffolded bridges, per femtofarad.
inline constexpr double photoresist_loss_per_femtofarad = 5.08e-8;

// Loss tangent assumed for amorphous oxides (SiO2, AlOx) at low power.
inline constexpr double amorphous_oxide_loss_tangent = 1e-3;

// Typical internal quality factors: bare witness resonator at low / high
// power, and the capacitance participation of twelve scaffolded bridges.
inline constexpr double bare_qi_low_power = 1.5e6;
inline constexpr double bare_qi_high_power = 2.5e6;
inline constexpr double scaffolded_participation = 0.10;

} // namespace cpwq::reference
