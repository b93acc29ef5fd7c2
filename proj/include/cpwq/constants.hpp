#pragma once

// Physical constants (SI, CODATA 2018).

namespace cpwq {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double speed_of_light = 299792458.0;           // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m
inline constexpr double reduced_planck = 1.054571817e-34;       // J s

} // namespace cpwq
