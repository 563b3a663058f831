#pragma once

#include <numbers>

// Physical constants (SI, CODATA 2018) and rubidium-87 reference data.
namespace bp::consts {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double c = 299792458.0;            // m/s
inline constexpr double h = 6.62607015e-34;         // J s
inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double k_b = 1.380649e-23;         // J/K
inline constexpr double eps0 = 8.8541878128e-12;    // F/m
inline constexpr double amu = 1.66053906660e-27;    // kg
inline constexpr double torr = 133.322368;          // Pa
inline constexpr double zero_celsius = 273.15;      // K

namespace rb {
inline constexpr double mass_87 = 86.909180527 * amu;  // kg
inline constexpr double melting_point = 312.46;        // K, solid/liquid vapor-pressure crossover

// Effective far-field dipole moments for the transitions the experiment
// drives: J->J' reduced matrix elements (2.5377e-29 C m on D1, 3.584e-29 on
// D2) scaled by the hyperfine transition strength (1/2 for F=2 -> F'=1 on D1,
// 5/12 for F=1 -> F'=2 on D2) and isotropically averaged (1/3).
inline constexpr double dipole_d1 = 1.0358e-29;  // C m, 795 nm line
inline constexpr double dipole_d2 = 1.3362e-29;  // C m, 780 nm line

inline constexpr double natural_linewidth = two_pi * 6.0e6;  // rad/s, D1/D2 effective
}  // namespace rb

}  // namespace bp::consts
