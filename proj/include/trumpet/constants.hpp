#pragma once

// Physical constants (CODATA 2018 exact values) and shared numeric helpers.
//
// Unit convention used throughout the library: every internal frequency,
// detuning, linewidth and damping rate is ANGULAR (rad/s). Configuration
// keys quoted by instruments in cycles (suffix `_over_2pi_hz`) are scaled
// by 2*pi on ingestion; keys suffixed `_per_s` enter unchanged.

#include <numbers>

namespace trumpet {

inline constexpr double k_hbar = 1.054571817e-34;          // reduced Planck constant [J s]
inline constexpr double k_boltzmann = 1.380649e-23;        // Boltzmann constant [J/K]
inline constexpr double k_electron_volt = 1.602176634e-19; // electron volt [J]

inline constexpr double k_pi = std::numbers::pi;
inline constexpr double k_two_pi = 2.0 * std::numbers::pi;
inline constexpr double k_sqrt_pi = 1.7724538509055160273; // sqrt(pi)

// Energy [eV] -> angular frequency [rad/s].
inline constexpr double ev_to_rad_per_s(double ev) {
  return ev * k_electron_volt / k_hbar;
}

// Convenience for values quoted per cycle.
inline constexpr double cycles_to_angular(double hz) { return k_two_pi * hz; }
inline constexpr double angular_to_cycles(double rad_per_s) {
  return rad_per_s / k_two_pi;
}

}  // namespace trumpet
