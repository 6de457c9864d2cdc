#pragma once

// Exact one-step Gaussian transition of the thermally driven damped
// oscillator. Each step applies the analytic mean propagator over dt and
// adds noise with the analytic step covariance, so the simulated spectrum
// has an unbiased linewidth at any dt satisfying the sampling rule --
// unlike an Euler discretization, which broadens it.
//
// Trajectories are classical: zero-point motion is never injected here.
// Quantum floors are handled analytically in the noise-budget module.

#include <cstdint>
#include <vector>

#include "trumpet/mechanics.hpp"

namespace trumpet {

struct OscillatorStepper {
  // Mean propagator of (u, v) over one dt.
  double m_uu = 1.0, m_uv = 0.0;
  double m_vu = 0.0, m_vv = 1.0;
  // Lower-triangular factor of the step noise covariance.
  double l_uu = 0.0, l_vu = 0.0, l_vv = 0.0;
  // Stationary standard deviations (used to draw the initial state).
  double sigma_u = 0.0, sigma_v = 0.0;

  // Advance (u, v) by one dt given two standard normal draws.
  void step(double& u, double& v, double z0, double z1) const {
    const double nu = m_uu * u + m_uv * v + l_uu * z0;
    const double nv = m_vu * u + m_vv * v + l_vu * z0 + l_vv * z1;
    u = nu;
    v = nv;
  }
};

// Build the stepper for one mode at temperature T and step dt. Throws a
// validation error when dt exceeds 0.05 / (omega_m / 2pi), the sampling rule
// shared with the simulator configuration.
OscillatorStepper make_oscillator_stepper(const MechMode& mode,
                                          double temperature_k, double dt_s);

// Stationary Brownian trajectory of one mode: floor(duration/dt) + 1 samples
// of u(t) at t = k dt, seeded deterministically. At T = 0 the trajectory is
// identically zero.
std::vector<double> simulate_displacement(const MechMode& mode,
                                          double temperature_k,
                                          double duration_s, double dt_s,
                                          std::uint64_t seed);

}  // namespace trumpet
