#include "trumpet/oscillator.hpp"

#include <cmath>

#include "trumpet/constants.hpp"
#include "trumpet/errors.hpp"
#include "trumpet/rng.hpp"

namespace trumpet {

OscillatorStepper make_oscillator_stepper(const MechMode& mode,
                                          double temperature_k, double dt_s) {
  mode.validate();
  require_valid(temperature_k >= 0.0, "temperature_k must be non-negative");
  require_valid(dt_s > 0.0, "dt_s must be > 0");
  const double f_hz = angular_to_cycles(mode.omega_m_per_s);
  require_valid(dt_s <= 0.05 / f_hz,
                "dt_s too coarse: need dt <= 0.05 / f_mode");

  const double w = mode.omega_m_per_s;
  const double g = mode.gamma_m_per_s;
  const double wd = std::sqrt(w * w - 0.25 * g * g);  // underdamped by validate
  const double decay = std::exp(-0.5 * g * dt_s);
  const double c = std::cos(wd * dt_s);
  const double s = std::sin(wd * dt_s);

  OscillatorStepper st;
  st.m_uu = decay * (c + 0.5 * g * s / wd);
  st.m_uv = decay * s / wd;
  st.m_vu = -decay * w * w * s / wd;
  st.m_vv = decay * (c - 0.5 * g * s / wd);

  const double kt = k_boltzmann * temperature_k;
  st.sigma_u = std::sqrt(kt / (mode.mass_kg * w * w));
  st.sigma_v = std::sqrt(kt / mode.mass_kg);

  // Step covariance Q = S - M S M^T with S the stationary covariance
  // diag(sigma_u^2, sigma_v^2); its Cholesky factor feeds the noise.
  const double a = st.sigma_u * st.sigma_u;
  const double b = st.sigma_v * st.sigma_v;
  const double q_uu = a - (a * st.m_uu * st.m_uu + b * st.m_uv * st.m_uv);
  const double q_uv = -(a * st.m_uu * st.m_vu + b * st.m_uv * st.m_vv);
  const double q_vv = b - (a * st.m_vu * st.m_vu + b * st.m_vv * st.m_vv);
  if (q_uu > 0.0) {
    st.l_uu = std::sqrt(q_uu);
    st.l_vu = q_uv / st.l_uu;
    const double rest = q_vv - st.l_vu * st.l_vu;
    st.l_vv = rest > 0.0 ? std::sqrt(rest) : 0.0;
  }
  return st;
}

std::vector<double> simulate_displacement(const MechMode& mode,
                                          double temperature_k,
                                          double duration_s, double dt_s,
                                          std::uint64_t seed) {
  const OscillatorStepper st =
      make_oscillator_stepper(mode, temperature_k, dt_s);
  require_valid(duration_s >= 100.0 * k_two_pi / mode.omega_m_per_s,
                "duration_s must cover at least 100 mode periods");

  const std::size_t n =
      static_cast<std::size_t>(std::floor(duration_s / dt_s)) + 1;
  std::vector<double> u(n);

  PhiloxStream stream(seed, k_stream_mechanics);
  double z0 = 0.0, z1 = 0.0;
  stream.gauss_pair(0, z0, z1);  // pair 0: stationary initial state
  double pos = st.sigma_u * z0;
  double vel = st.sigma_v * z1;
  u[0] = pos;
  for (std::size_t k = 1; k < n; ++k) {
    stream.gauss_pair(k, z0, z1);
    st.step(pos, vel, z0, z1);
    u[k] = pos;
  }
  return u;
}

}  // namespace trumpet
