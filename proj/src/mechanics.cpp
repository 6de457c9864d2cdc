#include "trumpet/mechanics.hpp"

#include <cmath>

#include "trumpet/constants.hpp"
#include "trumpet/errors.hpp"

namespace trumpet {

void QDPosition::validate() const {
  require_valid(r_m >= 0.0, "position: r_m must be >= 0");
  require_valid(phi_rad >= 0.0 && phi_rad < 0.5 * k_pi,
                "position: phi_rad must lie in [0, pi/2)");
}

void DeformationPotentials::validate() const {
  require_valid(std::isfinite(a_ev) && std::isfinite(b_ev),
                "deformation potentials must be finite");
  require_valid(nu > 0.0 && nu < 0.5, "poisson ratio must lie in (0, 0.5)");
}

void MechMode::validate() const {
  require_valid(!label.empty(), "mode: label must not be empty");
  require_valid(order >= 1, "mode: order must be >= 1");
  require_valid(omega_m_per_s > 0.0, "mode: omega_m_per_s must be > 0");
  require_valid(gamma_m_per_s > 0.0, "mode: gamma_m_per_s must be > 0");
  require_valid(gamma_m_per_s / omega_m_per_s < 0.1,
                "mode: gamma_m/omega_m must be < 0.1 (underdamped)");
  require_valid(mass_kg > 0.0, "mode: mass_kg must be > 0");
  require_valid(anchor_r_m >= 0.0, "mode: anchor_r_m must be >= 0");
  require_valid(lambda_per_s >= 0.0, "mode: lambda_per_s must be >= 0");
  // The shape rules divide by the anchor projection; reject anchors close
  // enough to the neutral axis that the division is ill-conditioned.
  if (family == ModeFamily::flexural_x)
    require_valid(anchor_r_m * std::cos(anchor_phi_rad) > 1e-6 * anchor_r_m,
                  "mode: flexural-x anchor lies on the neutral axis");
  if (family == ModeFamily::flexural_y)
    require_valid(anchor_r_m * std::sin(anchor_phi_rad) > 1e-6 * anchor_r_m,
                  "mode: flexural-y anchor lies on the neutral axis");
}

double zero_point_m(const MechMode& mode) {
  return std::sqrt(k_hbar / (2.0 * mode.mass_kg * mode.omega_m_per_s));
}

double thermal_rms_m(const MechMode& mode, double temperature_k) {
  require_valid(temperature_k >= 0.0, "temperature must be >= 0");
  return std::sqrt(k_boltzmann * temperature_k /
                   (mode.mass_kg * mode.omega_m_per_s * mode.omega_m_per_s));
}

double thermal_occupancy(const MechMode& mode, double temperature_k) {
  require_valid(temperature_k >= 0.0, "temperature must be >= 0");
  if (temperature_k == 0.0) return 0.0;
  const double x =
      k_hbar * mode.omega_m_per_s / (k_boltzmann * temperature_k);
  return 1.0 / std::expm1(x);
}

std::complex<double> susceptibility(const MechMode& mode, double omega_per_s) {
  const double wm2 = mode.omega_m_per_s * mode.omega_m_per_s;
  const std::complex<double> denom(wm2 - omega_per_s * omega_per_s,
                                   -mode.gamma_m_per_s * omega_per_s);
  return 1.0 / (mode.mass_kg * denom);
}

StrainTensor strain_at(const MechMode& mode, const QDPosition& pos,
                       double cross_section_radius_m) {
  pos.validate();
  require_valid(pos.r_m <= cross_section_radius_m,
                "position: outside the wire cross-section");
  switch (mode.family) {
    case ModeFamily::flexural_x:
      return mode.anchor_strain.scaled(
          pos.r_m * std::cos(pos.phi_rad) /
          (mode.anchor_r_m * std::cos(mode.anchor_phi_rad)));
    case ModeFamily::flexural_y:
      return mode.anchor_strain.scaled(
          pos.r_m * std::sin(pos.phi_rad) /
          (mode.anchor_r_m * std::sin(mode.anchor_phi_rad)));
    case ModeFamily::breathing:
      return mode.anchor_strain;
  }
  throw ValidationError("mode: unknown family");
}

double frequency_shift_from_strain(const StrainTensor& s,
                                   const DeformationPotentials& dp) {
  const double hydrostatic = s.e_xx + s.e_yy + s.e_zz;
  const double shear = 2.0 * s.e_zz - s.e_xx - s.e_yy;
  return ev_to_rad_per_s(dp.a_ev * hydrostatic + 0.5 * dp.b_ev * shear);
}

double coupling_from_strain(const MechMode& mode, const QDPosition& pos,
                            const DeformationPotentials& dp,
                            double temperature_k,
                            double cross_section_radius_m) {
  require_valid(temperature_k > 0.0,
                "coupling_from_strain: thermal normalization requires T > 0");
  const double shift =
      frequency_shift_from_strain(strain_at(mode, pos, cross_section_radius_m), dp);
  return std::abs(shift) * zero_point_m(mode) /
         thermal_rms_m(mode, temperature_k);
}

bool approximately_uniaxial(const StrainTensor& s, double nu, double rel_tol) {
  const double scale = std::abs(s.e_zz);
  if (scale == 0.0) return false;
  return std::abs(s.e_xx + nu * s.e_zz) <= rel_tol * scale &&
         std::abs(s.e_yy + nu * s.e_zz) <= rel_tol * scale;
}

}  // namespace trumpet
