#pragma once

// Mechanical modes of the wire and their derived quantities: zero-point and
// thermal amplitudes, Lorentzian susceptibility, analytic strain-shape maps
// anchored to simulated tensors, and the strain-to-coupling conversion via
// deformation potentials.
//
// Anchor tensors are quoted at the mode's thermal displacement at the
// catalog's normalization temperature; coupling_from_strain must be called
// with that same temperature for the normalization to cancel correctly.

#include <complex>
#include <string>

namespace trumpet {

enum class ModeFamily { flexural_x, flexural_y, breathing };

// Dimensionless strain components at the emitter's height in the wire.
struct StrainTensor {
  double e_zz = 0.0;
  double e_xx = 0.0;
  double e_yy = 0.0;

  StrainTensor scaled(double s) const { return {e_zz * s, e_xx * s, e_yy * s}; }
  StrainTensor operator+(const StrainTensor& o) const {
    return {e_zz + o.e_zz, e_xx + o.e_xx, e_yy + o.e_yy};
  }
};

// Emitter position in the wire cross-section, canonical quadrant. The
// measurement cannot resolve sign, so phi lives in [0, pi/2).
struct QDPosition {
  double r_m = 0.0;
  double phi_rad = 0.0;

  void validate() const;
};

struct DeformationPotentials {
  double a_ev = -8.33;  // hydrostatic potential
  double b_ev = -2.0;   // shear potential
  double nu = 0.31;     // Poisson ratio

  void validate() const;
};

struct MechMode {
  std::string label;            // e.g. "F1x", "B2"
  ModeFamily family = ModeFamily::flexural_x;
  int order = 1;                // harmonic index within the family
  double omega_m_per_s = 0.0;   // angular mode frequency
  double gamma_m_per_s = 0.0;   // angular energy damping rate
  double mass_kg = 0.0;         // motional mass
  double anchor_r_m = 0.0;      // anchor position of the strain tensor
  double anchor_phi_rad = 0.0;
  StrainTensor anchor_strain;   // strain per thermal displacement at anchor
  double lambda_per_s = 0.0;    // measured coupling, angular; 0 if unknown

  void validate() const;
};

// u_zpf = sqrt(hbar / (2 m omega_m)).
double zero_point_m(const MechMode& mode);

// Equipartition amplitude u_th = sqrt(kB T / (m omega_m^2)).
double thermal_rms_m(const MechMode& mode, double temperature_k);

// Bose occupancy of the mode at temperature T (0 at T = 0).
double thermal_occupancy(const MechMode& mode, double temperature_k);

// chi(omega) = (1/m) / (omega_m^2 - omega^2 - i gamma_m omega)  [m/N].
std::complex<double> susceptibility(const MechMode& mode, double omega_per_s);

// Strain tensor at `pos`, scaled from the anchor by the family shape rule:
// flexural-x ~ r cos(phi), flexural-y ~ r sin(phi), breathing uniform.
// Throws ValidationError when pos lies outside the cross-section radius.
StrainTensor strain_at(const MechMode& mode, const QDPosition& pos,
                       double cross_section_radius_m);

// Emitter frequency shift for a given strain (signed, rad/s):
//   shift = a*(e_xx+e_yy+e_zz) + (b/2)*(2 e_zz - e_xx - e_yy), eV -> rad/s.
double frequency_shift_from_strain(const StrainTensor& s,
                                   const DeformationPotentials& dp);

// |shift per zero-point displacement|: lambda = |shift_th| * u_zpf / u_th(T),
// where the tensor normalization temperature must match T.
double coupling_from_strain(const MechMode& mode, const QDPosition& pos,
                            const DeformationPotentials& dp,
                            double temperature_k,
                            double cross_section_radius_m);

// Diagnostic: true when the tensor is close to uniaxial along z, i.e.
// e_xx ~ e_yy ~ -nu * e_zz within rel_tol of |e_zz|.
bool approximately_uniaxial(const StrainTensor& s, double nu, double rel_tol);

}  // namespace trumpet
