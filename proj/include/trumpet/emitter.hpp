#pragma once

// Two-level emitter under continuous resonant drive: steady-state photon
// rates versus laser detuning, their slopes (the transduction gain for
// spectral modulation), and the intensity-correlation model used to fit
// measured photon statistics.
//
// All rates and frequencies are angular (rad/s) unless a member name says
// otherwise; see constants.hpp for the ingestion convention.

#include <vector>

namespace trumpet {

struct Emitter {
  double gamma_sp_per_s = 0.0;    // spontaneous emission rate
  double gamma_star_per_s = 0.0;  // pure dephasing rate
  double sigma_inh_per_s = 0.0;   // slow spectral-diffusion Gaussian sigma

  // Coherence decay rate gamma = gamma_sp/2 + gamma_star.
  double coherence_decay_per_s() const {
    return 0.5 * gamma_sp_per_s + gamma_star_per_s;
  }

  // Hard ceiling on the emission rate at any drive: gamma_sp/2.
  double max_rate_per_s() const { return 0.5 * gamma_sp_per_s; }

  void validate() const;
};

struct Drive {
  double omega_r_per_s = 0.0;  // Rabi frequency
  double delta_per_s = 0.0;    // laser detuning from the emitter resonance

  void validate() const;
};

// Power-broadened half width Gamma = sqrt(gamma^2 + (gamma/gamma_sp) W^2).
double power_broadened_halfwidth(const Emitter& e, double omega_r_per_s);

// Steady-state emission rate of the homogeneous (Lorentzian) line.
double rf_rate(const Emitter& e, const Drive& d);

// d(rf_rate)/d(delta): the gain converting a small resonance shift into a
// count-rate change.
double rf_slope(const Emitter& e, const Drive& d);

// Emission rate with the slow spectral-diffusion Gaussian folded in (Voigt
// line). Falls back to rf_rate when sigma_inh is zero.
double voigt_rate(const Emitter& e, const Drive& d);

// d(voigt_rate)/d(delta), computed from the analytic Faddeeva derivative.
double voigt_slope(const Emitter& e, const Drive& d);

// Fitted profile of the detected count rate versus laser detuning: a Voigt
// line parameterized by its Lorentzian and Gaussian FWHM contributions.
struct LineshapeParams {
  double lorentzian_fwhm_per_s = 0.0;
  double gaussian_fwhm_per_s = 0.0;
  double amplitude_per_s = 0.0;  // detected rate at the line center, counts/s
  double center_per_s = 0.0;     // line-center detuning

  void validate() const;
};

// Detected rate the fitted profile predicts at a given detuning.
double lineshape_rate(const LineshapeParams& p, double delta_per_s);

// Analytic d(rate)/d(delta) of the fitted profile.
double lineshape_slope(const LineshapeParams& p, double delta_per_s);

// Intensity correlation model g2(tau):
//
//   [TLS antibunching/Rabi term] x [blinking telegraph] x [mode modulation],
//
// optionally convolved with the detector-pair timing response (Gaussian of
// sigma*sqrt(2) for two detectors of jitter sigma each).
struct G2Model {
  double gamma_sp_per_s = 0.0;
  double omega_r_per_s = 0.0;
  double on_fraction = 1.0;        // stationary on-probability of blinking
  double correlation_time_s = 0.0; // blinking correlation time; 0 disables
  std::vector<double> mode_omega_per_s;  // modulating mode frequencies
  std::vector<double> mode_power;        // relative modulation power per mode
  double jitter_sigma_s = 0.0;     // per-detector timing jitter sigma

  void validate() const;

  // Model without the timing-response convolution.
  double bare(double tau_s) const;

  // Full model as a detector pair would record it.
  double eval(double tau_s) const;
};

}  // namespace trumpet
