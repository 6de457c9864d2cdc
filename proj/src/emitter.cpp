#include "trumpet/emitter.hpp"

#include <cmath>
#include <complex>

#include "trumpet/constants.hpp"
#include "trumpet/errors.hpp"
#include "trumpet/faddeeva.hpp"

namespace trumpet {

void Emitter::validate() const {
  require_valid(gamma_sp_per_s > 0.0, "emitter: gamma_sp_per_s must be > 0");
  require_valid(gamma_star_per_s >= 0.0,
                "emitter: gamma_star_per_s must be >= 0");
  require_valid(sigma_inh_per_s >= 0.0, "emitter: sigma_inh_per_s must be >= 0");
}

void Drive::validate() const {
  require_valid(omega_r_per_s >= 0.0, "drive: omega_r_per_s must be >= 0");
  require_valid(std::isfinite(delta_per_s), "drive: delta_per_s must be finite");
}

double power_broadened_halfwidth(const Emitter& e, double omega_r_per_s) {
  const double gamma = e.coherence_decay_per_s();
  return std::sqrt(gamma * gamma +
                   (gamma / e.gamma_sp_per_s) * omega_r_per_s * omega_r_per_s);
}

double rf_rate(const Emitter& e, const Drive& d) {
  const double gamma = e.coherence_decay_per_s();
  const double hw = power_broadened_halfwidth(e, d.omega_r_per_s);
  const double saturation =
      (gamma / e.gamma_sp_per_s) * d.omega_r_per_s * d.omega_r_per_s;
  return 0.5 * e.gamma_sp_per_s * saturation /
         (d.delta_per_s * d.delta_per_s + hw * hw);
}

double rf_slope(const Emitter& e, const Drive& d) {
  const double hw = power_broadened_halfwidth(e, d.omega_r_per_s);
  return -rf_rate(e, d) * 2.0 * d.delta_per_s /
         (d.delta_per_s * d.delta_per_s + hw * hw);
}

namespace {

// The Voigt rate is the Lorentzian's area times the unit-area Voigt profile
//   V(delta) = Re w((delta + i*Gamma)/(sigma sqrt 2)) / (sigma sqrt(2 pi)).
double lorentzian_area(const Emitter& e, const Drive& d, double hw) {
  const double gamma = e.coherence_decay_per_s();
  return 0.5 * e.gamma_sp_per_s * (gamma / e.gamma_sp_per_s) *
         d.omega_r_per_s * d.omega_r_per_s * k_pi / hw;
}

}  // namespace

double voigt_rate(const Emitter& e, const Drive& d) {
  if (e.sigma_inh_per_s == 0.0) return rf_rate(e, d);
  const double hw = power_broadened_halfwidth(e, d.omega_r_per_s);
  const double s = e.sigma_inh_per_s * std::sqrt(2.0);
  const std::complex<double> z(d.delta_per_s / s, hw / s);
  return lorentzian_area(e, d, hw) * faddeeva_w(z).real() /
         (e.sigma_inh_per_s * std::sqrt(k_two_pi));
}

double voigt_slope(const Emitter& e, const Drive& d) {
  if (e.sigma_inh_per_s == 0.0) return rf_slope(e, d);
  const double hw = power_broadened_halfwidth(e, d.omega_r_per_s);
  const double s = e.sigma_inh_per_s * std::sqrt(2.0);
  const std::complex<double> z(d.delta_per_s / s, hw / s);
  // d/d(delta) Re w(z) = Re w'(z) / (sigma sqrt 2) since dz/d(delta) is real.
  return lorentzian_area(e, d, hw) * faddeeva_w_derivative(z).real() /
         (s * e.sigma_inh_per_s * std::sqrt(k_two_pi));
}

void LineshapeParams::validate() const {
  require_valid(lorentzian_fwhm_per_s >= 0.0,
                "lineshape: lorentzian_fwhm_per_s must be >= 0");
  require_valid(gaussian_fwhm_per_s >= 0.0,
                "lineshape: gaussian_fwhm_per_s must be >= 0");
  require_valid(lorentzian_fwhm_per_s > 0.0 || gaussian_fwhm_per_s > 0.0,
                "lineshape: at least one width must be > 0");
  require_valid(amplitude_per_s >= 0.0,
                "lineshape: amplitude_per_s must be >= 0");
  require_valid(std::isfinite(center_per_s),
                "lineshape: center_per_s must be finite");
}

namespace {

constexpr double k_fwhm_per_sigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

}  // namespace

double lineshape_rate(const LineshapeParams& p, double delta_per_s) {
  const double x = delta_per_s - p.center_per_s;
  const double hw = 0.5 * p.lorentzian_fwhm_per_s;
  const double sigma = p.gaussian_fwhm_per_s / k_fwhm_per_sigma;
  if (sigma == 0.0 && hw == 0.0) return x == 0.0 ? p.amplitude_per_s : 0.0;
  if (sigma == 0.0)
    return p.amplitude_per_s * hw * hw / (x * x + hw * hw);
  if (hw == 0.0)
    return p.amplitude_per_s * std::exp(-0.5 * x * x / (sigma * sigma));
  const double s = sigma * std::sqrt(2.0);
  const double peak = faddeeva_w({0.0, hw / s}).real();
  return p.amplitude_per_s * faddeeva_w({x / s, hw / s}).real() / peak;
}

double lineshape_slope(const LineshapeParams& p, double delta_per_s) {
  const double x = delta_per_s - p.center_per_s;
  const double hw = 0.5 * p.lorentzian_fwhm_per_s;
  const double sigma = p.gaussian_fwhm_per_s / k_fwhm_per_sigma;
  if (sigma == 0.0 && hw == 0.0) return 0.0;
  if (sigma == 0.0) {
    const double den = x * x + hw * hw;
    return p.amplitude_per_s * hw * hw * (-2.0 * x) / (den * den);
  }
  if (hw == 0.0)
    return p.amplitude_per_s * (-x / (sigma * sigma)) *
           std::exp(-0.5 * x * x / (sigma * sigma));
  const double s = sigma * std::sqrt(2.0);
  const double peak = faddeeva_w({0.0, hw / s}).real();
  return p.amplitude_per_s * faddeeva_w_derivative({x / s, hw / s}).real() /
         (s * peak);
}

void G2Model::validate() const {
  require_valid(gamma_sp_per_s > 0.0, "g2 model: gamma_sp_per_s must be > 0");
  require_valid(omega_r_per_s >= 0.0, "g2 model: omega_r_per_s must be >= 0");
  require_valid(on_fraction > 0.0 && on_fraction <= 1.0,
                "g2 model: on_fraction must be in (0,1]");
  require_valid(correlation_time_s >= 0.0,
                "g2 model: correlation_time_s must be >= 0");
  require_valid(mode_omega_per_s.size() == mode_power.size(),
                "g2 model: mode arrays must have equal length");
  require_valid(jitter_sigma_s >= 0.0, "g2 model: jitter_sigma_s must be >= 0");
}

namespace {

// exp(-a t) * [cos(mu t) + (a/mu) sin(mu t)] where mu^2 = m2 may be negative
// (overdamped regime) or near zero; every branch is written so that nothing
// overflows even though cosh/sinh individually would.
double damped_rabi_envelope(double m2, double a, double t) {
  const double scale = m2 * t * t;
  if (std::abs(scale) < 1e-9) {
    // Series in m2 t^2 around the critically damped point.
    const double c = 1.0 - scale / 2.0 + scale * scale / 24.0;
    const double s_over_mu =
        t * (1.0 - scale / 6.0 + scale * scale / 120.0);
    return std::exp(-a * t) * (c + a * s_over_mu);
  }
  if (m2 > 0.0) {
    const double mu = std::sqrt(m2);
    return std::exp(-a * t) * (std::cos(mu * t) + (a / mu) * std::sin(mu * t));
  }
  // m2 < 0: combine the growing exponential with the envelope analytically;
  // nu < a always holds here, so both exponents decay.
  const double nu = std::sqrt(-m2);
  const double ep = std::exp((nu - a) * t);
  const double em = std::exp(-(nu + a) * t);
  return 0.5 * (ep + em) + (a / nu) * 0.5 * (ep - em);
}

}  // namespace

double G2Model::bare(double tau_s) const {
  const double t = std::abs(tau_s);
  const double a = 0.75 * gamma_sp_per_s;
  const double m2 = omega_r_per_s * omega_r_per_s -
                    0.0625 * gamma_sp_per_s * gamma_sp_per_s;
  double g = 1.0 - damped_rabi_envelope(m2, a, t);

  if (correlation_time_s > 0.0 && on_fraction < 1.0) {
    g *= 1.0 + (1.0 - on_fraction) / on_fraction *
                   std::exp(-t / correlation_time_s);
  }
  double modulation = 1.0;
  for (std::size_t k = 0; k < mode_omega_per_s.size(); ++k)
    modulation += mode_power[k] * std::cos(mode_omega_per_s[k] * t);
  return g * modulation;
}

double G2Model::eval(double tau_s) const {
  if (jitter_sigma_s == 0.0) return bare(tau_s);
  // Pair response: Gaussian of width sigma*sqrt(2). Midpoint quadrature over
  // +-6 sigma; the |tau| kink limits this to ~1e-5 absolute, ample for fits.
  const double se = jitter_sigma_s * std::sqrt(2.0);
  constexpr int n = 201;
  const double lo = -6.0 * se;
  const double h = 12.0 * se / n;
  double acc = 0.0, norm = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = lo + (i + 0.5) * h;
    const double wgt = std::exp(-0.5 * s * s / (se * se));
    acc += wgt * bare(tau_s - s);
    norm += wgt;
  }
  return acc / norm;
}

}  // namespace trumpet
