#include <doctest.h>

#include <cmath>
#include <vector>

#include "trumpet/constants.hpp"
#include "trumpet/emitter.hpp"
#include "trumpet/errors.hpp"

using trumpet::Drive;
using trumpet::Emitter;
using trumpet::G2Model;
using trumpet::k_two_pi;

TEST_SUITE("emitter") {

TEST_CASE("validation rejects unphysical parameters") {
  Emitter e{1.1e9, 0.0, 0.0};
  CHECK_NOTHROW(e.validate());
  e.gamma_sp_per_s = 0.0;
  CHECK_THROWS_AS(e.validate(), trumpet::ValidationError);
  e = {1.1e9, -1.0, 0.0};
  CHECK_THROWS_AS(e.validate(), trumpet::ValidationError);
  e = {1.1e9, 0.0, -1.0};
  CHECK_THROWS_AS(e.validate(), trumpet::ValidationError);
  Drive d{-1.0, 0.0};
  CHECK_THROWS_AS(d.validate(), trumpet::ValidationError);
}

TEST_CASE("linewidth composition identities") {
  const Emitter e{1.1e9, 1.783e9, 0.0};
  CHECK(e.coherence_decay_per_s() == doctest::Approx(2.333e9));
  // No drive: halfwidth reduces to the coherence decay rate.
  CHECK(power_broadened_halfwidth(e, 0.0) ==
        doctest::Approx(2.333e9).epsilon(1e-12));
  // Frozen from the closed form at omega_r = gamma_sp.
  CHECK(power_broadened_halfwidth(e, 1.1e9) ==
        doctest::Approx(2.8300510596e9).epsilon(1e-9));
  // Monotone in both drive and dephasing.
  CHECK(power_broadened_halfwidth(e, 2e9) > power_broadened_halfwidth(e, 1e9));
}

TEST_CASE("emission rate saturates below gamma_sp/2") {
  const Emitter e{1.1e9, 0.4e9, 0.0};
  for (double om : {1e7, 1e8, 1e9, 1e10, 1e11, 1e12}) {
    const double r = rf_rate(e, {om, 0.0});
    CHECK(r < e.max_rate_per_s());
    CHECK(r > 0.0);
  }
  // Strong drive approaches the ceiling.
  CHECK(rf_rate(e, {1e12, 0.0}) ==
        doctest::Approx(e.max_rate_per_s()).epsilon(1e-4));
}

TEST_CASE("operating point at delta = Gamma") {
  const Emitter e{1.1e9, 0.3e9, 0.0};
  const double om = 0.8e9;
  const double hw = power_broadened_halfwidth(e, om);
  const double peak = rf_rate(e, {om, 0.0});
  const double at_hw = rf_rate(e, {om, hw});
  // Half maximum, and |slope| = rate / halfwidth there.
  CHECK(at_hw == doctest::Approx(0.5 * peak).epsilon(1e-12));
  CHECK(std::abs(rf_slope(e, {om, hw})) ==
        doctest::Approx(at_hw / hw).epsilon(1e-12));
  // Slope is odd in detuning, zero on resonance.
  CHECK(rf_slope(e, {om, 0.0}) == doctest::Approx(0.0));
  CHECK(rf_slope(e, {om, -hw}) == doctest::Approx(-rf_slope(e, {om, hw})));
}

TEST_CASE("slopes equal finite differences of rates") {
  const Emitter homo{1.1e9, 0.3e9, 0.0};
  const Emitter inho{1.1e9, 0.3e9, 1.9e9};
  const double om = 0.9e9;
  for (double delta : {-3.1e9, -0.4e9, 0.55e9, 2.2e9}) {
    const double h = 1e3;  // rad/s; curvature scale is ~1e9
    const double num_h =
        (rf_rate(homo, {om, delta + h}) - rf_rate(homo, {om, delta - h})) /
        (2.0 * h);
    CHECK(rf_slope(homo, {om, delta}) ==
          doctest::Approx(num_h).epsilon(1e-7));
    const double num_v =
        (voigt_rate(inho, {om, delta + h}) - voigt_rate(inho, {om, delta - h})) /
        (2.0 * h);
    CHECK(voigt_slope(inho, {om, delta}) ==
          doctest::Approx(num_v).epsilon(1e-7));
  }
}

// Frozen against adaptive-quadrature convolution of the Lorentzian rate with
// the spectral-diffusion Gaussian (independent of the Faddeeva route).
TEST_CASE("voigt rate and slope match the convolution oracle") {
  const Emitter b{1.1e9, 1.783e9, 3.735e9};
  const double om_b = 1.1e9;
  CHECK(voigt_rate(b, {om_b, 0.0}) ==
        doctest::Approx(1.000454924280e8).epsilon(2e-8));
  CHECK(voigt_rate(b, {om_b, 2.83e9}) ==
        doctest::Approx(8.534215612700e7).epsilon(2e-8));
  CHECK(voigt_rate(b, {om_b, 8.0e9}) ==
        doctest::Approx(3.277266289842e7).epsilon(2e-8));
  CHECK(voigt_slope(b, {om_b, 2.83e9}) ==
        doctest::Approx(-9.428683011947e-3).epsilon(2e-8));
  CHECK(voigt_slope(b, {om_b, 8.0e9}) ==
        doctest::Approx(-7.666504697217e-3).epsilon(2e-8));

  const Emitter c{1.0e9, 0.2e9, 0.5e9};
  const double om_c = 0.5e9;
  CHECK(voigt_rate(c, {om_c, 0.0}) ==
        doctest::Approx(1.046447151828e8).epsilon(2e-8));
  CHECK(voigt_rate(c, {om_c, 1.0e9}) ==
        doctest::Approx(5.998262639813e7).epsilon(2e-8));
  CHECK(voigt_rate(c, {om_c, 5.0e9}) ==
        doctest::Approx(3.510147028559e6).epsilon(2e-8));
  CHECK(voigt_slope(c, {om_c, 1.0e9}) ==
        doctest::Approx(-5.841341042234e-2).epsilon(2e-8));
  CHECK(voigt_slope(c, {om_c, 5.0e9}) ==
        doctest::Approx(-1.407342827681e-3).epsilon(2e-8));
}

TEST_CASE("zero spectral diffusion reduces to the homogeneous line") {
  const Emitter e{1.1e9, 0.3e9, 0.0};
  const Drive d{0.9e9, 1.7e9};
  CHECK(voigt_rate(e, d) == rf_rate(e, d));
  CHECK(voigt_slope(e, d) == rf_slope(e, d));
}

TEST_CASE("spectral diffusion preserves the line area") {
  const Emitter homo{1.1e9, 1.783e9, 0.0};
  const Emitter inho{1.1e9, 1.783e9, 3.735e9};
  const double om = 1.1e9;
  const double hw = power_broadened_halfwidth(homo, om);
  const double span = 40.0 * (hw + inho.sigma_inh_per_s);
  const int n = 40000;
  const double h = 2.0 * span / n;
  double area_h = 0.0, area_v = 0.0;
  for (int i = 0; i < n; ++i) {
    const double delta = -span + (i + 0.5) * h;
    area_h += rf_rate(homo, {om, delta});
    area_v += voigt_rate(inho, {om, delta});
  }
  CHECK(area_v == doctest::Approx(area_h).epsilon(1e-3));
}

TEST_CASE("broadened line reproduces the measured 2 GHz width") {
  // 0.45 GHz power-broadened Lorentzian half width plus a 0.70 GHz-sigma-like
  // Gaussian makes a ~2 GHz full width line.
  const Emitter e{1.1e9, 1.783e9, 3.735e9};
  const double om = 1.1e9;
  const double peak = voigt_rate(e, {om, 0.0});
  // Bisect for the half-maximum crossing.
  double lo = 0.0, hi = 40e9;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (voigt_rate(e, {om, mid}) > 0.5 * peak ? lo : hi) = mid;
  }
  const double fwhm_cycles = 2.0 * lo / k_two_pi;
  // Analytic Voigt-width approximation gives 1.942 GHz for these inputs.
  CHECK(fwhm_cycles == doctest::Approx(1.942e9).epsilon(5e-3));
  CHECK(fwhm_cycles == doctest::Approx(2.0e9).epsilon(0.04));
}

TEST_CASE("g2 antibunches at zero delay and recovers to one") {
  G2Model m;
  m.gamma_sp_per_s = 1.1e9;
  m.omega_r_per_s = 0.4e9;
  CHECK(m.bare(0.0) == doctest::Approx(0.0));
  CHECK(m.bare(1e-6) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(m.bare(-1e-6) == doctest::Approx(1.0).epsilon(1e-9));
  // Symmetric in tau.
  CHECK(m.bare(3e-9) == doctest::Approx(m.bare(-3e-9)));
}

TEST_CASE("g2 shows Rabi oscillations above one under strong drive") {
  G2Model m;
  m.gamma_sp_per_s = 1.1e9;
  m.omega_r_per_s = 5.5e9;  // mu ~ omega_r
  const double mu = std::sqrt(m.omega_r_per_s * m.omega_r_per_s -
                              std::pow(m.gamma_sp_per_s / 4.0, 2));
  const double t_peak = trumpet::k_pi / mu;
  CHECK(m.bare(t_peak) > 1.2);
}

TEST_CASE("g2 is continuous through the critically damped drive") {
  G2Model m;
  m.gamma_sp_per_s = 1.0e9;
  const double om_c = m.gamma_sp_per_s / 4.0;
  const double t = 2.0e-9;
  m.omega_r_per_s = om_c * (1.0 - 1e-7);
  const double below = m.bare(t);
  m.omega_r_per_s = om_c * (1.0 + 1e-7);
  const double above = m.bare(t);
  m.omega_r_per_s = om_c;
  const double at = m.bare(t);
  // The genuine spread from the 1e-7 drive perturbation is ~5e-8 relative;
  // a broken continuation branch would miss by orders of magnitude more.
  CHECK(below == doctest::Approx(at).epsilon(1e-6));
  CHECK(above == doctest::Approx(at).epsilon(1e-6));
}

TEST_CASE("blinking lifts the intermediate-delay plateau to 1/beta") {
  G2Model m;
  m.gamma_sp_per_s = 1.1e9;
  m.omega_r_per_s = 0.6e9;
  m.on_fraction = 0.1;
  m.correlation_time_s = 1e-3;
  // TLS transient is over, blinking correlation barely decayed.
  CHECK(m.bare(1e-6) == doctest::Approx(1.0 / m.on_fraction).epsilon(2e-3));
  CHECK(m.bare(1.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("mode modulation multiplies in as cosines") {
  G2Model m;
  m.gamma_sp_per_s = 1.1e9;
  m.omega_r_per_s = 0.6e9;
  m.mode_omega_per_s = {k_two_pi * 607.9e3};
  m.mode_power = {0.04};
  const double t = 1e-4;  // TLS fully settled
  const double expect = 1.0 + 0.04 * std::cos(k_two_pi * 607.9e3 * t);
  CHECK(m.bare(t) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("timing jitter rounds out the antibunching dip") {
  G2Model m;
  m.gamma_sp_per_s = 1.1e9;
  m.omega_r_per_s = 0.4e9;
  m.jitter_sigma_s = 4e-10;
  CHECK(m.eval(0.0) > 0.05);
  CHECK(m.eval(0.0) < 1.0);
  CHECK(m.bare(0.0) == doctest::Approx(0.0));
  // Convolution preserves the long-delay limit and symmetry.
  CHECK(m.eval(1e-6) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(m.eval(2e-10) == doctest::Approx(m.eval(-2e-10)).epsilon(1e-12));
  m.jitter_sigma_s = 0.0;
  CHECK(m.eval(1e-9) == m.bare(1e-9));
}

}  // TEST_SUITE
