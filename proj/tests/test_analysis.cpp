#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "trumpet/analysis.hpp"
#include "trumpet/constants.hpp"
#include "trumpet/errors.hpp"
#include "trumpet/fft.hpp"
#include "trumpet/rng.hpp"
#include "trumpet/simulator.hpp"

using namespace trumpet;

namespace {

Emitter ideal_emitter() {
  Emitter e;
  e.gamma_sp_per_s = 1.0e9;
  return e;
}

Drive center_drive(const Emitter& e) {
  Drive d;
  d.omega_r_per_s = e.gamma_sp_per_s;  // line-center rate = gamma_sp/3
  d.delta_per_s = 0.0;
  return d;
}

BlinkingModel always_on() {
  BlinkingModel b;
  b.on_fraction = 1.0;
  b.correlation_time_s = 100e-9;
  return b;
}

// Constant-rate photon record: efficiency scales gamma_sp/3 candidates.
PhotonTags poisson_tags(double rate_per_s, double duration_s, uint64_t seed) {
  const Emitter e = ideal_emitter();
  const double efficiency = rate_per_s / (e.gamma_sp_per_s / 3.0);
  // A trace of n samples spans (n - 1) steps, so add one sample to cover
  // the requested duration exactly.
  const std::size_t n = static_cast<std::size_t>(duration_s / 1e-3) + 1;
  return generate_photons(std::vector<double>(n, 0.0), 1e-3, e,
                          center_drive(e), efficiency, always_on(), seed);
}

// Binned record of a rate R(t) = mu/dt * (1 + sum_i a_i cos(2 pi f_i t)).
// Counts are the boxcar integral over each bin, so each tone arrives
// attenuated by sinc(pi f dt) in amplitude, exactly as for real data.
TimeTrace tone_trace(double dt_s, std::size_t n, double mu,
                     const std::vector<double>& amp,
                     const std::vector<double>& freq_hz) {
  TimeTrace trace;
  trace.bin_width_s = dt_s;
  trace.counts.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double value = 1.0;
    for (std::size_t t = 0; t < amp.size(); ++t) {
      const double arg = k_pi * freq_hz[t] * dt_s;
      const double attenuation = std::sin(arg) / arg;
      value += amp[t] * attenuation *
               std::cos(k_two_pi * freq_hz[t] *
                        (static_cast<double>(i) + 0.5) * dt_s);
    }
    trace.counts[i] = static_cast<uint32_t>(std::llround(mu * value));
  }
  return trace;
}

double mean_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("radix-2 fft matches closed forms") {
  // Impulse transforms to a flat spectrum.
  std::vector<std::complex<double>> x(8, 0.0);
  x[0] = 1.0;
  FftPlan plan(8);
  plan.forward(x);
  for (const auto& v : x) {
    CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(v.imag()) < 1e-12);
  }

  // A pure cosine on bin 3 of 32 lands n/2 in that bin and its mirror.
  const std::size_t n = 32;
  std::vector<double> c(n);
  for (std::size_t j = 0; j < n; ++j)
    c[j] = std::cos(k_two_pi * 3.0 * static_cast<double>(j) /
                    static_cast<double>(n));
  const auto half = rfft(c);
  REQUIRE(half.size() == n / 2 + 1);
  for (std::size_t k = 0; k < half.size(); ++k) {
    const double expected = k == 3 ? static_cast<double>(n) / 2.0 : 0.0;
    CHECK(std::abs(half[k] - expected) < 1e-9);
  }

  // Parseval on noise: sum |X|^2 == n * sum x^2.
  PhiloxStream rng(31, 5);
  std::vector<std::complex<double>> z(256);
  double sum_sq = 0.0;
  for (std::size_t j = 0; j < z.size(); j += 2) {
    double g0 = 0.0, g1 = 0.0;
    rng.gauss_pair(j / 2, g0, g1);
    z[j] = g0;
    z[j + 1] = g1;
    sum_sq += g0 * g0 + g1 * g1;
  }
  FftPlan plan256(256);
  plan256.forward(z);
  double sum_power = 0.0;
  for (const auto& v : z) sum_power += std::norm(v);
  CHECK(sum_power == doctest::Approx(256.0 * sum_sq).epsilon(1e-10));

  CHECK_THROWS_AS(FftPlan(0), ValidationError);
  CHECK_THROWS_AS(FftPlan(48), ValidationError);
  std::vector<std::complex<double>> wrong(16);
  CHECK_THROWS_AS(plan.forward(wrong), ValidationError);
}

TEST_CASE("welch floor of a constant-rate record equals 2/rate") {
  // 65536 ms bins at 10 kcounts/s: mean 10 counts per bin.
  const PhotonTags tags = poisson_tags(1.0e4, 65.536, 404);
  const TimeTrace trace = bin_tags(tags, 1e-3);
  REQUIRE(trace.counts.size() == 65536);

  const Spectrum spec = trace_npsd(trace, 4096, SpectralWindow::hann);
  CHECK(spec.averages == 31);
  CHECK(spec.frequency_hz.size() == 2048);
  CHECK(spec.rbw_hz == doctest::Approx(1.5 * 1000.0 / 4096.0));
  CHECK(spec.boxcar_s == doctest::Approx(1e-3));
  CHECK(spec.boxcar_order == 2);
  CHECK(spec.frequency_hz.front() ==
        doctest::Approx(1000.0 / 4096.0).epsilon(1e-12));
  CHECK(spec.frequency_hz.back() == doctest::Approx(500.0).epsilon(1e-12));

  const double floor_expected = 2.0 / spec.mean_rate_per_s;
  std::vector<double> density = spec.density_per_hz;
  std::nth_element(density.begin(), density.begin() + density.size() / 2,
                   density.end());
  CHECK(density[density.size() / 2] ==
        doctest::Approx(floor_expected).epsilon(0.05));
  CHECK(mean_of(spec.density_per_hz) ==
        doctest::Approx(floor_expected).epsilon(0.03));

  // Rectangular window: same floor, exact Parseval bookkeeping.
  const Spectrum rect = trace_npsd(trace, 4096, SpectralWindow::rectangular);
  CHECK(rect.rbw_hz == doctest::Approx(1000.0 / 4096.0));
  CHECK(mean_of(rect.density_per_hz) ==
        doctest::Approx(floor_expected).epsilon(0.03));

  // Guards: too-short trace, degenerate segment length, empty mean.
  TimeTrace stub;
  stub.bin_width_s = 1e-3;
  stub.counts.assign(1000, 5);
  CHECK_THROWS_AS(trace_npsd(stub, 4096), ValidationError);
  CHECK_THROWS_AS(trace_npsd(trace, 1000), ValidationError);
  stub.counts.assign(8192, 0);
  CHECK_THROWS_AS(trace_npsd(stub, 4096), ValidationError);
  stub.counts.clear();
  CHECK_THROWS_AS(trace_npsd(stub, 4096), ValidationError);
}

TEST_CASE("a deterministic tone's power is recovered through the boxcar") {
  // 1641 cycles over the 16.384 s record (quarter-bin offset per segment).
  const double dt = 1e-3, mu = 1e4, a = 0.05;
  const double f0 = 1641.0 / 16.384;
  const TimeTrace trace = tone_trace(dt, 16384, mu, {a}, {f0});
  const Spectrum spec = trace_npsd(trace, 4096, SpectralWindow::hann);

  std::vector<PeakWindow> windows{{f0 - 3.0, f0 + 3.0}, {200.0, 300.0}};
  const auto peaks = find_peaks_and_areas(spec, windows);
  REQUIRE(peaks.size() == 2);
  // The binned record carries the tone attenuated by sinc(pi f0 dt); the
  // area correction must undo exactly that and return a^2/2.
  CHECK(peaks[0].area == doctest::Approx(a * a / 2.0).epsilon(0.02));
  CHECK(std::abs(peaks[0].frequency_hz - f0) < spec.rbw_hz);
  CHECK(peaks[0].floor_per_hz < 1e-9);
  CHECK_FALSE(peaks[0].clipped);
  CHECK(std::abs(peaks[1].area) < 1e-8);

  // Parseval against the directly computed relative variance (raw
  // densities, so the comparison includes the boxcar attenuation).
  const Spectrum rect = trace_npsd(trace, 4096, SpectralWindow::rectangular);
  double integral = 0.0;
  for (std::size_t i = 0; i < rect.density_per_hz.size(); ++i) {
    const double lo = i == 0 ? rect.frequency_hz[0] * 0.5
                             : 0.5 * (rect.frequency_hz[i - 1] +
                                      rect.frequency_hz[i]);
    const double hi = i + 1 == rect.density_per_hz.size()
                          ? rect.frequency_hz[i]
                          : 0.5 * (rect.frequency_hz[i] +
                                   rect.frequency_hz[i + 1]);
    integral += rect.density_per_hz[i] * (hi - lo);
  }
  double mean = 0.0;
  for (auto c : trace.counts) mean += c;
  mean /= static_cast<double>(trace.counts.size());
  double var = 0.0;
  for (auto c : trace.counts) {
    const double x = c / mean - 1.0;
    var += x * x;
  }
  var /= static_cast<double>(trace.counts.size());
  CHECK(integral == doctest::Approx(var).epsilon(0.01));
}

TEST_CASE("two tones at the flexural pair frequencies are resolved") {
  const double dt = 2.5e-7, f1 = 512.8e3, f2 = 607.9e3;
  const TimeTrace trace =
      tone_trace(dt, 49152, 2000.0, {0.02, 0.02}, {f1, f2});
  const Spectrum spec = trace_npsd(trace, 16384, SpectralWindow::hann);
  CHECK(spec.averages == 5);

  const auto peaks = find_peaks_and_areas(
      spec, {{480e3, 545e3}, {575e3, 640e3}});
  REQUIRE(peaks.size() == 2);
  CHECK(std::abs(peaks[0].frequency_hz - f1) < spec.rbw_hz);
  CHECK(std::abs(peaks[1].frequency_hz - f2) < spec.rbw_hz);
  CHECK(peaks[0].area == doctest::Approx(2e-4).epsilon(0.03));
  CHECK(peaks[1].area == doctest::Approx(2e-4).epsilon(0.03));
}

TEST_CASE("g2 of a split constant-rate record is flat at one") {
  PhotonTags tags = poisson_tags(2.0e5, 2.0, 505);
  tags = hbt_split(tags, 506);
  const CorrelationTable table = g2_histogram(tags, 1e-6, 1e-4);
  REQUIRE(table.tau_s.size() == 100);
  CHECK_FALSE(table.poor_statistics);
  CHECK(table.rate0_per_s == doctest::Approx(1e5).epsilon(0.05));
  CHECK(table.rate1_per_s == doctest::Approx(1e5).epsilon(0.05));
  CHECK(table.bin_s == doctest::Approx(1e-6));

  // ~4e4 pairs per bin: 6 sigma is 3 %.
  double worst = 0.0;
  for (double g : table.g2) worst = std::max(worst, std::abs(g - 1.0));
  CHECK(worst < 0.03);
  CHECK(mean_of(table.g2) == doctest::Approx(1.0).epsilon(0.005));
  table.validate();
}

TEST_CASE("g2 of a blinking emitter bunches by the inverse on-fraction") {
  const Emitter e = ideal_emitter();
  BlinkingModel blink;
  blink.on_fraction = 0.1;
  blink.correlation_time_s = 2e-5;
  // 3e-3 of gamma_sp/3 while on: 1e6/s on-state, 1e5/s average.
  PhotonTags tags =
      generate_photons(std::vector<double>(2000, 0.0), 1e-3, e,
                       center_drive(e), 3e-3, blink, 607);
  tags = hbt_split(tags, 608);
  const CorrelationTable table = g2_histogram(tags, 2e-6, 2e-4);
  REQUIRE(table.tau_s.size() == 100);
  CHECK_FALSE(table.poor_statistics);

  // Two-state telegraph: g2(tau) = 1 + (1-beta)/beta * exp(-tau/tau_c),
  // mildly compressed by the plateau normalization (~2 %).
  CHECK(table.g2.front() > 8.0);
  CHECK(table.g2.front() < 11.0);
  CHECK(table.g2[10] > 3.2);   // tau = tau_c: 1 + 9/e
  CHECK(table.g2[10] < 5.0);
  std::vector<double> tail(table.g2.begin() + 75, table.g2.end());
  CHECK(mean_of(tail) == doctest::Approx(1.0).epsilon(0.07));

  // Guards: channel structure and the poor-statistics flag.
  PhotonTags mono = poisson_tags(1e4, 0.5, 609);
  CHECK_THROWS_AS(g2_histogram(mono, 1e-6, 1e-5), ValidationError);
  PhotonTags lopsided;
  lopsided.duration_s = 1e-3;
  lopsided.channel_count = 2;
  lopsided.events = {{1e-4, 0}, {2e-4, 0}, {3e-4, 0}};
  CHECK_THROWS_AS(g2_histogram(lopsided, 1e-5, 1e-4), ValidationError);
  PhotonTags sparse;
  sparse.duration_s = 1e-3;
  sparse.channel_count = 2;
  sparse.events = {{1.0e-4, 0}, {1.2e-4, 1}, {2.0e-4, 0}, {2.6e-4, 1},
                   {5.0e-4, 0}, {6.4e-4, 1}, {8.0e-4, 0}, {9.1e-4, 1}};
  const CorrelationTable starved = g2_histogram(sparse, 5e-5, 5e-4);
  CHECK(starved.poor_statistics);
}

TEST_CASE("correlation spectrum closed forms") {
  // g2 identically 1 transforms to an identically zero spectrum.
  CorrelationTable flat;
  flat.bin_s = 1e-6;
  flat.duration_s = 1.0;
  flat.rate0_per_s = flat.rate1_per_s = 1e5;
  for (int j = 0; j < 100; ++j) {
    flat.tau_s.push_back((j + 0.5) * 1e-6);
    flat.g2.push_back(1.0);
    flat.pair_counts.push_back(1000.0);
  }
  const Spectrum zero = npsd_from_g2(flat, 1e5, 2.5e-7);
  for (double d : zero.density_per_hz) CHECK(d == 0.0);
  CHECK(zero.boxcar_order == 1);
  CHECK(zero.averages == 0);

  // Damped cosine: a 1 MHz line much wider than the transform kernel.
  // The quoted recovery (95.2 % of C(0)) reflects the tau_min exclusion;
  // frozen from an independent numerical transform of the same table.
  const double c = 0.05, tau_d = 1e-4, f0 = 1e6, bin = 1e-7;
  CorrelationTable damped;
  damped.bin_s = bin;
  damped.duration_s = 10.0;
  damped.rate0_per_s = damped.rate1_per_s = 1e5;
  for (int j = 0; j < 6000; ++j) {
    const double tau = (j + 0.5) * bin;
    damped.tau_s.push_back(tau);
    damped.g2.push_back(1.0 + c * std::exp(-tau / tau_d) *
                                  std::cos(k_two_pi * f0 * tau));
    damped.pair_counts.push_back(1000.0);
  }
  const Spectrum spec = npsd_from_g2(damped, 2e5, 2.5e-7);
  CHECK(spec.rbw_hz == doctest::Approx(1.0 / (2.0 * 5.99750e-4)).epsilon(1e-9));
  const auto peaks =
      find_peaks_and_areas(spec, {{f0 - 32e3, f0 + 32e3}});
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].area == doctest::Approx(0.952 * c).epsilon(0.01));
  CHECK(std::abs(peaks[0].frequency_hz - f0) < spec.rbw_hz);
  CHECK(peaks[0].area_sigma > 0.0);

  CHECK_THROWS_AS(npsd_from_g2(flat, 1e5, 1.0), ValidationError);
  CHECK_THROWS_AS(npsd_from_g2(flat, 0.0, 2.5e-7), ValidationError);
}

TEST_CASE("peak integration recovers a constructed lorentzian") {
  // Floor 1e-6/Hz, area 1e-3 at 100 kHz with 1 kHz FWHM, df = 100 Hz.
  Spectrum spec;
  const double floor = 1e-6, area = 1e-3, f0 = 100e3, hw = 500.0;
  for (int i = 1; i <= 3000; ++i) {
    const double f = 100.0 * i;
    spec.frequency_hz.push_back(f);
    spec.density_per_hz.push_back(
        floor + area / k_pi * hw / ((f - f0) * (f - f0) + hw * hw));
  }
  spec.mean_rate_per_s = 1e6;
  spec.rbw_hz = 100.0;
  spec.averages = 50;

  const auto peaks = find_peaks_and_areas(
      spec, {{f0 - 10e3, f0 + 10e3}, {200e3, 250e3}});
  REQUIRE(peaks.size() == 2);
  // +/- 10 FWHM captures 96.8 % of a Lorentzian.
  CHECK(peaks[0].area == doctest::Approx(area).epsilon(0.05));
  CHECK(peaks[0].area > 0.94 * area);
  CHECK(peaks[0].frequency_hz == doctest::Approx(f0).epsilon(1e-3));
  CHECK(peaks[0].floor_per_hz == doctest::Approx(floor).epsilon(0.02));
  CHECK_FALSE(peaks[0].clipped);
  CHECK(std::abs(peaks[1].area) <= 3.0 * peaks[1].area_sigma + 1e-12);

  // A window over a dip clips at zero instead of reporting negative area.
  Spectrum dipped = spec;
  for (std::size_t i = 0; i < dipped.frequency_hz.size(); ++i)
    if (dipped.frequency_hz[i] >= 260e3 && dipped.frequency_hz[i] <= 262e3)
      dipped.density_per_hz[i] = 0.2 * floor;
  const auto clipped = find_peaks_and_areas(dipped, {{260e3, 262e3}});
  CHECK(clipped[0].clipped);
  CHECK(clipped[0].area == 0.0);

  CHECK_THROWS_AS(
      find_peaks_and_areas(spec, {{90e3, 110e3}, {105e3, 120e3}}),
      ValidationError);
  CHECK_THROWS_AS(find_peaks_and_areas(spec, {{0.0, 1e3}}), ValidationError);
  CHECK_THROWS_AS(find_peaks_and_areas(spec, {{290e3, 310e3}}),
                  ValidationError);
}

TEST_CASE("voigt lineshape fit recovers generator parameters") {
  LineshapeParams truth;
  truth.lorentzian_fwhm_per_s = k_two_pi * 0.45e9;
  truth.gaussian_fwhm_per_s = k_two_pi * 0.70e9;
  truth.amplitude_per_s = 1e6;
  truth.center_per_s = k_two_pi * 0.2e9;
  const double fwhm_v = k_two_pi * 0.971e9;  // combined width of the pair

  // 401 points over 6 widths: at 1 % additive noise the Lorentzian/Gaussian
  // split carries ~1.7 % standard error, so the 5 % check is a sound bound.
  std::vector<RateScanPoint> scan;
  PhiloxStream rng(88, 12);
  for (int i = 0; i < 401; ++i) {
    const double delta =
        truth.center_per_s + (i - 200) * (3.0 * fwhm_v / 200.0);
    double g0 = 0.0, g1 = 0.0;
    rng.gauss_pair(i, g0, g1);
    scan.push_back({delta, std::max(
        0.0, lineshape_rate(truth, delta) + 0.01 * truth.amplitude_per_s * g0)});
  }
  const FitReport report = fit_rf_spectrum(scan);
  CHECK(report.params.lorentzian_fwhm_per_s ==
        doctest::Approx(truth.lorentzian_fwhm_per_s).epsilon(0.05));
  CHECK(report.params.gaussian_fwhm_per_s ==
        doctest::Approx(truth.gaussian_fwhm_per_s).epsilon(0.05));
  CHECK(report.params.amplitude_per_s ==
        doctest::Approx(truth.amplitude_per_s).epsilon(0.05));
  CHECK(std::abs(report.params.center_per_s - truth.center_per_s) <
        0.05 * fwhm_v);
  CHECK(report.iterations < 200);
  CHECK(report.residuals_white);
  CHECK(report.sigma_lorentzian_fwhm > 0.0);
  CHECK(report.sigma_lorentzian_fwhm < 0.2 * truth.lorentzian_fwhm_per_s);
  CHECK(report.sigma_gaussian_fwhm > 0.0);
  CHECK(report.sigma_amplitude > 0.0);

  // A pure Lorentzian generator drives the Gaussian width to zero.
  LineshapeParams lorentz = truth;
  lorentz.gaussian_fwhm_per_s = 0.0;
  std::vector<RateScanPoint> clean;
  for (int i = 0; i < 41; ++i) {
    const double delta =
        truth.center_per_s + (i - 20) * (3.0 * truth.lorentzian_fwhm_per_s / 10.0);
    clean.push_back({delta, lineshape_rate(lorentz, delta)});
  }
  const FitReport pure = fit_rf_spectrum(clean);
  CHECK(pure.params.lorentzian_fwhm_per_s ==
        doctest::Approx(truth.lorentzian_fwhm_per_s).epsilon(0.02));
  CHECK(pure.params.gaussian_fwhm_per_s <
        0.05 * truth.lorentzian_fwhm_per_s);
  CHECK(pure.params.amplitude_per_s ==
        doctest::Approx(truth.amplitude_per_s).epsilon(0.01));

  // Guards: too few points, and a scan that never leaves the line core.
  std::vector<RateScanPoint> few(scan.begin(), scan.begin() + 9);
  CHECK_THROWS_AS(fit_rf_spectrum(few), ValidationError);
  std::vector<RateScanPoint> narrow;
  for (int i = 0; i < 12; ++i) {
    const double delta =
        truth.center_per_s + (i - 6) * (0.1 * fwhm_v);
    narrow.push_back({delta, lineshape_rate(truth, delta)});
  }
  CHECK_THROWS_AS(fit_rf_spectrum(narrow), ValidationError);
}

TEST_CASE("ljung-box distinguishes white from correlated residuals") {
  PhiloxStream rng(4242, 7);
  std::vector<double> white(500);
  for (std::size_t i = 0; i < white.size(); i += 2) {
    double g0 = 0.0, g1 = 0.0;
    rng.gauss_pair(i / 2, g0, g1);
    white[i] = g0;
    white[i + 1] = g1;
  }
  CHECK(ljung_box_white(white));

  std::vector<double> ar1(white.size());
  ar1[0] = white[0];
  for (std::size_t i = 1; i < ar1.size(); ++i)
    ar1[i] = 0.6 * ar1[i - 1] + white[i];
  CHECK_FALSE(ljung_box_white(ar1));

  CHECK(ljung_box_white(std::vector<double>(50, 3.0)));
  CHECK_THROWS_AS(ljung_box_white(std::vector<double>(4, 1.0)),
                  ValidationError);
  CHECK_THROWS_AS(ljung_box_white(white, 11), ValidationError);
}

}  // TEST_SUITE
