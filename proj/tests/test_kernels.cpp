#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "trumpet/analysis.hpp"
#include "trumpet/constants.hpp"
#include "trumpet/errors.hpp"
#include "trumpet/kernels.hpp"
#include "trumpet/rng.hpp"
#include "trumpet/tags.hpp"

using namespace trumpet;

namespace {

// Restores automatic dispatch however a test case exits.
struct BackendGuard {
  ~BackendGuard() { set_kernel_backend(KernelBackend::automatic); }
};

bool avx2_available() {
  BackendGuard guard;
  return set_kernel_backend(KernelBackend::automatic) == KernelBackend::avx2;
}

std::vector<double> random_weights(std::size_t n, std::uint64_t seed) {
  PhiloxStream rng(seed, 3);
  std::vector<double> w(n);
  for (std::size_t m = 0; m < n; ++m) w[m] = 2.0 * rng.u01(m) - 1.0;
  return w;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("cosine sums match direct evaluation on every backend") {
  BackendGuard guard;
  const std::size_t n = 3000;
  const std::vector<double> w = random_weights(n, 7);
  double weight_scale = 0.0;
  for (double v : w) weight_scale += std::abs(v);

  // Nine frequencies (not a multiple of the vector width, so the tail path
  // runs too), from a near-DC rotation to one near the alias edge.
  const std::vector<double> dtheta = {1e-4, 0.003, 0.04, 0.3, 1.1,
                                      2.2,  3.0,   3.1415, 0.5};
  const std::vector<double> theta0 = {0.0, 0.3, 100.7, -4.2, 12.9,
                                      1.0, 2.5, 0.77,  -0.1};
  const std::size_t n_out = dtheta.size();

  std::vector<double> direct(n_out, 0.0);
  for (std::size_t k = 0; k < n_out; ++k)
    for (std::size_t m = 0; m < n; ++m)
      direct[k] += w[m] * std::cos(theta0[k] + static_cast<double>(m) *
                                                   dtheta[k]);

  REQUIRE(set_kernel_backend(KernelBackend::scalar) == KernelBackend::scalar);
  std::vector<double> scalar_out(n_out);
  weighted_cosine_sums(w.data(), n, theta0.data(), dtheta.data(), n_out,
                       scalar_out.data());
  for (std::size_t k = 0; k < n_out; ++k)
    CHECK(std::abs(scalar_out[k] - direct[k]) < 1e-9 * weight_scale);

  if (avx2_available()) {
    REQUIRE(set_kernel_backend(KernelBackend::avx2) == KernelBackend::avx2);
    std::vector<double> wide_out(n_out);
    weighted_cosine_sums(w.data(), n, theta0.data(), dtheta.data(), n_out,
                         wide_out.data());
    for (std::size_t k = 0; k < n_out; ++k) {
      CHECK(std::abs(wide_out[k] - direct[k]) < 1e-9 * weight_scale);
      CHECK(std::abs(wide_out[k] - scalar_out[k]) < 1e-11 * weight_scale);
    }
  }

  // Degenerate shapes: empty series zeroes the output, empty output is a
  // no-op, null arrays are rejected.
  std::vector<double> zeros(n_out, 123.0);
  weighted_cosine_sums(w.data(), 0, theta0.data(), dtheta.data(), n_out,
                       zeros.data());
  for (double v : zeros) CHECK(v == 0.0);
  weighted_cosine_sums(w.data(), n, theta0.data(), dtheta.data(), 0, nullptr);
  CHECK_THROWS_AS(weighted_cosine_sums(nullptr, n, theta0.data(),
                                       dtheta.data(), n_out, zeros.data()),
                  ValidationError);
  CHECK_THROWS_AS(weighted_cosine_sums(w.data(), n, nullptr, dtheta.data(),
                                       n_out, zeros.data()),
                  ValidationError);
}

TEST_CASE("windowed relative fill matches on every backend") {
  BackendGuard guard;
  const std::size_t n = 1027;  // three-element vector tail
  PhiloxStream rng(11, 4);
  std::vector<std::uint32_t> counts(n);
  std::vector<double> window(n);
  for (std::size_t j = 0; j < n; ++j) {
    counts[j] = static_cast<std::uint32_t>(rng.u01(2 * j) * 1e6);
    window[j] = rng.u01(2 * j + 1);
  }
  // Pin the documented conversion bound and the zero-count case.
  counts[0] = 0;
  counts[1] = 2147483647u;  // 2^31 - 1
  const double inv_mean = 1.0 / 12345.0;

  set_kernel_backend(KernelBackend::scalar);
  std::vector<double> scalar_out(n);
  windowed_relative(window.data(), counts.data(), n, inv_mean,
                    scalar_out.data());
  for (std::size_t j = 0; j < n; ++j) {
    const double expect =
        window[j] * (static_cast<double>(counts[j]) * inv_mean - 1.0);
    CHECK(scalar_out[j] == doctest::Approx(expect).epsilon(1e-15));
  }

  if (avx2_available()) {
    set_kernel_backend(KernelBackend::avx2);
    std::vector<double> wide_out(n);
    windowed_relative(window.data(), counts.data(), n, inv_mean,
                      wide_out.data());
    for (std::size_t j = 0; j < n; ++j)
      CHECK(std::abs(wide_out[j] - scalar_out[j]) <=
            1e-14 * (std::abs(scalar_out[j]) + 1.0));
  }

  CHECK_THROWS_AS(windowed_relative(nullptr, counts.data(), n, inv_mean,
                                    scalar_out.data()),
                  ValidationError);
}

TEST_CASE("power accumulation adds into the accumulator") {
  BackendGuard guard;
  const std::size_t n = 7;  // odd length exercises the vector tail
  PhiloxStream rng(13, 5);
  std::vector<std::complex<double>> x(n);
  for (std::size_t k = 0; k < n; ++k)
    x[k] = {2.0 * rng.u01(2 * k) - 1.0, 2.0 * rng.u01(2 * k + 1) - 1.0};

  set_kernel_backend(KernelBackend::scalar);
  std::vector<double> acc(n, 1.0);
  accumulate_power(x.data(), n, acc.data());
  accumulate_power(x.data(), n, acc.data());
  for (std::size_t k = 0; k < n; ++k)
    CHECK(acc[k] == doctest::Approx(1.0 + 2.0 * std::norm(x[k]))
                        .epsilon(1e-12));

  if (avx2_available()) {
    set_kernel_backend(KernelBackend::avx2);
    std::vector<double> wide_acc(n, 1.0);
    accumulate_power(x.data(), n, wide_acc.data());
    accumulate_power(x.data(), n, wide_acc.data());
    for (std::size_t k = 0; k < n; ++k)
      CHECK(wide_acc[k] == doctest::Approx(acc[k]).epsilon(1e-14));
  }

  CHECK_THROWS_AS(accumulate_power(nullptr, n, acc.data()), ValidationError);
}

TEST_CASE("backend selection is explicit and reversible") {
  BackendGuard guard;
  CHECK(set_kernel_backend(KernelBackend::scalar) == KernelBackend::scalar);
  CHECK(active_kernel_backend() == KernelBackend::scalar);

  const KernelBackend detected =
      set_kernel_backend(KernelBackend::automatic);
  CHECK((detected == KernelBackend::scalar ||
         detected == KernelBackend::avx2));
  CHECK(active_kernel_backend() == detected);

  if (detected == KernelBackend::avx2) {
    CHECK(set_kernel_backend(KernelBackend::avx2) == KernelBackend::avx2);
  } else {
    // Forcing the wide backend without CPU support must refuse, not crash.
    CHECK_THROWS_AS(set_kernel_backend(KernelBackend::avx2), ValidationError);
  }
}

TEST_CASE("spectral estimates agree across backends end to end") {
  BackendGuard guard;

  // Binned tone record through the Welch path.
  TimeTrace trace;
  trace.bin_width_s = 1e-3;
  const std::size_t n = 6144;
  trace.counts.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * trace.bin_width_s;
    trace.counts[i] = static_cast<std::uint32_t>(
        std::llround(1e4 * (1.0 + 0.05 * std::cos(k_two_pi * 100.0 * t))));
  }

  // Damped-cosine correlation table through the transform path.
  CorrelationTable table;
  table.bin_s = 1e-7;
  table.duration_s = 10.0;
  table.rate0_per_s = 1e5;
  table.rate1_per_s = 1e5;
  const std::size_t m = 3000;
  table.tau_s.resize(m);
  table.g2.resize(m);
  table.pair_counts.assign(m, 1000);
  for (std::size_t j = 0; j < m; ++j) {
    const double tau = (static_cast<double>(j) + 0.5) * table.bin_s;
    table.tau_s[j] = tau;
    table.g2[j] = 1.0 + 0.05 * std::exp(-tau / 1e-4) *
                            std::cos(k_two_pi * 1e6 * tau);
  }

  set_kernel_backend(KernelBackend::scalar);
  const Spectrum welch_scalar = trace_npsd(trace, 2048);
  const Spectrum g2_scalar = npsd_from_g2(table, 2e5, 2.5e-7);

  if (!avx2_available()) return;
  set_kernel_backend(KernelBackend::avx2);
  const Spectrum welch_wide = trace_npsd(trace, 2048);
  const Spectrum g2_wide = npsd_from_g2(table, 2e5, 2.5e-7);

  REQUIRE(welch_wide.density_per_hz.size() ==
          welch_scalar.density_per_hz.size());
  for (std::size_t k = 0; k < welch_scalar.density_per_hz.size(); ++k)
    CHECK(std::abs(welch_wide.density_per_hz[k] -
                   welch_scalar.density_per_hz[k]) <=
          1e-9 * (welch_scalar.density_per_hz[k] + 1e-12));
  REQUIRE(g2_wide.density_per_hz.size() == g2_scalar.density_per_hz.size());
  for (std::size_t k = 0; k < g2_scalar.density_per_hz.size(); ++k)
    CHECK(std::abs(g2_wide.density_per_hz[k] - g2_scalar.density_per_hz[k]) <=
          1e-9 * (g2_scalar.density_per_hz[k] + 1e-12));
}

}  // TEST_SUITE
