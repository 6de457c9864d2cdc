#include "trumpet/faddeeva.hpp"

#include <array>
#include <cmath>

#include "trumpet/constants.hpp"
#include "trumpet/errors.hpp"

namespace trumpet {

namespace {

// Midpoint ("pole sum") discretization of the Hilbert transform defining w:
//
//   w(z) ~= (i h / pi) * sum_n exp(-t_n^2) / (z - t_n),  t_n = (n + 1/2) h
//
// plus the analytic-continuation correction 2 exp(-z^2)/(1 + exp(-2 pi i z/h))
// required below the first row of spurious poles at Im(z) = pi/h. With
// h = 0.4 and |t_n| <= 7 the quadrature error sits at the 1e-15 level.
constexpr double k_step = 0.4;
constexpr int k_terms = 18;  // nodes at +-(n + 1/2) h for n < k_terms

const std::array<double, 2 * k_terms>& nodes() {
  static const std::array<double, 2 * k_terms> t = [] {
    std::array<double, 2 * k_terms> a{};
    for (int n = -k_terms; n < k_terms; ++n)
      a[static_cast<std::size_t>(n + k_terms)] = (n + 0.5) * k_step;
    return a;
  }();
  return t;
}

const std::array<double, 2 * k_terms>& weights() {
  static const std::array<double, 2 * k_terms> w = [] {
    std::array<double, 2 * k_terms> a{};
    const auto& t = nodes();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::exp(-t[i] * t[i]);
    return a;
  }();
  return w;
}

}  // namespace

double dawson(double x) {
  // Rybicki's midpoint sum: F(x) = (1/sqrt(pi)) sum_{n odd} exp(-(x-nh)^2)/n,
  // accurate to ~exp(-(pi/2h)^2) with step h.
  constexpr double h = 0.25;
  const long n0 = static_cast<long>(std::floor(x / h));
  double sum = 0.0;
  for (long n = n0 - 40; n <= n0 + 40; ++n) {
    if (n % 2 == 0) continue;
    const double d = x - static_cast<double>(n) * h;
    sum += std::exp(-d * d) / static_cast<double>(n);
  }
  return sum / k_sqrt_pi;
}

std::complex<double> faddeeva_w(std::complex<double> z) {
  const double y = z.imag();
  if (y < 0.0)
    throw NumericalError("faddeeva_w requires Im(z) >= 0");
  if (y == 0.0) {
    const double x = z.real();
    return {std::exp(-x * x), 2.0 * dawson(x) / k_sqrt_pi};
  }

  const auto& t = nodes();
  const auto& wt = weights();
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) sum += wt[i] / (z - t[i]);
  std::complex<double> w = std::complex<double>(0.0, k_step / k_pi) * sum;

  if (y < k_pi / k_step) {
    const std::complex<double> i2pi_over_h(0.0, k_two_pi / k_step);
    w += 2.0 * std::exp(-z * z) / (1.0 + std::exp(-i2pi_over_h * z));
  }
  return w;
}

std::complex<double> faddeeva_w_derivative(std::complex<double> z) {
  return -2.0 * z * faddeeva_w(z) +
         std::complex<double>(0.0, 2.0 / k_sqrt_pi);
}

}  // namespace trumpet
