#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>

#include "kernels_detail.hpp"

namespace trumpet::detail {

void weighted_cosine_sums_scalar(const double* w, std::size_t n,
                                 const double* theta0, const double* dtheta,
                                 std::size_t n_out, double* out) {
  for (std::size_t k = 0; k < n_out; ++k) {
    // Rotate (c, s) around the unit circle instead of calling cos() per
    // term; rotation preserves the radius to within one rounding per step.
    double c = std::cos(theta0[k]);
    double s = std::sin(theta0[k]);
    const double cd = std::cos(dtheta[k]);
    const double sd = std::sin(dtheta[k]);
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      acc += w[m] * c;
      const double cn = c * cd - s * sd;
      s = s * cd + c * sd;
      c = cn;
    }
    out[k] = acc;
  }
}

void windowed_relative_scalar(const double* window,
                              const std::uint32_t* counts, std::size_t n,
                              double inv_mean, double* out) {
  for (std::size_t j = 0; j < n; ++j)
    out[j] = window[j] * (static_cast<double>(counts[j]) * inv_mean - 1.0);
}

void accumulate_power_scalar(const std::complex<double>* x, std::size_t n,
                             double* acc) {
  for (std::size_t k = 0; k < n; ++k)
    acc[k] += x[k].real() * x[k].real() + x[k].imag() * x[k].imag();
}

}  // namespace trumpet::detail
