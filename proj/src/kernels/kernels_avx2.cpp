#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <immintrin.h>

#include "kernels_detail.hpp"

// Compiled with -mavx2 -mfma; only reached through the runtime dispatch in
// kernels.cpp once CPU support has been confirmed.

namespace trumpet::detail {

void weighted_cosine_sums_avx2(const double* w, std::size_t n,
                               const double* theta0, const double* dtheta,
                               std::size_t n_out, double* out) {
  std::size_t k = 0;
  for (; k + 4 <= n_out; k += 4) {
    // Four independent rotation recurrences, one frequency per lane.
    __m256d c = _mm256_set_pd(std::cos(theta0[k + 3]), std::cos(theta0[k + 2]),
                              std::cos(theta0[k + 1]), std::cos(theta0[k]));
    __m256d s = _mm256_set_pd(std::sin(theta0[k + 3]), std::sin(theta0[k + 2]),
                              std::sin(theta0[k + 1]), std::sin(theta0[k]));
    const __m256d cd =
        _mm256_set_pd(std::cos(dtheta[k + 3]), std::cos(dtheta[k + 2]),
                      std::cos(dtheta[k + 1]), std::cos(dtheta[k]));
    const __m256d sd =
        _mm256_set_pd(std::sin(dtheta[k + 3]), std::sin(dtheta[k + 2]),
                      std::sin(dtheta[k + 1]), std::sin(dtheta[k]));
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t m = 0; m < n; ++m) {
      const __m256d wm = _mm256_set1_pd(w[m]);
      acc = _mm256_fmadd_pd(wm, c, acc);
      const __m256d cn = _mm256_fmsub_pd(c, cd, _mm256_mul_pd(s, sd));
      s = _mm256_fmadd_pd(s, cd, _mm256_mul_pd(c, sd));
      c = cn;
    }
    _mm256_storeu_pd(out + k, acc);
  }
  if (k < n_out)
    weighted_cosine_sums_scalar(w, n, theta0 + k, dtheta + k, n_out - k,
                                out + k);
}

void windowed_relative_avx2(const double* window, const std::uint32_t* counts,
                            std::size_t n, double inv_mean, double* out) {
  const __m256d inv = _mm256_set1_pd(inv_mean);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    // Counts are < 2^31, so the signed 32-bit conversion is exact.
    const __m128i raw =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(counts + j));
    const __m256d cv = _mm256_cvtepi32_pd(raw);
    const __m256d rel = _mm256_fmsub_pd(cv, inv, one);
    _mm256_storeu_pd(out + j, _mm256_mul_pd(_mm256_loadu_pd(window + j), rel));
  }
  if (j < n)
    windowed_relative_scalar(window + j, counts + j, n - j, inv_mean, out + j);
}

void accumulate_power_avx2(const std::complex<double>* x, std::size_t n,
                           double* acc) {
  const double* xd = reinterpret_cast<const double*>(x);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d v0 = _mm256_loadu_pd(xd + 2 * k);      // re0 im0 re1 im1
    const __m256d v1 = _mm256_loadu_pd(xd + 2 * k + 4);  // re2 im2 re3 im3
    const __m256d h =
        _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
    // hadd interleaves lanes: h = |x0|^2 |x2|^2 |x1|^2 |x3|^2.
    const __m256d p = _mm256_permute4x64_pd(h, 0xD8);
    _mm256_storeu_pd(acc + k, _mm256_add_pd(_mm256_loadu_pd(acc + k), p));
  }
  if (k < n) accumulate_power_scalar(x + k, n - k, acc + k);
}

}  // namespace trumpet::detail
