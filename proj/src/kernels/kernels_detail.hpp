#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

namespace trumpet::detail {

void weighted_cosine_sums_scalar(const double* w, std::size_t n,
                                 const double* theta0, const double* dtheta,
                                 std::size_t n_out, double* out);
void windowed_relative_scalar(const double* window,
                              const std::uint32_t* counts, std::size_t n,
                              double inv_mean, double* out);
void accumulate_power_scalar(const std::complex<double>* x, std::size_t n,
                             double* acc);

void weighted_cosine_sums_avx2(const double* w, std::size_t n,
                               const double* theta0, const double* dtheta,
                               std::size_t n_out, double* out);
void windowed_relative_avx2(const double* window, const std::uint32_t* counts,
                            std::size_t n, double inv_mean, double* out);
void accumulate_power_avx2(const std::complex<double>* x, std::size_t n,
                           double* acc);

}  // namespace trumpet::detail
