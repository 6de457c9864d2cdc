#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

namespace trumpet {

// Backend for the batch kernels below. `automatic` picks the widest
// instruction set the running CPU supports; the two named backends force a
// specific implementation (used by the equivalence tests).
enum class KernelBackend { automatic, scalar, avx2 };

// Selects the backend used by every kernel entry point and returns the one
// now in effect (never `automatic`). Requesting avx2 on a CPU without AVX2
// and FMA support raises ValidationError.
KernelBackend set_kernel_backend(KernelBackend backend);

// The backend currently in effect.
KernelBackend active_kernel_backend();

// out[k] = sum_{m=0}^{n-1} w[m] * cos(theta0[k] + m * dtheta[k]).
//
// Evaluated with a unit-circle rotation recurrence seeded from libm, so the
// per-term phase error grows only linearly with m (~1e-12 absolute at
// m = 1e4); intended for series up to ~1e5 terms.
void weighted_cosine_sums(const double* w, std::size_t n,
                          const double* theta0, const double* dtheta,
                          std::size_t n_out, double* out);

// out[j] = window[j] * (counts[j] * inv_mean - 1.0).
//
// Counts must be below 2^31 (they are photon counts per time bin); the wide
// backend converts through signed 32-bit lanes.
void windowed_relative(const double* window, const std::uint32_t* counts,
                       std::size_t n, double inv_mean, double* out);

// acc[k] += re(x[k])^2 + im(x[k])^2 for k in [0, n).
void accumulate_power(const std::complex<double>* x, std::size_t n,
                      double* acc);

}  // namespace trumpet
