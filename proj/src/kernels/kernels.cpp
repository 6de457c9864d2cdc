#include <complex>
#include <cstddef>
#include <cstdint>

#include "kernels_detail.hpp"
#include "trumpet/errors.hpp"
#include "trumpet/kernels.hpp"

namespace trumpet {

namespace {

struct KernelOps {
  void (*cosine_sums)(const double*, std::size_t, const double*, const double*,
                      std::size_t, double*);
  void (*relative)(const double*, const std::uint32_t*, std::size_t, double,
                   double*);
  void (*power)(const std::complex<double>*, std::size_t, double*);
  KernelBackend backend;
};

bool cpu_has_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

KernelOps make_ops(KernelBackend backend) {
  if (backend == KernelBackend::automatic)
    backend = cpu_has_avx2() ? KernelBackend::avx2 : KernelBackend::scalar;
  if (backend == KernelBackend::avx2) {
    require_valid(cpu_has_avx2(),
                  "kernels: avx2 backend requested on a CPU without AVX2+FMA");
    return {detail::weighted_cosine_sums_avx2, detail::windowed_relative_avx2,
            detail::accumulate_power_avx2, KernelBackend::avx2};
  }
  return {detail::weighted_cosine_sums_scalar, detail::windowed_relative_scalar,
          detail::accumulate_power_scalar, KernelBackend::scalar};
}

KernelOps& ops() {
  static KernelOps current = make_ops(KernelBackend::automatic);
  return current;
}

}  // namespace

KernelBackend set_kernel_backend(KernelBackend backend) {
  ops() = make_ops(backend);
  return ops().backend;
}

KernelBackend active_kernel_backend() { return ops().backend; }

void weighted_cosine_sums(const double* w, std::size_t n, const double* theta0,
                          const double* dtheta, std::size_t n_out,
                          double* out) {
  require_valid(n == 0 || w != nullptr, "kernels: null weights");
  require_valid(n_out == 0 || (theta0 != nullptr && dtheta != nullptr &&
                               out != nullptr),
                "kernels: null phase or output arrays");
  if (n == 0) {
    for (std::size_t k = 0; k < n_out; ++k) out[k] = 0.0;
    return;
  }
  ops().cosine_sums(w, n, theta0, dtheta, n_out, out);
}

void windowed_relative(const double* window, const std::uint32_t* counts,
                       std::size_t n, double inv_mean, double* out) {
  require_valid(n == 0 || (window != nullptr && counts != nullptr &&
                           out != nullptr),
                "kernels: null arrays");
  ops().relative(window, counts, n, inv_mean, out);
}

void accumulate_power(const std::complex<double>* x, std::size_t n,
                      double* acc) {
  require_valid(n == 0 || (x != nullptr && acc != nullptr),
                "kernels: null arrays");
  ops().power(x, n, acc);
}

}  // namespace trumpet
