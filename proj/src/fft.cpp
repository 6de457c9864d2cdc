#include "trumpet/fft.hpp"

#include <utility>

#include "trumpet/constants.hpp"
#include "trumpet/errors.hpp"

namespace trumpet {

FftPlan::FftPlan(std::size_t n) : n_(n) {
  require_valid(n >= 2 && (n & (n - 1)) == 0,
                "fft: length must be a power of two >= 2");
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  reversed_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    reversed_[i] = r;
  }
  twiddle_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k)
    twiddle_[k] = std::polar(1.0, -k_two_pi * static_cast<double>(k) /
                                      static_cast<double>(n));
}

void FftPlan::forward(std::vector<std::complex<double>>& x) const {
  require_valid(x.size() == n_, "fft: input length does not match the plan");
  for (std::size_t i = 0; i < n_; ++i)
    if (i < reversed_[i]) std::swap(x[i], x[reversed_[i]]);
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const std::complex<double> v = x[start + j + half] * twiddle_[j * stride];
        const std::complex<double> u = x[start + j];
        x[start + j] = u + v;
        x[start + j + half] = u - v;
      }
    }
  }
}

std::vector<std::complex<double>> rfft(const std::vector<double>& x) {
  FftPlan plan(x.size());
  std::vector<std::complex<double>> buf(x.begin(), x.end());
  plan.forward(buf);
  buf.resize(x.size() / 2 + 1);
  return buf;
}

}  // namespace trumpet
