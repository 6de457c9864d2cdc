#pragma once

// Radix-2 complex FFT with a reusable plan (bit-reversal permutation and
// twiddle table precomputed once, so repeated transforms of the same length
// pay no trigonometry).

#include <complex>
#include <cstddef>
#include <vector>

namespace trumpet {

class FftPlan {
 public:
  // n must be a power of two >= 2.
  explicit FftPlan(std::size_t n);

  std::size_t size() const { return n_; }

  // In-place forward DFT: X_k = sum_j x_j exp(-2 pi i j k / n).
  void forward(std::vector<std::complex<double>>& x) const;

 private:
  std::size_t n_;
  std::vector<std::size_t> reversed_;
  std::vector<std::complex<double>> twiddle_;  // exp(-2 pi i k / n), k < n/2
};

// Half-spectrum of a real signal: bins 0 .. n/2 inclusive.
std::vector<std::complex<double>> rfft(const std::vector<double>& x);

}  // namespace trumpet
