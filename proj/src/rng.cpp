#include "trumpet/rng.hpp"

#include <cmath>

#include "trumpet/constants.hpp"

namespace trumpet {

namespace {

// Philox4x64 round constants (Random123 originals).
constexpr std::uint64_t k_mult0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t k_mult1 = 0xCA5A826395121157ull;
constexpr std::uint64_t k_weyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t k_weyl1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(
    const std::array<std::uint64_t, 4>& ctr,
    const std::array<std::uint64_t, 2>& key) {
  std::array<std::uint64_t, 4> c = ctr;
  std::uint64_t k0 = key[0];
  std::uint64_t k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k0 += k_weyl0;
      k1 += k_weyl1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(k_mult0, c[0], hi0, lo0);
    mulhilo(k_mult1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
  }
  return c;
}

std::uint64_t PhiloxStream::raw(std::uint64_t index) const {
  const std::uint64_t block = index >> 2;
  if (!block_valid_ || block != block_index_) {
    block_ = philox4x64({block, 0, 0, 0}, key_);
    block_index_ = block;
    block_valid_ = true;
  }
  return block_[index & 3];
}

double PhiloxStream::u01(std::uint64_t index) const {
  // Top 53 bits, mapped to (0,1]: the +1 excludes exactly 0.
  return static_cast<double>((raw(index) >> 11) + 1) * 0x1.0p-53;
}

void PhiloxStream::gauss_pair(std::uint64_t pair_index, double& z0,
                              double& z1) const {
  const double u1 = u01(2 * pair_index);
  const double u2 = u01(2 * pair_index + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  z0 = r * std::cos(k_two_pi * u2);
  z1 = r * std::sin(k_two_pi * u2);
}

void PhiloxStream::fill_gauss(std::uint64_t first_pair_index,
                              std::span<double> out) const {
  for (std::size_t i = 0; i + 1 < out.size(); i += 2) {
    gauss_pair(first_pair_index + i / 2, out[i], out[i + 1]);
  }
}

double PhiloxStream::exponential(std::uint64_t index, double rate_per_s) const {
  return -std::log(u01(index)) / rate_per_s;
}

}  // namespace trumpet
