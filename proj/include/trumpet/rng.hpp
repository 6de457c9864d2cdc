#pragma once

// Counter-based random number generation (Philox4x64-10).
//
// Every stochastic process in the simulator draws from its own named
// substream keyed by (seed, stream_id). A draw is addressed purely by its
// index within the substream, so enabling or disabling one process never
// shifts the numbers any other process sees, and a run is reproducible
// from (config, seed) alone.
//
// The generator matches numpy.random.Philox bit-for-bit (verified vectors
// are frozen in the test suite), which keeps the stream cross-checkable
// from Python.

#include <array>
#include <cstdint>
#include <span>

namespace trumpet {

// Named substream ids under one seed; mode trajectories add their mode
// index to k_stream_mechanics.
enum : std::uint64_t {
  k_stream_mechanics = 1,  // + mode index, up to 256 modes
  k_stream_blinking = 257,
  k_stream_thinning = 258,
  k_stream_routing = 259,
  k_stream_jitter = 260,
};

// One 4x64 Philox block: 10 rounds over `ctr` with the given 2x64 key.
std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& ctr,
                                        const std::array<std::uint64_t, 2>& key);

// A stateless-by-construction stream of random numbers. Instances cache the
// most recent block for sequential access patterns; the cache is invisible
// to results. Not safe for concurrent use of one instance.
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_{seed, stream_id} {}

  // index-th 64-bit word of this substream.
  std::uint64_t raw(std::uint64_t index) const;

  // Uniform double on (0,1] with 53 significant bits. Never returns 0, so
  // log(u01(...)) is always finite.
  double u01(std::uint64_t index) const;

  // Standard-normal pair via Box-Muller; consumes words 2i and 2i+1.
  void gauss_pair(std::uint64_t pair_index, double& z0, double& z1) const;

  // Fills `out` (even length) with standard normals, consuming word indices
  // [2*first_pair_index, 2*first_pair_index + out.size()).
  void fill_gauss(std::uint64_t first_pair_index, std::span<double> out) const;

  // Exponential waiting time with the given rate [1/s].
  double exponential(std::uint64_t index, double rate_per_s) const;

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream_id() const { return key_[1]; }

 private:
  std::array<std::uint64_t, 2> key_;
  mutable std::array<std::uint64_t, 4> block_{};
  mutable std::uint64_t block_index_ = 0;
  mutable bool block_valid_ = false;
};

}  // namespace trumpet
