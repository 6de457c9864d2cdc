#pragma once

// Monte-Carlo photon records: thermal mode trajectories are transduced into
// emitter detunings, photons are drawn by thinning an inhomogeneous Poisson
// process, and the detection chain (beam splitting, timing jitter, dead
// time) is applied event by event.
//
// Emission is Poissonian at the instantaneous rate: sub-nanosecond
// antibunching structure is deliberately not realized event-by-event (it
// would force picosecond stepping over second-long records); fits use the
// closed-form correlation model instead. Valid for analysis frequencies
// well below the spontaneous emission rate -- the regime of every recipe.
//
// Every stochastic ingredient draws from its own named substream, so e.g.
// switching blinking on or off never shifts the mechanics noise.

#include <cstdint>
#include <vector>

#include "trumpet/emitter.hpp"
#include "trumpet/mechanics.hpp"
#include "trumpet/rng.hpp"
#include "trumpet/tags.hpp"

namespace trumpet {

// Telegraph intermittence of the emission: ON with stationary probability
// on_fraction, switching with correlation time correlation_time_s (the
// inverse sum of the two switching rates).
struct BlinkingModel {
  double on_fraction = 0.1;
  double correlation_time_s = 100e-9;

  void validate() const;
};

struct DetectorModel {
  double jitter_sigma_s = 0.0;  // per-detector Gaussian timing jitter
  double dead_time_s = 0.0;     // per-channel blocking after each count
  int channels = 1;             // 2 = split to a detector pair first

  void validate() const;
};

// One transduction channel: a mechanical mode read out with coupling
// lambda (rad/s per zero-point displacement).
struct ModeChannel {
  MechMode mode;
  double lambda_per_s = 0.0;
};

struct SimConfig {
  std::vector<ModeChannel> modes;
  Emitter emitter;
  Drive drive;
  double efficiency = 1.0;
  BlinkingModel blinking;
  DetectorModel detector;
  double temperature_k = 4.0;
  double duration_s = 0.0;
  double dt_s = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;  // stamped into the output metadata

  // dt <= 0.05 / f_max (highest mode, in Hz) and duration >= 100 periods of
  // the slowest mode; both guard the sampling of the detuning trace.
  void validate() const;
};

// Emitter detuning shift from mode trajectories on a shared time grid:
// sum_k lambda_k u_k(t) / u_zpf_k.
std::vector<double> detuning_trace(
    const std::vector<std::vector<double>>& trajectories,
    const std::vector<ModeChannel>& channels);

// Photon record from a sampled detuning trace (single channel, ideal
// detector). The rate eff * b(t) * rate(delta + shift(t)) is realized by
// thinning a homogeneous Poisson process at the bound eff * gamma_sp / 2;
// the detuning is held at the nearest grid sample between samples.
PhotonTags generate_photons(const std::vector<double>& detuning_per_s,
                            double dt_s, const Emitter& emitter,
                            const Drive& drive, double efficiency,
                            const BlinkingModel& blinking,
                            std::uint64_t seed);

// Detection chain: Gaussian jitter on every timestamp (events jittered
// outside the record are dropped), re-sort, then per-channel dead time.
PhotonTags apply_detector(const PhotonTags& tags, const DetectorModel& det,
                          std::uint64_t seed);

// Route each event to one of two channels with probability 1/2.
PhotonTags hbt_split(const PhotonTags& tags, std::uint64_t seed);

// Full pipeline: trajectories -> detuning -> photons -> (split) -> detector.
// Mode trajectories are streamed in chunks, so long fast-mode records never
// materialize in memory.
PhotonTags run_simulation(const SimConfig& cfg);

}  // namespace trumpet
