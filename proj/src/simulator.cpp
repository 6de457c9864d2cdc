#include "trumpet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trumpet/constants.hpp"
#include "trumpet/errors.hpp"
#include "trumpet/oscillator.hpp"

namespace trumpet {

void BlinkingModel::validate() const {
  require_valid(on_fraction > 0.0 && on_fraction <= 1.0,
                "blinking: on_fraction must lie in (0, 1]");
  require_valid(correlation_time_s > 0.0,
                "blinking: correlation_time_s must be > 0");
}

void DetectorModel::validate() const {
  require_valid(jitter_sigma_s >= 0.0, "detector: jitter_sigma_s must be >= 0");
  require_valid(dead_time_s >= 0.0, "detector: dead_time_s must be >= 0");
  require_valid(channels == 1 || channels == 2,
                "detector: channels must be 1 or 2");
}

void SimConfig::validate() const {
  emitter.validate();
  drive.validate();
  blinking.validate();
  detector.validate();
  require_valid(efficiency > 0.0 && efficiency <= 1.0,
                "sim: efficiency must lie in (0, 1]");
  require_valid(temperature_k >= 0.0, "sim: temperature_k must be >= 0");
  require_valid(duration_s > 0.0, "sim: duration_s must be > 0");
  require_valid(dt_s > 0.0, "sim: dt_s must be > 0");
  require_valid(modes.size() <= 256, "sim: at most 256 modes");
  double f_max_hz = 0.0;
  double omega_min = std::numeric_limits<double>::infinity();
  for (const ModeChannel& mc : modes) {
    mc.mode.validate();
    require_valid(mc.lambda_per_s >= 0.0, "sim: lambda_per_s must be >= 0");
    f_max_hz = std::max(f_max_hz, angular_to_cycles(mc.mode.omega_m_per_s));
    omega_min = std::min(omega_min, mc.mode.omega_m_per_s);
  }
  if (!modes.empty()) {
    require_valid(dt_s <= 0.05 / f_max_hz,
                  "sim: dt_s too coarse for the fastest mode (dt <= 0.05/f)");
    require_valid(duration_s >= 100.0 * k_two_pi / omega_min,
                  "sim: duration_s must cover 100 periods of the slowest mode");
  }
}

std::vector<double> detuning_trace(
    const std::vector<std::vector<double>>& trajectories,
    const std::vector<ModeChannel>& channels) {
  require_valid(trajectories.size() == channels.size(),
                "detuning_trace: one trajectory per mode channel");
  std::vector<double> shift;
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    channels[k].mode.validate();
    require_valid(channels[k].lambda_per_s >= 0.0,
                  "detuning_trace: lambda_per_s must be >= 0");
    if (shift.empty()) shift.assign(trajectories[k].size(), 0.0);
    require_valid(trajectories[k].size() == shift.size(),
                  "detuning_trace: trajectories must share one time grid");
    const double gain =
        channels[k].lambda_per_s / zero_point_m(channels[k].mode);
    for (std::size_t i = 0; i < shift.size(); ++i)
      shift[i] += gain * trajectories[k][i];
  }
  return shift;
}

namespace {

// Two-state Markov emission gate. Query times must not decrease.
class Telegraph {
 public:
  Telegraph(const BlinkingModel& model, std::uint64_t seed)
      : stream_(seed, k_stream_blinking) {
    if (model.on_fraction >= 1.0) return;  // never blinks
    to_on_per_s_ = model.on_fraction / model.correlation_time_s;
    to_off_per_s_ = (1.0 - model.on_fraction) / model.correlation_time_s;
    on_ = stream_.u01(0) <= model.on_fraction;  // stationary start
    segment_end_s_ =
        stream_.exponential(1, on_ ? to_off_per_s_ : to_on_per_s_);
    next_index_ = 2;
  }

  bool at(double t_s) {
    while (t_s >= segment_end_s_) {
      on_ = !on_;
      segment_end_s_ += stream_.exponential(
          next_index_++, on_ ? to_off_per_s_ : to_on_per_s_);
    }
    return on_;
  }

 private:
  PhiloxStream stream_;
  double to_on_per_s_ = 0.0;
  double to_off_per_s_ = 0.0;
  bool on_ = true;
  double segment_end_s_ = std::numeric_limits<double>::infinity();
  std::uint64_t next_index_ = 0;
};

// Thinning: candidates arrive as a homogeneous Poisson process at the hard
// bound eff * gamma_sp / 2 >= eff * rate(anything); each survives with
// probability rate(t) / (gamma_sp/2) when the emitter is on. Candidate j
// consumes stream words 2j (gap) and 2j+1 (acceptance).
template <typename ShiftAt>
PhotonTags thin_photons(ShiftAt&& shift_at, std::size_t n_samples,
                        double dt_s, const Emitter& emitter,
                        const Drive& drive, double efficiency,
                        const BlinkingModel& blinking, std::uint64_t seed) {
  emitter.validate();
  drive.validate();
  blinking.validate();
  require_valid(efficiency > 0.0 && efficiency <= 1.0,
                "efficiency must lie in (0, 1]");
  require_valid(n_samples >= 1, "detuning trace must be non-empty");
  require_valid(dt_s > 0.0, "dt_s must be > 0");

  PhotonTags out;
  out.channel_count = 1;
  out.duration_s = static_cast<double>(n_samples - 1) * dt_s;

  const double half_max = emitter.max_rate_per_s();
  const double bound_per_s = efficiency * half_max;
  if (bound_per_s <= 0.0 || out.duration_s <= 0.0) return out;

  // rate(delta) = amp / (delta^2 + hw^2), always below half_max.
  const double gamma = emitter.coherence_decay_per_s();
  const double hw =
      power_broadened_halfwidth(emitter, drive.omega_r_per_s);
  const double hw2 = hw * hw;
  const double amp = 0.5 * emitter.gamma_sp_per_s *
                     (gamma / emitter.gamma_sp_per_s) *
                     drive.omega_r_per_s * drive.omega_r_per_s;

  PhiloxStream stream(seed, k_stream_thinning);
  Telegraph gate(blinking, seed);
  const std::size_t last_sample = n_samples - 1;

  std::uint64_t j = 0;
  double t = stream.exponential(0, bound_per_s);
  while (t <= out.duration_s) {
    if (gate.at(t)) {
      std::size_t idx = static_cast<std::size_t>(std::llround(t / dt_s));
      if (idx > last_sample) idx = last_sample;
      const double delta = drive.delta_per_s + shift_at(idx);
      const double rate = amp / (delta * delta + hw2);
      if (stream.u01(2 * j + 1) * half_max <= rate)
        out.events.push_back({t, 0});
    }
    ++j;
    t += stream.exponential(2 * j, bound_per_s);
  }
  return out;
}

// Streams the summed detuning trace in fixed windows so long fast-mode
// records never materialize in memory. Sample indices must not decrease.
class ChunkedDetuning {
 public:
  ChunkedDetuning(const SimConfig& cfg, std::size_t n_samples)
      : n_samples_(n_samples) {
    for (std::size_t k = 0; k < cfg.modes.size(); ++k) {
      const ModeChannel& mc = cfg.modes[k];
      steppers_.push_back(make_oscillator_stepper(
          mc.mode, cfg.temperature_k, cfg.dt_s));
      streams_.emplace_back(cfg.seed, k_stream_mechanics + k);
      gains_.push_back(mc.lambda_per_s / zero_point_m(mc.mode));
      double z0 = 0.0, z1 = 0.0;
      streams_.back().gauss_pair(0, z0, z1);
      positions_.push_back(steppers_.back().sigma_u * z0);
      velocities_.push_back(steppers_.back().sigma_v * z1);
    }
    buffer_.reserve(k_window);
    refill();
  }

  double operator()(std::size_t idx) {
    while (idx >= window_start_ + buffer_.size()) refill();
    return buffer_[idx - window_start_];
  }

 private:
  static constexpr std::size_t k_window = 65536;

  void refill() {
    window_start_ = next_sample_;
    buffer_.clear();
    const std::size_t stop = std::min(n_samples_, window_start_ + k_window);
    for (std::size_t s = window_start_; s < stop; ++s) {
      double shift = 0.0;
      for (std::size_t k = 0; k < steppers_.size(); ++k) {
        if (s > 0) {
          double z0 = 0.0, z1 = 0.0;
          streams_[k].gauss_pair(s, z0, z1);
          steppers_[k].step(positions_[k], velocities_[k], z0, z1);
        }
        shift += gains_[k] * positions_[k];
      }
      buffer_.push_back(shift);
    }
    next_sample_ = stop;
  }

  std::size_t n_samples_;
  std::vector<OscillatorStepper> steppers_;
  std::vector<PhiloxStream> streams_;
  std::vector<double> gains_;
  std::vector<double> positions_;
  std::vector<double> velocities_;
  std::vector<double> buffer_;
  std::size_t window_start_ = 0;
  std::size_t next_sample_ = 0;
};

}  // namespace

PhotonTags generate_photons(const std::vector<double>& detuning_per_s,
                            double dt_s, const Emitter& emitter,
                            const Drive& drive, double efficiency,
                            const BlinkingModel& blinking,
                            std::uint64_t seed) {
  return thin_photons(
      [&detuning_per_s](std::size_t idx) { return detuning_per_s[idx]; },
      detuning_per_s.size(), dt_s, emitter, drive, efficiency, blinking,
      seed);
}

PhotonTags apply_detector(const PhotonTags& tags, const DetectorModel& det,
                          std::uint64_t seed) {
  tags.validate();
  det.validate();

  std::vector<PhotonTag> events;
  events.reserve(tags.events.size());
  if (det.jitter_sigma_s > 0.0) {
    PhiloxStream stream(seed, k_stream_jitter);
    for (std::size_t j = 0; j < tags.events.size(); ++j) {
      double z0 = 0.0, z1 = 0.0;
      stream.gauss_pair(j, z0, z1);
      const double t = tags.events[j].t_s + det.jitter_sigma_s * z0;
      if (t < 0.0 || t > tags.duration_s) continue;  // jittered off-record
      events.push_back({t, tags.events[j].channel});
    }
    std::sort(events.begin(), events.end(),
              [](const PhotonTag& a, const PhotonTag& b) {
                return a.t_s != b.t_s ? a.t_s < b.t_s
                                      : a.channel < b.channel;
              });
  } else {
    events = tags.events;
  }

  PhotonTags out;
  out.duration_s = tags.duration_s;
  out.channel_count = tags.channel_count;
  out.config_digest = tags.config_digest;
  double last[2] = {-std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity()};
  for (const PhotonTag& e : events) {
    if (e.t_s <= last[e.channel]) continue;  // exact tie: keep the first
    if (e.t_s - last[e.channel] < det.dead_time_s) continue;
    last[e.channel] = e.t_s;
    out.events.push_back(e);
  }
  return out;
}

PhotonTags hbt_split(const PhotonTags& tags, std::uint64_t seed) {
  tags.validate();
  require_valid(tags.channel_count == 1,
                "hbt_split expects a single-channel record");
  PhotonTags out = tags;
  out.channel_count = 2;
  PhiloxStream stream(seed, k_stream_routing);
  for (std::size_t j = 0; j < out.events.size(); ++j)
    out.events[j].channel = stream.u01(j) <= 0.5 ? 0 : 1;
  return out;
}

PhotonTags run_simulation(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t n_samples =
      static_cast<std::size_t>(std::floor(cfg.duration_s / cfg.dt_s)) + 1;
  ChunkedDetuning source(cfg, n_samples);
  PhotonTags tags = thin_photons(
      [&source](std::size_t idx) { return source(idx); }, n_samples,
      cfg.dt_s, cfg.emitter, cfg.drive, cfg.efficiency, cfg.blinking,
      cfg.seed);
  tags.config_digest = cfg.config_digest;
  if (cfg.detector.channels == 2) tags = hbt_split(tags, cfg.seed);
  return apply_detector(tags, cfg.detector, cfg.seed);
}

}  // namespace trumpet
