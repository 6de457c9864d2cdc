#pragma once

// Photon detection records and their serialization. The canonical on-disk
// form is PTAG: little-endian binary with header {magic "PTAG", version u32,
// channel count u32, duration in ps u64, config digest u64} followed by
// 9-byte records (timestamp u64 picoseconds, channel u8). Timestamps are
// held in seconds in memory; writing quantizes to picoseconds and keeps
// per-channel timestamps strictly increasing by bumping exact ties.

#include <cstdint>
#include <string>
#include <vector>

namespace trumpet {

struct PhotonTag {
  double t_s = 0.0;
  std::uint8_t channel = 0;
};

struct PhotonTags {
  std::vector<PhotonTag> events;  // sorted by time (ties by channel)
  double duration_s = 0.0;
  int channel_count = 1;
  std::uint64_t config_digest = 0;

  void validate() const;
};

// Counts per fixed-width bin starting at t = 0; an event at exactly the
// duration boundary lands in the last bin, so no event is ever lost.
struct TimeTrace {
  double bin_width_s = 0.0;
  std::vector<std::uint32_t> counts;
};

// Bin all events (channel < 0) or one channel's events.
TimeTrace bin_tags(const PhotonTags& tags, double bin_width_s,
                   int channel = -1);

void write_ptag(const std::string& path, const PhotonTags& tags);
PhotonTags read_ptag(const std::string& path);

// Plain-text exports: tags as "timestamp_s,channel" rows, traces as
// "bin_start_s,counts" rows, each with a header line.
void write_tags_csv(const std::string& path, const PhotonTags& tags);
void write_trace_csv(const std::string& path, const TimeTrace& trace);

// FNV-1a 64-bit digest; used to stamp outputs with their configuration.
std::uint64_t fnv1a_digest(const std::string& text);

}  // namespace trumpet
