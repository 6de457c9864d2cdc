#include "trumpet/tags.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "trumpet/errors.hpp"

namespace trumpet {

namespace {

constexpr char k_magic[4] = {'P', 'T', 'A', 'G'};
constexpr std::uint32_t k_version = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

}  // namespace

void PhotonTags::validate() const {
  require_valid(duration_s >= 0.0, "tags: duration_s must be >= 0");
  require_valid(channel_count == 1 || channel_count == 2,
                "tags: channel_count must be 1 or 2");
  std::vector<double> last(static_cast<std::size_t>(channel_count),
                           -1.0);
  double previous = 0.0;
  for (const PhotonTag& e : events) {
    require_valid(e.channel < channel_count,
                  "tags: channel index out of range");
    require_valid(e.t_s >= 0.0 && e.t_s <= duration_s,
                  "tags: timestamp outside [0, duration]");
    require_valid(e.t_s >= previous, "tags: events must be time-sorted");
    require_valid(e.t_s > last[e.channel],
                  "tags: per-channel timestamps must strictly increase");
    last[e.channel] = e.t_s;
    previous = e.t_s;
  }
}

TimeTrace bin_tags(const PhotonTags& tags, double bin_width_s, int channel) {
  require_valid(bin_width_s > 0.0, "bin_width_s must be > 0");
  TimeTrace trace;
  trace.bin_width_s = bin_width_s;
  const std::size_t n_bins = static_cast<std::size_t>(
      std::max(1.0, std::ceil(tags.duration_s / bin_width_s)));
  trace.counts.assign(n_bins, 0);
  for (const PhotonTag& e : tags.events) {
    if (channel >= 0 && e.channel != channel) continue;
    std::size_t bin = static_cast<std::size_t>(e.t_s / bin_width_s);
    if (bin >= n_bins) bin = n_bins - 1;  // boundary event, last bin
    ++trace.counts[bin];
  }
  return trace;
}

void write_ptag(const std::string& path, const PhotonTags& tags) {
  tags.validate();
  std::string blob;
  blob.reserve(28 + 9 * tags.events.size());
  // Quantize to picoseconds; keep per-channel strict monotonicity by
  // bumping ties forward, then restore the global time order. A tie bumped
  // past the end stretches the stored duration by the same picoseconds.
  std::vector<std::pair<std::uint64_t, std::uint8_t>> records;
  records.reserve(tags.events.size());
  std::uint64_t duration_ps =
      static_cast<std::uint64_t>(std::llround(tags.duration_s * 1e12));
  std::uint64_t last[2] = {0, 0};
  bool seen[2] = {false, false};
  for (const PhotonTag& e : tags.events) {
    std::uint64_t ps =
        static_cast<std::uint64_t>(std::llround(e.t_s * 1e12));
    if (seen[e.channel] && ps <= last[e.channel]) ps = last[e.channel] + 1;
    last[e.channel] = ps;
    seen[e.channel] = true;
    duration_ps = std::max(duration_ps, ps);
    records.emplace_back(ps, e.channel);
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  blob.append(k_magic, 4);
  put_u32(blob, k_version);
  put_u32(blob, static_cast<std::uint32_t>(tags.channel_count));
  put_u64(blob, duration_ps);
  put_u64(blob, tags.config_digest);
  for (const auto& [ps, ch] : records) {
    put_u64(blob, ps);
    blob.push_back(static_cast<char>(ch));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require_valid(out.good(), "cannot open for writing: " + path);
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  require_valid(out.good(), "write failed: " + path);
}

PhotonTags read_ptag(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require_valid(in.good(), "cannot open: " + path);
  std::string blob((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  require_valid(blob.size() >= 28, "PTAG file truncated: " + path);
  require_valid(std::memcmp(blob.data(), k_magic, 4) == 0,
                "not a PTAG file: " + path);
  require_valid(get_u32(blob.data() + 4) == k_version,
                "unsupported PTAG version in " + path);

  PhotonTags tags;
  tags.channel_count = static_cast<int>(get_u32(blob.data() + 8));
  tags.duration_s = static_cast<double>(get_u64(blob.data() + 12)) * 1e-12;
  tags.config_digest = get_u64(blob.data() + 20);

  const std::size_t payload = blob.size() - 28;
  require_valid(payload % 9 == 0, "PTAG record stream corrupt: " + path);
  const std::size_t n = payload / 9;
  tags.events.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const char* rec = blob.data() + 28 + 9 * i;
    tags.events[i].t_s = static_cast<double>(get_u64(rec)) * 1e-12;
    tags.events[i].channel = static_cast<std::uint8_t>(rec[8]);
  }
  tags.validate();
  return tags;
}

void write_tags_csv(const std::string& path, const PhotonTags& tags) {
  std::ofstream out(path, std::ios::trunc);
  require_valid(out.good(), "cannot open for writing: " + path);
  out << "timestamp_s,channel\n";
  out.precision(15);
  for (const PhotonTag& e : tags.events)
    out << e.t_s << ',' << static_cast<int>(e.channel) << '\n';
  require_valid(out.good(), "write failed: " + path);
}

void write_trace_csv(const std::string& path, const TimeTrace& trace) {
  std::ofstream out(path, std::ios::trunc);
  require_valid(out.good(), "cannot open for writing: " + path);
  out << "bin_start_s,counts\n";
  out.precision(15);
  for (std::size_t i = 0; i < trace.counts.size(); ++i)
    out << static_cast<double>(i) * trace.bin_width_s << ','
        << trace.counts[i] << '\n';
  require_valid(out.good(), "write failed: " + path);
}

std::uint64_t fnv1a_digest(const std::string& text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace trumpet
