#include "trumpet/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "trumpet/errors.hpp"

namespace trumpet {

void Provenance::add(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
}

void Provenance::add(const std::string& key, const char* value) {
  entries.emplace_back(key, std::string(value));
}

void Provenance::add(const std::string& key, double value) {
  entries.emplace_back(key, format_exact(value));
}

void Provenance::add(const std::string& key, std::uint64_t value) {
  entries.emplace_back(key, std::to_string(value));
}

const std::string* Provenance::find(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

std::string format_exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, v);
  require_valid(res.ec == std::errc() && res.ptr == end,
                "csv: malformed number '" + text + "'");
  return v;
}

namespace {

bool needs_quoting(const std::string& cell) {
  if (!cell.empty() && (cell.front() == ' ' || cell.back() == ' '))
    return true;
  return cell.find_first_of(",\"\n") != std::string::npos;
}

void write_cell(std::ostream& out, const std::string& cell) {
  if (!needs_quoting(cell)) {
    out << cell;
    return;
  }
  out << '"';
  for (char c : cell) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void write_row(std::ostream& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out << ',';
    write_cell(out, row[i]);
  }
  out << '\n';
}

// Splits one physical line into cells. Quoted cells may not span lines;
// the data this module writes never contains embedded newlines.
std::vector<std::string> split_row(const std::string& line,
                                   const std::string& path) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"' && cell.empty()) {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  require_valid(!quoted, "csv: unterminated quote in " + path);
  cells.push_back(cell);
  return cells;
}

double prov_number(const CsvTable& table, const std::string& key,
                   const std::string& path) {
  const std::string* v = table.provenance.find(key);
  require_valid(v != nullptr, "csv: missing '" + key + "' in " + path);
  return parse_double(*v);
}

std::size_t column_index(const CsvTable& table, const std::string& name,
                         const std::string& path) {
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    if (table.columns[i] == name) return i;
  throw ValidationError("csv: missing column '" + name + "' in " + path);
}

}  // namespace

void write_csv(const std::string& path, const CsvTable& table) {
  require_valid(!table.columns.empty(), "csv: no columns");
  for (const auto& row : table.rows)
    require_valid(row.size() == table.columns.size(),
                  "csv: row width differs from the header");
  std::ofstream out(path, std::ios::trunc);
  require_valid(out.good(), "cannot open for writing: " + path);
  for (const auto& [key, value] : table.provenance.entries) {
    require_valid(key.find_first_of(":\n") == std::string::npos,
                  "csv: provenance key must not contain ':' or newline");
    require_valid(value.find('\n') == std::string::npos,
                  "csv: provenance value must not span lines");
    out << "# " << key << ": " << value << '\n';
  }
  write_row(out, table.columns);
  for (const auto& row : table.rows) write_row(out, row);
  require_valid(out.good(), "write failed: " + path);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  require_valid(in.good(), "cannot open for reading: " + path);
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::size_t start = 1;
      while (start < line.size() && line[start] == ' ') ++start;
      const std::size_t colon = line.find(':', start);
      if (colon == std::string::npos) continue;  // free-form comment
      std::string key = line.substr(start, colon - start);
      std::size_t vstart = colon + 1;
      while (vstart < line.size() && line[vstart] == ' ') ++vstart;
      table.provenance.add(key, line.substr(vstart));
      continue;
    }
    if (!have_header) {
      table.columns = split_row(line, path);
      have_header = true;
      continue;
    }
    auto row = split_row(line, path);
    require_valid(row.size() == table.columns.size(),
                  "csv: row width differs from the header in " + path);
    table.rows.push_back(std::move(row));
  }
  require_valid(have_header, "csv: no header row in " + path);
  return table;
}

void write_spectrum_csv(const std::string& path, const Spectrum& spec,
                        const Provenance& prov) {
  spec.validate();
  CsvTable table;
  table.provenance = prov;
  table.provenance.add("mean_rate_per_s", spec.mean_rate_per_s);
  table.provenance.add("rbw_hz", spec.rbw_hz);
  table.provenance.add("averages",
                       static_cast<std::uint64_t>(spec.averages));
  table.provenance.add("boxcar_s", spec.boxcar_s);
  table.provenance.add("boxcar_order",
                       static_cast<std::uint64_t>(spec.boxcar_order));
  table.columns = {"frequency_hz", "density_per_hz"};
  table.rows.reserve(spec.frequency_hz.size());
  for (std::size_t i = 0; i < spec.frequency_hz.size(); ++i)
    table.rows.push_back({format_exact(spec.frequency_hz[i]),
                          format_exact(spec.density_per_hz[i])});
  write_csv(path, table);
}

Spectrum read_spectrum_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  Spectrum spec;
  spec.mean_rate_per_s = prov_number(table, "mean_rate_per_s", path);
  spec.rbw_hz = prov_number(table, "rbw_hz", path);
  spec.averages = static_cast<int>(prov_number(table, "averages", path));
  spec.boxcar_s = prov_number(table, "boxcar_s", path);
  spec.boxcar_order =
      static_cast<int>(prov_number(table, "boxcar_order", path));
  const std::size_t fi = column_index(table, "frequency_hz", path);
  const std::size_t di = column_index(table, "density_per_hz", path);
  for (const auto& row : table.rows) {
    spec.frequency_hz.push_back(parse_double(row[fi]));
    spec.density_per_hz.push_back(parse_double(row[di]));
  }
  spec.validate();
  return spec;
}

void write_peaks_csv(const std::string& path,
                     const std::vector<PeakResult>& peaks,
                     const Provenance& prov) {
  CsvTable table;
  table.provenance = prov;
  table.columns = {"label",      "frequency_hz", "area",
                   "area_sigma", "floor_per_hz", "clipped"};
  for (const PeakResult& p : peaks)
    table.rows.push_back({p.label, format_exact(p.frequency_hz),
                          format_exact(p.area), format_exact(p.area_sigma),
                          format_exact(p.floor_per_hz),
                          p.clipped ? "1" : "0"});
  write_csv(path, table);
}

void write_correlation_csv(const std::string& path,
                           const CorrelationTable& table,
                           const Provenance& prov) {
  table.validate();
  CsvTable out;
  out.provenance = prov;
  out.provenance.add("bin_s", table.bin_s);
  out.provenance.add("duration_s", table.duration_s);
  out.provenance.add("rate0_per_s", table.rate0_per_s);
  out.provenance.add("rate1_per_s", table.rate1_per_s);
  out.provenance.add("poor_statistics", table.poor_statistics ? "1" : "0");
  out.columns = {"tau_s", "g2", "pair_counts"};
  for (std::size_t i = 0; i < table.tau_s.size(); ++i)
    out.rows.push_back({format_exact(table.tau_s[i]),
                        format_exact(table.g2[i]),
                        std::to_string(table.pair_counts[i])});
  write_csv(path, out);
}

void write_coupling_csv(const std::string& path,
                        const std::vector<DetuningArea>& points,
                        const CouplingFit& fit, const Provenance& prov) {
  CsvTable table;
  table.provenance = prov;
  table.provenance.add("fit.lambda_per_s", fit.lambda_per_s);
  table.provenance.add("fit.residual", fit.residual);
  table.provenance.add("fit.lambda_variance", fit.lambda_variance);
  table.columns = {"delta_per_s", "area", "area_sigma"};
  for (const DetuningArea& p : points)
    table.rows.push_back({format_exact(p.delta_per_s), format_exact(p.area),
                          format_exact(p.area_sigma)});
  write_csv(path, table);
}

void write_localization_csv(const std::string& path,
                            const LocalizationResult& result,
                            const Provenance& prov) {
  CsvTable table;
  table.provenance = prov;
  table.provenance.add("position.r_m", result.position.r_m);
  table.provenance.add("position.phi_rad", result.position.phi_rad);
  table.provenance.add("chi_square", result.chi_square);
  table.columns = {"label", "measured", "predicted"};
  for (std::size_t i = 0; i < result.labels.size(); ++i)
    table.rows.push_back({result.labels[i], format_exact(result.measured[i]),
                          format_exact(result.predicted[i])});
  write_csv(path, table);
}

std::vector<LabeledAmplitude> read_amplitudes_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const std::size_t li = column_index(table, "label", path);
  const std::size_t ai = column_index(table, "amplitude", path);
  bool have_sigma = true;
  std::size_t si = 0;
  try {
    si = column_index(table, "sigma", path);
  } catch (const ValidationError&) {
    have_sigma = false;
  }
  std::vector<LabeledAmplitude> out;
  for (const auto& row : table.rows) {
    LabeledAmplitude a;
    a.label = row[li];
    a.amplitude = parse_double(row[ai]);
    a.sigma = have_sigma ? parse_double(row[si]) : 0.0;
    out.push_back(a);
  }
  return out;
}

TimeTrace read_trace_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const std::size_t ti = column_index(table, "bin_start_s", path);
  const std::size_t ci = column_index(table, "counts", path);
  TimeTrace trace;
  require_valid(!table.rows.empty(), "csv: empty trace in " + path);
  for (const auto& row : table.rows) {
    const double c = parse_double(row[ci]);
    require_valid(c >= 0.0 && c == std::floor(c),
                  "csv: counts must be non-negative integers in " + path);
    trace.counts.push_back(static_cast<std::uint32_t>(c));
  }
  if (table.rows.size() >= 2)
    trace.bin_width_s = parse_double(table.rows[1][ti]) -
                        parse_double(table.rows[0][ti]);
  else if (const std::string* b = table.provenance.find("bin_width_s"))
    trace.bin_width_s = parse_double(*b);
  require_valid(trace.bin_width_s > 0.0,
                "csv: cannot infer a positive bin width from " + path);
  return trace;
}

PhotonTags read_tags_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const std::size_t ti = column_index(table, "timestamp_s", path);
  const std::size_t ci = column_index(table, "channel", path);
  PhotonTags tags;
  int max_channel = 0;
  for (const auto& row : table.rows) {
    const double t = parse_double(row[ti]);
    const double c = parse_double(row[ci]);
    require_valid(c >= 0.0 && c <= 255.0 && c == std::floor(c),
                  "csv: channel must be an integer in [0, 255] in " + path);
    tags.events.push_back({t, static_cast<std::uint8_t>(c)});
    max_channel = std::max(max_channel, static_cast<int>(c));
  }
  // Metadata comes from provenance when stamped, otherwise it is inferred
  // from the records themselves.
  if (const std::string* d = table.provenance.find("duration_s"))
    tags.duration_s = parse_double(*d);
  else if (!tags.events.empty())
    tags.duration_s = tags.events.back().t_s;
  if (const std::string* c = table.provenance.find("channel_count"))
    tags.channel_count = static_cast<int>(parse_double(*c));
  else
    tags.channel_count = max_channel + 1;
  if (const std::string* g = table.provenance.find("config_digest"))
    tags.config_digest = static_cast<std::uint64_t>(
        std::stoull(*g));
  tags.validate();
  return tags;
}

}  // namespace trumpet
