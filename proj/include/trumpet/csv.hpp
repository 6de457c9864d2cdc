#pragma once

// Provenance-stamped CSV. Every file opens with `# key: value` comment
// lines recording the configuration that produced it, then one header row
// naming the columns, then data rows. Cells containing commas, quotes, or
// newlines are double-quoted with "" escaping. Numbers are written with
// shortest round-trip precision, so read-back is exact.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trumpet/analysis.hpp"
#include "trumpet/estimators.hpp"
#include "trumpet/tags.hpp"

namespace trumpet {

struct Provenance {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, const char* value);
  void add(const std::string& key, double value);
  void add(const std::string& key, std::uint64_t value);
  // Pointer to the value for key, or nullptr when absent (first match wins).
  const std::string* find(const std::string& key) const;
};

struct CsvTable {
  Provenance provenance;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// Shortest decimal text that parses back to exactly the same double.
std::string format_exact(double v);
// Strict full-string parse; raises ValidationError on trailing garbage.
double parse_double(const std::string& text);

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

// Typed writers and readers used by the command-line front end. Scalar
// fields travel as reserved provenance keys; array fields become columns.
void write_spectrum_csv(const std::string& path, const Spectrum& spec,
                        const Provenance& prov);
Spectrum read_spectrum_csv(const std::string& path);

void write_peaks_csv(const std::string& path,
                     const std::vector<PeakResult>& peaks,
                     const Provenance& prov);

void write_correlation_csv(const std::string& path,
                           const CorrelationTable& table,
                           const Provenance& prov);

void write_coupling_csv(const std::string& path,
                        const std::vector<DetuningArea>& points,
                        const CouplingFit& fit, const Provenance& prov);

void write_localization_csv(const std::string& path,
                            const LocalizationResult& result,
                            const Provenance& prov);

// Rows of label,amplitude[,sigma]; a missing sigma column reads as zero.
std::vector<LabeledAmplitude> read_amplitudes_csv(const std::string& path);

// Readers for the plain exports written by the tags module (provenance
// comment lines, when present, are tolerated and used for metadata).
TimeTrace read_trace_csv(const std::string& path);
PhotonTags read_tags_csv(const std::string& path);

}  // namespace trumpet
