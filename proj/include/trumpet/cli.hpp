#pragma once

// Command-line front end. Commands are plain functions over CliOptions so
// tests can drive them in-process; the `trumpet` binary only parses argv.
//
// Configuration files are JSON. Angular quantities are given in Hz under
// keys ending in `_over_2pi_hz` (multiplied by 2 pi on load); plain decay
// rates keep the `_per_s` suffix; everything else is SI. Unknown keys are
// rejected so typos fail loudly instead of silently using a default.
//
// Exit codes: 0 success, 2 invalid configuration or input (ValidationError),
// 3 numerical failure (NumericalError and derived), 1 unexpected internal
// error.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace trumpet {

struct CliOptions {
  std::string command;          // simulate | analyze | budget | localize | recipe
  std::string config_path;      // JSON configuration file
  std::string out_dir = ".";    // output directory, created if missing
  std::string tags_path;        // analyze: photon record (.ptag or CSV)
  std::string trace_path;       // analyze: binned count trace (CSV)
  std::string amplitudes_path;  // localize: label,amplitude[,sigma] CSV
  std::string catalog_path;     // mode catalog override (else built-in)
  std::string recipe_name;      // recipe: which study to run
  bool g2 = false;              // analyze: add the pair-correlation route
  std::optional<std::uint64_t> seed;  // overrides the config seed
};

// Executes one command, reporting errors on stderr; returns the exit code.
int run_command(const CliOptions& opts);

// Names of the canned studies `trumpet recipe` accepts.
std::vector<std::string> recipe_names();

}  // namespace trumpet
