#pragma once

// Internal glue shared by the command implementations: JSON ingestion with
// strict key checking, catalog resolution, and manifest writing. Not part
// of the public interface.

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "trumpet/catalog.hpp"
#include "trumpet/cli.hpp"
#include "trumpet/noisebudget.hpp"
#include "trumpet/simulator.hpp"

namespace trumpet::cli {

using nlohmann::json;

// Parses a JSON file; syntax errors are rethrown as ValidationError with a
// path:line:column anchor.
json parse_json_file(const std::string& path);

// Rejects keys outside `allowed`; `context` names the object in the error.
void expect_keys(const json& obj, const std::string& context,
                 std::initializer_list<const char*> allowed);

double require_number(const json& obj, const std::string& context,
                      const char* key);
double number_or(const json& obj, const std::string& context, const char* key,
                 double fallback);
std::string require_string(const json& obj, const std::string& context,
                           const char* key);
bool bool_or(const json& obj, const std::string& context, const char* key,
             bool fallback);

// Catalog resolution order: --catalog flag, then the config's "catalog"
// path, then the built-in table.
Catalog catalog_for(const json& cfg, const std::string& cli_catalog_path);

// Simulation configuration from JSON (seed still subject to the --seed
// override; config_digest left for the caller to stamp).
SimConfig sim_config_from_json(const json& j, const Catalog& catalog);

// Noise-budget operating point and optional sweep from JSON.
ReadoutConfig readout_config_from_json(const json& j, const Catalog& catalog);
std::optional<SweepRequest> sweep_from_json(const json& j);

// Creates the directory (and parents) if needed; trailing output path join.
void ensure_out_dir(const std::string& dir);
std::string join_path(const std::string& dir, const std::string& name);

// FNV-1a digest of a file's bytes, as "0x" + 16 hex digits.
std::string file_digest_hex(const std::string& path);

// Writes <out_dir>/manifest.json: the command, the resolved configuration
// echo, and a digest per output file. Deliberately carries no timestamps so
// identical runs produce identical bytes.
void write_manifest(const std::string& out_dir, const std::string& command,
                    const json& config_echo,
                    const std::vector<std::string>& output_names);

int cmd_simulate(const CliOptions& opts);
int cmd_analyze(const CliOptions& opts);
int cmd_budget(const CliOptions& opts);
int cmd_localize(const CliOptions& opts);
int cmd_recipe(const CliOptions& opts);

}  // namespace trumpet::cli
