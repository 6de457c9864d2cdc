// JSON configuration ingestion for the command-line front end. Strict by
// design: unknown keys are rejected, parse errors carry a line anchor, and
// every angular quantity is converted from Hz exactly once, here.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cli_detail.hpp"
#include "trumpet/constants.hpp"
#include "trumpet/errors.hpp"
#include "trumpet/tags.hpp"

namespace trumpet::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require_valid(in.good(), "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

// Converts a byte offset from the JSON parser into line:column.
std::string line_anchor(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

const json& require_object(const json& j, const std::string& context) {
  if (!j.is_object())
    throw ValidationError(context + ": expected a JSON object");
  return j;
}

// Angular quantity: `<base>_over_2pi_hz` in the file, rad/s in the program.
double angular_or(const json& obj, const std::string& context, const char* key,
                  double fallback_per_s) {
  return obj.contains(key)
             ? cycles_to_angular(require_number(obj, context, key))
             : fallback_per_s;
}

Emitter emitter_from_json(const json& j) {
  const std::string ctx = "emitter";
  require_object(j, ctx);
  expect_keys(j, ctx,
              {"gamma_sp_per_s", "gamma_star_per_s", "sigma_inh_over_2pi_hz"});
  Emitter e;
  e.gamma_sp_per_s = require_number(j, ctx, "gamma_sp_per_s");
  e.gamma_star_per_s = number_or(j, ctx, "gamma_star_per_s", 0.0);
  e.sigma_inh_per_s = angular_or(j, ctx, "sigma_inh_over_2pi_hz", 0.0);
  return e;
}

Drive drive_from_json(const json& j) {
  const std::string ctx = "drive";
  require_object(j, ctx);
  expect_keys(j, ctx, {"omega_r_over_2pi_hz", "delta_over_2pi_hz"});
  Drive d;
  d.omega_r_per_s =
      cycles_to_angular(require_number(j, ctx, "omega_r_over_2pi_hz"));
  d.delta_per_s = cycles_to_angular(require_number(j, ctx, "delta_over_2pi_hz"));
  return d;
}

}  // namespace

json parse_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ":" + line_anchor(text, e.byte) + ": " +
                          e.what());
  }
}

void expect_keys(const json& obj, const std::string& context,
                 std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) {
      std::string list;
      for (const char* key : allowed) {
        if (!list.empty()) list += ", ";
        list += key;
      }
      throw ValidationError(context + ": unknown key \"" + item.key() +
                            "\" (allowed: " + list + ")");
    }
  }
}

double require_number(const json& obj, const std::string& context,
                      const char* key) {
  require_valid(obj.contains(key), context + ": missing key \"" +
                                       std::string(key) + "\"");
  const json& v = obj.at(key);
  if (!v.is_number())
    throw ValidationError(context + ": \"" + key + "\" must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& context, const char* key,
                 double fallback) {
  return obj.contains(key) ? require_number(obj, context, key) : fallback;
}

std::string require_string(const json& obj, const std::string& context,
                           const char* key) {
  require_valid(obj.contains(key), context + ": missing key \"" +
                                       std::string(key) + "\"");
  const json& v = obj.at(key);
  if (!v.is_string())
    throw ValidationError(context + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

bool bool_or(const json& obj, const std::string& context, const char* key,
             bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean())
    throw ValidationError(context + ": \"" + key + "\" must be true or false");
  return v.get<bool>();
}

Catalog catalog_for(const json& cfg, const std::string& cli_catalog_path) {
  if (!cli_catalog_path.empty()) return load_catalog_file(cli_catalog_path);
  if (cfg.is_object() && cfg.contains("catalog"))
    return load_catalog_file(require_string(cfg, "config", "catalog"));
  return default_catalog();
}

SimConfig sim_config_from_json(const json& j, const Catalog& catalog) {
  const std::string ctx = "config";
  require_object(j, ctx);
  expect_keys(j, ctx,
              {"emitter", "drive", "efficiency", "temperature_k", "duration_s",
               "dt_s", "seed", "modes", "blinking", "detector", "trace_bin_s",
               "catalog"});
  SimConfig cfg;
  require_valid(j.contains("emitter"), ctx + ": missing key \"emitter\"");
  cfg.emitter = emitter_from_json(j.at("emitter"));
  require_valid(j.contains("drive"), ctx + ": missing key \"drive\"");
  cfg.drive = drive_from_json(j.at("drive"));
  cfg.efficiency = require_number(j, ctx, "efficiency");
  cfg.temperature_k = number_or(j, ctx, "temperature_k", 4.0);
  cfg.duration_s = require_number(j, ctx, "duration_s");
  cfg.dt_s = require_number(j, ctx, "dt_s");
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned())
      throw ValidationError(ctx + ": \"seed\" must be a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }

  require_valid(j.contains("modes") && j.at("modes").is_array() &&
                    !j.at("modes").empty(),
                ctx + ": \"modes\" must be a non-empty array");
  for (const json& entry : j.at("modes")) {
    const std::string mctx = "modes[]";
    require_object(entry, mctx);
    expect_keys(entry, mctx, {"label", "lambda_over_2pi_hz"});
    const std::string label = require_string(entry, mctx, "label");
    require_valid(catalog.has_mode(label),
                  mctx + ": no catalog mode labeled \"" + label + "\"");
    ModeChannel ch;
    ch.mode = catalog.mode(label);
    ch.lambda_per_s = angular_or(entry, mctx, "lambda_over_2pi_hz",
                                 ch.mode.lambda_per_s);
    require_valid(ch.lambda_per_s > 0.0,
                  mctx + ": mode \"" + label +
                      "\" has no catalog coupling; give lambda_over_2pi_hz");
    cfg.modes.push_back(std::move(ch));
  }

  if (j.contains("blinking")) {
    const std::string bctx = "blinking";
    const json& b = require_object(j.at("blinking"), bctx);
    expect_keys(b, bctx, {"on_fraction", "correlation_time_s"});
    cfg.blinking.on_fraction = require_number(b, bctx, "on_fraction");
    cfg.blinking.correlation_time_s =
        require_number(b, bctx, "correlation_time_s");
  } else {
    // No blinking block: the emitter is always on.
    cfg.blinking.on_fraction = 1.0;
    cfg.blinking.correlation_time_s = 100e-9;
  }

  if (j.contains("detector")) {
    const std::string dctx = "detector";
    const json& d = require_object(j.at("detector"), dctx);
    expect_keys(d, dctx, {"jitter_sigma_s", "dead_time_s", "channels"});
    cfg.detector.jitter_sigma_s = number_or(d, dctx, "jitter_sigma_s", 0.0);
    cfg.detector.dead_time_s = number_or(d, dctx, "dead_time_s", 0.0);
    cfg.detector.channels =
        static_cast<int>(number_or(d, dctx, "channels", 1.0));
  }
  return cfg;
}

ReadoutConfig readout_config_from_json(const json& j, const Catalog& catalog) {
  const std::string ctx = "config";
  require_object(j, ctx);
  expect_keys(j, ctx,
              {"emitter", "drive", "mode", "lambda_over_2pi_hz", "efficiency",
               "temperature_k", "sweep", "catalog"});
  ReadoutConfig cfg;
  require_valid(j.contains("emitter"), ctx + ": missing key \"emitter\"");
  cfg.emitter = emitter_from_json(j.at("emitter"));
  require_valid(j.contains("drive"), ctx + ": missing key \"drive\"");
  cfg.drive = drive_from_json(j.at("drive"));
  const std::string label = require_string(j, ctx, "mode");
  require_valid(catalog.has_mode(label),
                ctx + ": no catalog mode labeled \"" + label + "\"");
  cfg.mode = catalog.mode(label);
  cfg.lambda_per_s =
      angular_or(j, ctx, "lambda_over_2pi_hz", cfg.mode.lambda_per_s);
  require_valid(cfg.lambda_per_s > 0.0,
                ctx + ": mode \"" + label +
                    "\" has no catalog coupling; give lambda_over_2pi_hz");
  cfg.efficiency = number_or(j, ctx, "efficiency", 1.0);
  cfg.temperature_k = number_or(j, ctx, "temperature_k", 4.0);
  return cfg;
}

std::optional<SweepRequest> sweep_from_json(const json& j) {
  if (!j.contains("sweep")) return std::nullopt;
  const std::string ctx = "sweep";
  const json& s = require_object(j.at("sweep"), ctx);
  expect_keys(s, ctx,
              {"variable", "start", "stop", "points", "spacing",
               "pin_delta_to_halfwidth"});
  SweepRequest req;
  const std::string var = require_string(s, ctx, "variable");
  bool angular = true;
  if (var == "omega_r") {
    req.variable = SweepVariable::omega_r;
  } else if (var == "delta") {
    req.variable = SweepVariable::delta;
  } else if (var == "lambda") {
    req.variable = SweepVariable::lambda;
  } else if (var == "efficiency") {
    req.variable = SweepVariable::efficiency;
    angular = false;
  } else {
    throw ValidationError(
        ctx + ": variable must be omega_r, delta, efficiency, or lambda");
  }

  // Angular sweep bounds are given in Hz, like every other angular key.
  const double start = require_number(s, ctx, "start");
  const double stop = require_number(s, ctx, "stop");
  const double n_points = require_number(s, ctx, "points");
  const std::string spacing =
      s.contains("spacing") ? require_string(s, ctx, "spacing") : "log";
  require_valid(n_points >= 1.0 && n_points == std::floor(n_points) &&
                    n_points <= 1e6,
                ctx + ": points must be a positive integer");
  const auto n = static_cast<std::size_t>(n_points);
  require_valid(spacing == "log" || spacing == "linear",
                ctx + ": spacing must be \"log\" or \"linear\"");
  if (spacing == "log")
    require_valid(start > 0.0 && stop > 0.0,
                  ctx + ": log spacing needs positive bounds");

  const double scale = angular ? k_two_pi : 1.0;
  req.grid.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1.0);
    const double value =
        spacing == "log" ? start * std::pow(stop / start, t)
                         : start + (stop - start) * t;
    req.grid.push_back(scale * value);
  }
  req.pin_delta_to_halfwidth =
      bool_or(s, ctx, "pin_delta_to_halfwidth", true);
  return req;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require_valid(!ec, "cannot create output directory: " + dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string file_digest_hex(const std::string& path) {
  const std::uint64_t d = fnv1a_digest(read_file(path));
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx",
                static_cast<unsigned long long>(d));
  return buf;
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const json& config_echo,
                    const std::vector<std::string>& output_names) {
  json outputs = json::object();
  for (const std::string& name : output_names)
    outputs[name] = file_digest_hex(join_path(out_dir, name));
  const json manifest = {
      {"command", command}, {"config", config_echo}, {"outputs", outputs}};
  std::ofstream out(join_path(out_dir, "manifest.json"), std::ios::binary);
  require_valid(out.good(), "cannot write manifest in " + out_dir);
  out << manifest.dump(2) << '\n';
}

}  // namespace trumpet::cli
