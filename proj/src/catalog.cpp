#include "trumpet/catalog.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "trumpet/constants.hpp"
#include "trumpet/errors.hpp"

namespace trumpet {

const MechMode& Catalog::mode(std::string_view label) const {
  for (const auto& m : modes)
    if (m.label == label) return m;
  throw ValidationError("catalog: no mode labeled '" + std::string(label) +
                        "'");
}

bool Catalog::has_mode(std::string_view label) const {
  for (const auto& m : modes)
    if (m.label == label) return true;
  return false;
}

void Catalog::validate() const {
  require_valid(cross_section_radius_m > 0.0,
                "catalog: cross_section_radius_m must be > 0");
  require_valid(temperature_k > 0.0, "catalog: temperature_k must be > 0");
  require_valid(!modes.empty(), "catalog: no modes defined");
  std::set<std::string> seen;
  for (const auto& m : modes) {
    m.validate();
    require_valid(seen.insert(m.label).second,
                  "catalog: duplicate mode label '" + m.label + "'");
    require_valid(m.anchor_r_m <= cross_section_radius_m,
                  "catalog: anchor outside the cross-section for '" + m.label +
                      "'");
  }
}

namespace {

using nlohmann::json;

double number_field(const json& j, const char* key, const std::string& ctx) {
  require_valid(j.contains(key) && j[key].is_number(),
                "catalog: missing or non-numeric '" + std::string(key) +
                    "' in " + ctx);
  return j[key].get<double>();
}

ModeFamily parse_family(const std::string& s, const std::string& ctx) {
  if (s == "flexural-x") return ModeFamily::flexural_x;
  if (s == "flexural-y") return ModeFamily::flexural_y;
  if (s == "breathing") return ModeFamily::breathing;
  throw ValidationError("catalog: unknown family '" + s + "' in " + ctx);
}

MechMode parse_mode(const json& j) {
  require_valid(j.contains("label") && j["label"].is_string(),
                "catalog: mode entry without a string 'label'");
  MechMode m;
  m.label = j["label"].get<std::string>();
  const std::string ctx = "mode '" + m.label + "'";

  require_valid(j.contains("family") && j["family"].is_string(),
                "catalog: missing 'family' in " + ctx);
  m.family = parse_family(j["family"].get<std::string>(), ctx);
  m.order = static_cast<int>(number_field(j, "order", ctx));
  const double freq = number_field(j, "freq_over_2pi_hz", ctx);
  m.omega_m_per_s = cycles_to_angular(freq);

  const bool has_gamma = j.contains("gamma_m_over_2pi_hz");
  const bool has_q = j.contains("Q");
  require_valid(has_gamma != has_q,
                "catalog: exactly one of 'gamma_m_over_2pi_hz' or 'Q' "
                "required in " + ctx);
  if (has_gamma) {
    m.gamma_m_per_s = cycles_to_angular(number_field(j, "gamma_m_over_2pi_hz", ctx));
  } else {
    const double q = number_field(j, "Q", ctx);
    require_valid(q > 0.0, "catalog: Q must be > 0 in " + ctx);
    m.gamma_m_per_s = m.omega_m_per_s / q;
  }

  m.mass_kg = number_field(j, "m_eff_kg", ctx);
  if (j.contains("lambda_over_2pi_hz"))
    m.lambda_per_s = cycles_to_angular(number_field(j, "lambda_over_2pi_hz", ctx));

  require_valid(j.contains("anchor") && j["anchor"].is_object(),
                "catalog: missing 'anchor' object in " + ctx);
  const json& a = j["anchor"];
  m.anchor_r_m = number_field(a, "r_m", ctx);
  m.anchor_phi_rad = number_field(a, "phi_rad", ctx);
  m.anchor_strain.e_zz = number_field(a, "e_zz", ctx);
  m.anchor_strain.e_xx = number_field(a, "e_xx", ctx);
  m.anchor_strain.e_yy = number_field(a, "e_yy", ctx);
  return m;
}

}  // namespace

Catalog load_catalog(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("catalog: JSON parse error: ") +
                          e.what());
  }
  Catalog c;
  c.cross_section_radius_m = number_field(j, "cross_section_radius_m", "root");
  c.temperature_k = number_field(j, "temperature_k", "root");
  require_valid(j.contains("modes") && j["modes"].is_array(),
                "catalog: missing 'modes' array");
  for (const auto& jm : j["modes"]) c.modes.push_back(parse_mode(jm));
  c.validate();
  return c;
}

Catalog load_catalog_file(const std::string& path) {
  std::ifstream in(path);
  require_valid(static_cast<bool>(in),
                "catalog: cannot open file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return load_catalog(text.str());
}

std::string_view default_catalog_json() {
  // Byte-identical to data/catalog_trumpet.json (enforced by a test).
  static constexpr std::string_view text = R"({
  "cross_section_radius_m": 1.5e-7,
  "temperature_k": 4.0,
  "modes": [
    {
      "label": "F1y",
      "family": "flexural-y",
      "order": 1,
      "freq_over_2pi_hz": 512.8e3,
      "gamma_m_over_2pi_hz": 203.5,
      "m_eff_kg": 2.6e-14,
      "lambda_over_2pi_hz": 5.5e4,
      "anchor": { "r_m": 4.5e-8, "phi_rad": 1.5707963267948966,
                  "e_zz": 5.9e-8, "e_xx": -1.6e-8, "e_yy": -1.9e-8 }
    },
    {
      "label": "F1x",
      "family": "flexural-x",
      "order": 1,
      "freq_over_2pi_hz": 607.9e3,
      "gamma_m_over_2pi_hz": 203.5,
      "m_eff_kg": 2.6e-14,
      "lambda_over_2pi_hz": 2.8e5,
      "anchor": { "r_m": 4.5e-8, "phi_rad": 0.0,
                  "e_zz": 5.9e-8, "e_xx": -1.6e-8, "e_yy": -1.9e-8 }
    },
    {
      "label": "B1",
      "family": "breathing",
      "order": 1,
      "freq_over_2pi_hz": 8.2e6,
      "Q": 300,
      "m_eff_kg": 1.445e-14,
      "anchor": { "r_m": 4.5e-8, "phi_rad": 0.0,
                  "e_zz": 1.3e-10, "e_xx": -2.6e-11, "e_yy": -1.2e-10 }
    },
    {
      "label": "F2x",
      "family": "flexural-x",
      "order": 2,
      "freq_over_2pi_hz": 13.4e6,
      "Q": 3000,
      "m_eff_kg": 3.116e-14,
      "anchor": { "r_m": 4.5e-8, "phi_rad": 0.0,
                  "e_zz": 3.8e-8, "e_xx": -1.1e-8, "e_yy": -1.2e-8 }
    },
    {
      "label": "B2",
      "family": "breathing",
      "order": 2,
      "freq_over_2pi_hz": 40.0e6,
      "gamma_m_over_2pi_hz": 1.4e5,
      "m_eff_kg": 8.743e-14,
      "lambda_over_2pi_hz": 3.6e6,
      "anchor": { "r_m": 4.5e-8, "phi_rad": 0.0,
                  "e_zz": 7.0e-8, "e_xx": -2.1e-8, "e_yy": -1.9e-8 }
    },
    {
      "label": "F3x",
      "family": "flexural-x",
      "order": 3,
      "freq_over_2pi_hz": 55.0e6,
      "Q": 3000,
      "m_eff_kg": 4.624e-14,
      "anchor": { "r_m": 4.5e-8, "phi_rad": 0.0,
                  "e_zz": 3.0e-8, "e_xx": -8.1e-9, "e_yy": -9.7e-9 }
    }
  ]
}
)";
  return text;
}

const Catalog& default_catalog() {
  static const Catalog c = load_catalog(std::string(default_catalog_json()));
  return c;
}

}  // namespace trumpet
