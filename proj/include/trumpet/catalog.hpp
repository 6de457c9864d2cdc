#pragma once

// Mode catalog: the set of mechanical modes of one device, loaded from JSON
// and immutable afterwards. The library ships a built-in catalog for the
// reference device (also available as data/catalog_trumpet.json).

#include <string>
#include <string_view>
#include <vector>

#include "trumpet/mechanics.hpp"

namespace trumpet {

struct Catalog {
  std::vector<MechMode> modes;
  double cross_section_radius_m = 0.0;
  double temperature_k = 4.0;  // normalization temperature of anchor tensors

  const MechMode& mode(std::string_view label) const;
  bool has_mode(std::string_view label) const;
  void validate() const;
};

// Parse and validate a catalog from JSON text. Schema (all numbers SI unless
// the key says otherwise):
//   {
//     "cross_section_radius_m": ...,
//     "temperature_k": ...,
//     "modes": [ { "label", "family" ("flexural-x"|"flexural-y"|"breathing"),
//                  "order", "freq_over_2pi_hz",
//                  "gamma_m_over_2pi_hz" or "Q",
//                  "m_eff_kg", optional "lambda_over_2pi_hz",
//                  "anchor": {"r_m","phi_rad","e_zz","e_xx","e_yy"} }, ... ]
//   }
Catalog load_catalog(const std::string& json_text);

Catalog load_catalog_file(const std::string& path);

// Built-in catalog of the reference device.
const Catalog& default_catalog();

// The JSON text the default catalog is built from (kept byte-identical to
// data/catalog_trumpet.json; a test enforces the match).
std::string_view default_catalog_json();

}  // namespace trumpet
