// Canned studies reproducing the headline results at desk scale. Each
// recipe writes its generated configuration files next to its outputs, so
// every figure doubles as an editable starting point; where a study is just
// a command invocation, the recipe goes through the same code path as the
// command line.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cli_detail.hpp"
#include "trumpet/analysis.hpp"
#include "trumpet/constants.hpp"
#include "trumpet/csv.hpp"
#include "trumpet/errors.hpp"
#include "trumpet/estimators.hpp"
#include "trumpet/svg.hpp"
#include "trumpet/tags.hpp"

namespace trumpet::cli {

namespace {

// Measured emitter: spontaneous rate 1.1e9 /s, and a 2 GHz-FWHM line
// represented by driving the dephasing-free two-level emitter to the same
// power-broadened width (the slow inhomogeneous broadening is not a
// dynamical ingredient at the kHz-MHz analysis frequencies probed here).
constexpr double k_gamma_sp_per_s = 1.1e9;
constexpr double k_halfwidth_per_s = k_two_pi * 1.0e9;

Emitter lab_emitter() {
  Emitter e;
  e.gamma_sp_per_s = k_gamma_sp_per_s;
  return e;
}

// Drive strength with Gamma = sqrt(gamma^2 + Omega^2/2) equal to the
// measured half width (gamma_star = 0, so gamma/gamma_sp = 1/2).
double matched_omega_r() {
  const double gamma = 0.5 * k_gamma_sp_per_s;
  return std::sqrt(2.0 *
                   (k_halfwidth_per_s * k_halfwidth_per_s - gamma * gamma));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require_valid(out.good(), "cannot write " + path);
  out << text << '\n';
}

json lab_emitter_json() {
  return {{"gamma_sp_per_s", k_gamma_sp_per_s}};
}

json lab_drive_json(double omega_r_per_s, double delta_per_s) {
  return {{"omega_r_over_2pi_hz", angular_to_cycles(omega_r_per_s)},
          {"delta_over_2pi_hz", angular_to_cycles(delta_per_s)}};
}

// Runs `budget` on a generated config, then restamps the manifest as the
// recipe's own (covering the config file as well).
void run_budget_recipe(const std::string& name, const std::string& out,
                       const json& cfg, bool wrote_svg = true) {
  write_text(join_path(out, "config.json"), cfg.dump(2));
  CliOptions budget;
  budget.command = "budget";
  budget.config_path = join_path(out, "config.json");
  budget.out_dir = out;
  cmd_budget(budget);
  std::vector<std::string> outputs = {"config.json", "budget.csv"};
  if (wrote_svg) outputs.push_back("budget.svg");
  write_manifest(out, "recipe " + name, cfg, outputs);
}

// Thermal-motion sidebands of the fundamental flexural doublet: simulate a
// blinking emitter reading out F1x + F1y, then take the Welch spectrum with
// one auto window per in-band catalog mode.
void run_fig2a(const std::string& out, std::optional<std::uint64_t> seed) {
  const json sim_cfg = {
      {"emitter", lab_emitter_json()},
      {"drive", lab_drive_json(matched_omega_r(), k_halfwidth_per_s)},
      {"efficiency", 0.016},
      {"temperature_k", 4.0},
      {"duration_s", 4.0},
      {"dt_s", 8e-8},
      {"seed", 21},
      {"modes", json::array({{{"label", "F1x"}}, {{"label", "F1y"}}})},
      {"blinking", {{"on_fraction", 0.1}, {"correlation_time_s", 1e-7}}},
      {"trace_bin_s", 6.25e-7}};
  write_text(join_path(out, "config.json"), sim_cfg.dump(2));
  const json analyze_cfg = {{"trace_bin_s", 6.25e-7},
                            {"segment_length", 16384}};
  write_text(join_path(out, "analysis.json"), analyze_cfg.dump(2));

  CliOptions sim;
  sim.command = "simulate";
  sim.config_path = join_path(out, "config.json");
  sim.out_dir = out;
  sim.seed = seed;
  cmd_simulate(sim);

  CliOptions analyze;
  analyze.command = "analyze";
  analyze.tags_path = join_path(out, "tags.ptag");
  analyze.config_path = join_path(out, "analysis.json");
  analyze.out_dir = out;
  cmd_analyze(analyze);

  write_manifest(out, "recipe fig2a", sim_cfg,
                 {"config.json", "analysis.json", "tags.ptag", "trace.csv",
                  "spectrum.csv", "spectrum.svg", "peaks.csv"});
}

// Transduced sideband area versus laser detuning for F1x: the closed-form
// curve, three simulated operating points, and the one-parameter coupling
// fit pulling lambda back out.
void run_fig2b(const std::string& out, std::optional<std::uint64_t> seed) {
  const Catalog& catalog = default_catalog();
  const MechMode mode = catalog.mode("F1x");
  const Emitter emitter = lab_emitter();
  const double omega_r = matched_omega_r();
  const double gamma_hw = k_halfwidth_per_s;
  const double efficiency = 0.008;
  const double u_ratio = thermal_rms_m(mode, 4.0) / zero_point_m(mode);

  LineshapeParams line;
  line.lorentzian_fwhm_per_s = 2.0 * gamma_hw;
  line.amplitude_per_s =
      efficiency * rf_rate(emitter, {omega_r, 0.0});

  auto model_area = [&](double delta_per_s) {
    const double ratio = lineshape_slope(line, delta_per_s) /
                         lineshape_rate(line, delta_per_s);
    const double scaled = mode.lambda_per_s * u_ratio * ratio;
    return scaled * scaled;
  };

  CsvTable theory;
  theory.provenance.add("command", "recipe fig2b");
  theory.provenance.add("mode", mode.label);
  theory.columns = {"delta_per_s", "area"};
  PlotSeries curve;
  curve.label = "model";
  for (int i = 0; i <= 240; ++i) {
    const double delta = (-3.0 + 6.0 * i / 240.0) * gamma_hw;
    if (std::abs(delta) < 0.02 * gamma_hw) continue;  // node at resonance
    theory.rows.push_back(
        {format_exact(delta), format_exact(model_area(delta))});
    curve.x.push_back(delta / gamma_hw);
    curve.y.push_back(model_area(delta));
  }
  write_csv(join_path(out, "transduction.csv"), theory);

  // Simulated operating points on the positive-detuning flank.
  const double alphas[] = {0.5, 1.0, 1.75};
  std::vector<DetuningArea> points;
  std::vector<PlotMarker> markers;
  const std::uint64_t base_seed = seed.value_or(31);
  for (int i = 0; i < 3; ++i) {
    const double delta = alphas[i] * gamma_hw;
    std::cout << "simulating delta = " << alphas[i]
              << " half widths ..." << std::endl;
    SimConfig cfg;
    cfg.modes.push_back({mode, mode.lambda_per_s});
    cfg.emitter = emitter;
    cfg.drive = {omega_r, delta};
    cfg.efficiency = efficiency;
    cfg.blinking = {1.0, 100e-9};
    cfg.temperature_k = 4.0;
    cfg.duration_s = 2.0;
    cfg.dt_s = 8e-8;
    cfg.seed = base_seed + static_cast<std::uint64_t>(i);
    cfg.config_digest = fnv1a_digest("fig2b:" + std::to_string(alphas[i]));
    cfg.validate();
    const PhotonTags tags = run_simulation(cfg);
    const Spectrum spec =
        trace_npsd(bin_tags(tags, 6.25e-7), 16384, SpectralWindow::hann);
    const double f0 = angular_to_cycles(mode.omega_m_per_s);
    const auto peaks =
        find_peaks_and_areas(spec, {{f0 - 3e3, f0 + 3e3}});
    points.push_back({delta, peaks[0].area, peaks[0].area_sigma});
    markers.push_back({alphas[i], peaks[0].area, "measured"});
  }

  const CouplingFit fit = extract_coupling(points, line, mode, 4.0);
  Provenance prov;
  prov.add("command", "recipe fig2b");
  prov.add("mode", mode.label);
  prov.add("lambda_injected_per_s", mode.lambda_per_s);
  write_coupling_csv(join_path(out, "coupling.csv"), points, fit, prov);

  PlotSpec plot;
  plot.title = "Transduced area versus detuning (F1x)";
  plot.x_label = "detuning (half widths)";
  plot.y_label = "sideband area";
  plot.series.push_back(std::move(curve));
  plot.markers = std::move(markers);
  write_svg_plot(join_path(out, "fig2b.svg"), plot);

  const json echo = {{"recipe", "fig2b"},
                     {"efficiency", efficiency},
                     {"duration_s", 2.0},
                     {"seed", base_seed}};
  write_manifest(out, "recipe fig2b", echo,
                 {"transduction.csv", "coupling.csv", "fig2b.svg"});
  std::cout << "coupling fit: lambda/2pi = "
            << angular_to_cycles(fit.lambda_per_s) << " Hz (injected "
            << angular_to_cycles(mode.lambda_per_s) << " Hz)\n";
}

// Emitter localization from the relative sideband amplitudes of all six
// catalog modes, forward-modeled at the measured position.
void run_fig3b(const std::string& out, std::optional<std::uint64_t>) {
  const Catalog& catalog = default_catalog();
  const QDPosition truth{35e-9, 20.0 * k_pi / 180.0};
  const double radius = catalog.cross_section_radius_m;
  const double ref_zz = strain_at(catalog.mode("B2"), truth, radius).e_zz;

  CsvTable table;
  table.provenance.add("command", "recipe fig3b");
  table.provenance.add("model", "relative e_zz^2 at r=35nm, phi=20deg");
  table.columns = {"label", "amplitude"};
  for (const MechMode& mode : catalog.modes) {
    const double zz = strain_at(mode, truth, radius).e_zz;
    table.rows.push_back(
        {mode.label, format_exact((zz / ref_zz) * (zz / ref_zz))});
  }
  write_csv(join_path(out, "amplitudes.csv"), table);

  CliOptions localize;
  localize.command = "localize";
  localize.amplitudes_path = join_path(out, "amplitudes.csv");
  localize.out_dir = out;
  cmd_localize(localize);

  const json echo = {{"recipe", "fig3b"},
                     {"truth_r_m", truth.r_m},
                     {"truth_phi_rad", truth.phi_rad}};
  write_manifest(out, "recipe fig3b", echo,
                 {"amplitudes.csv", "localization.csv", "residual_map.svg"});
}

json budget_base_json(double omega_r_per_s, double delta_per_s) {
  return {{"emitter", lab_emitter_json()},
          {"drive", lab_drive_json(omega_r_per_s, delta_per_s)},
          {"mode", "F1x"},
          {"efficiency", 1.0},
          {"temperature_k", 4.0}};
}

ReadoutConfig budget_base_config() {
  ReadoutConfig cfg;
  cfg.emitter = lab_emitter();
  cfg.drive = {k_two_pi * 1e8, k_two_pi * 1e9};
  cfg.mode = default_catalog().mode("F1x");
  cfg.lambda_per_s = cfg.mode.lambda_per_s;
  return cfg;
}

// Noise-budget contributions versus drive strength, detuning pinned to the
// power-broadened half width at every point.
void run_fig4a(const std::string& out, std::optional<std::uint64_t>) {
  json cfg = budget_base_json(k_two_pi * 1e8, k_two_pi * 1e9);
  cfg["sweep"] = {{"variable", "omega_r"}, {"start", 1e6},   {"stop", 5e9},
                  {"points", 121},         {"spacing", "log"}};
  run_budget_recipe("fig4a", out, cfg);
  const double sql = find_sql_drive(budget_base_config(), k_two_pi * 1e6,
                                    k_two_pi * 5e9);
  const ReadoutConfig at_sql = [&] {
    ReadoutConfig c = budget_base_config();
    c.drive.omega_r_per_s = sql;
    c.drive.delta_per_s = power_broadened_halfwidth(c.emitter, sql);
    return c;
  }();
  const NoiseBudget b = evaluate_budget(at_sql);
  std::cout << "added-noise minimum: Omega_R/2pi = "
            << angular_to_cycles(sql) << " Hz, rate = " << b.rate_per_s
            << " /s, S_xx_added = " << b.s_xx_added_at_wm << " m^2/Hz\n";
}

// Noise-budget contributions versus laser detuning at the drive strength
// minimizing the added noise.
void run_fig4b(const std::string& out, std::optional<std::uint64_t>) {
  const double sql = find_sql_drive(budget_base_config(), k_two_pi * 1e6,
                                    k_two_pi * 5e9);
  const double hw = power_broadened_halfwidth(lab_emitter(), sql);
  json cfg = budget_base_json(sql, hw);
  cfg["sweep"] = {{"variable", "delta"},
                  {"start", angular_to_cycles(0.02 * hw)},
                  {"stop", angular_to_cycles(4.0 * hw)},
                  {"points", 160},
                  {"spacing", "linear"}};
  run_budget_recipe("fig4b", out, cfg);
}

// Imprecision-backaction product versus drive strength at the pinned
// optimum, against the two-level bound 1 + 2 (Omega_R / gamma_sp)^2.
void run_fig4c(const std::string& out, std::optional<std::uint64_t>) {
  ReadoutConfig base = budget_base_config();
  SweepRequest request;
  request.variable = SweepVariable::omega_r;
  for (int i = 0; i <= 120; ++i)
    request.grid.push_back(k_two_pi * 1e6 *
                           std::pow(5e9 / 1e6, i / 120.0));
  const std::vector<NoiseBudget> rows = budget_sweep(base, request);

  const double quarter_hbar_sq = 0.25 * k_hbar * k_hbar;
  CsvTable table;
  table.provenance.add("command", "recipe fig4c");
  table.provenance.add("mode", base.mode.label);
  table.columns = {"omega_r_over_2pi_hz", "rate_per_s", "product_normalized",
                   "two_level_bound"};
  PlotSeries measured, bound;
  measured.label = "product";
  bound.label = "1 + 2 (Omega_R/gamma_sp)^2";
  bound.dashed = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double omega = request.grid[i];
    const double x = angular_to_cycles(omega);
    const double normalized = rows[i].heisenberg_product / quarter_hbar_sq;
    const double ratio = omega / k_gamma_sp_per_s;
    const double theory = 1.0 + 2.0 * ratio * ratio;
    table.rows.push_back({format_exact(x), format_exact(rows[i].rate_per_s),
                          format_exact(normalized), format_exact(theory)});
    measured.x.push_back(x);
    measured.y.push_back(normalized);
    bound.x.push_back(x);
    bound.y.push_back(theory);
  }
  write_csv(join_path(out, "fig4c.csv"), table);

  PlotSpec plot;
  plot.title = "Imprecision-backaction product";
  plot.x_label = "Omega_R / 2pi (Hz)";
  plot.y_label = "S_xx^I S_FF / (hbar/2)^2";
  plot.log_x = true;
  plot.log_y = true;
  plot.series.push_back(std::move(measured));
  plot.series.push_back(std::move(bound));
  write_svg_plot(join_path(out, "fig4c.svg"), plot);

  const json echo = {{"recipe", "fig4c"}, {"mode", base.mode.label}};
  write_manifest(out, "recipe fig4c", echo, {"fig4c.csv", "fig4c.svg"});
  std::cout << "product spans " << table.rows.front()[2] << " to "
            << table.rows.back()[2] << " in units of (hbar/2)^2\n";
}

// Added noise versus detection efficiency at the efficiency-1 optimum.
void run_figs2(const std::string& out, std::optional<std::uint64_t>) {
  const double sql = find_sql_drive(budget_base_config(), k_two_pi * 1e6,
                                    k_two_pi * 5e9);
  const double hw = power_broadened_halfwidth(lab_emitter(), sql);
  json cfg = budget_base_json(sql, hw);
  cfg["sweep"] = {{"variable", "efficiency"}, {"start", 1e-4}, {"stop", 1.0},
                  {"points", 81},             {"spacing", "log"}};
  run_budget_recipe("figs2", out, cfg);
}

// Added noise versus emitter-mode coupling around the measured value.
void run_figs3(const std::string& out, std::optional<std::uint64_t>) {
  const double sql = find_sql_drive(budget_base_config(), k_two_pi * 1e6,
                                    k_two_pi * 5e9);
  const double hw = power_broadened_halfwidth(lab_emitter(), sql);
  const double lambda_hz =
      angular_to_cycles(default_catalog().mode("F1x").lambda_per_s);
  json cfg = budget_base_json(sql, hw);
  cfg["sweep"] = {{"variable", "lambda"},
                  {"start", lambda_hz / 30.0},
                  {"stop", lambda_hz * 30.0},
                  {"points", 121},
                  {"spacing", "log"}};
  run_budget_recipe("figs3", out, cfg);
}

// Budget versus drive deep in the weak-coupling regime,
// lambda = 0.1 sqrt(gamma_sp gamma_m).
void run_figs4(const std::string& out, std::optional<std::uint64_t>) {
  const MechMode mode = default_catalog().mode("F1x");
  const double lambda =
      0.1 * std::sqrt(k_gamma_sp_per_s * mode.gamma_m_per_s);
  json cfg = budget_base_json(k_two_pi * 1e8, k_two_pi * 1e9);
  cfg["lambda_over_2pi_hz"] = angular_to_cycles(lambda);
  cfg["sweep"] = {{"variable", "omega_r"}, {"start", 1e6},   {"stop", 5e9},
                  {"points", 121},         {"spacing", "log"}};
  run_budget_recipe("figs4", out, cfg);
}

struct Recipe {
  const char* name;
  const char* summary;
  void (*run)(const std::string& out, std::optional<std::uint64_t> seed);
};

constexpr Recipe k_recipes[] = {
    {"fig2a", "thermal-motion spectrum of the flexural doublet", run_fig2a},
    {"fig2b", "sideband area versus detuning with a coupling fit",
     run_fig2b},
    {"fig3b", "emitter localization from relative mode amplitudes",
     run_fig3b},
    {"fig4a", "noise budget versus drive strength", run_fig4a},
    {"fig4b", "noise budget versus laser detuning", run_fig4b},
    {"fig4c", "imprecision-backaction product versus drive", run_fig4c},
    {"figs2", "added noise versus detection efficiency", run_figs2},
    {"figs3", "added noise versus emitter-mode coupling", run_figs3},
    {"figs4", "noise budget deep in the weak-coupling regime", run_figs4},
};

std::string known_recipes() {
  std::string names;
  for (const Recipe& r : k_recipes) {
    if (!names.empty()) names += ", ";
    names += r.name;
  }
  return names;
}

}  // namespace

int cmd_recipe(const CliOptions& opts) {
  require_valid(!opts.recipe_name.empty(),
                "recipe requires a name (one of: " + known_recipes() + ")");
  for (const Recipe& r : k_recipes) {
    if (opts.recipe_name != r.name) continue;
    const std::string out = join_path(opts.out_dir, r.name);
    ensure_out_dir(out);
    std::cout << "recipe " << r.name << ": " << r.summary << '\n';
    r.run(out, opts.seed);
    std::cout << "recipe " << r.name << " -> " << out << '\n';
    return 0;
  }
  throw ValidationError("unknown recipe \"" + opts.recipe_name +
                        "\" (available: " + known_recipes() + ")");
}

}  // namespace trumpet::cli

namespace trumpet {

std::vector<std::string> recipe_names() {
  std::vector<std::string> names;
  for (const cli::Recipe& r : cli::k_recipes) names.push_back(r.name);
  return names;
}

}  // namespace trumpet
