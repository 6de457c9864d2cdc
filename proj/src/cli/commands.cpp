// Command implementations. Each command reads its inputs, runs the library,
// writes CSV/SVG outputs plus a manifest of digests into --out, and prints a
// short summary; run_command maps the exception taxonomy to exit codes.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <string_view>
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

json echo_emitter(const Emitter& e) {
  return {{"gamma_sp_per_s", e.gamma_sp_per_s},
          {"gamma_star_per_s", e.gamma_star_per_s},
          {"sigma_inh_over_2pi_hz", angular_to_cycles(e.sigma_inh_per_s)}};
}

json echo_drive(const Drive& d) {
  return {{"omega_r_over_2pi_hz", angular_to_cycles(d.omega_r_per_s)},
          {"delta_over_2pi_hz", angular_to_cycles(d.delta_per_s)}};
}

bool looks_like_ptag(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require_valid(in.good(), "cannot open tags file: " + path);
  char magic[4] = {};
  in.read(magic, sizeof magic);
  return in.gcount() == 4 && std::string_view(magic, 4) == "PTAG";
}

// Spectrum plot: measured density, dashed shot-noise floor, one labeled
// marker per quantified peak.
void write_spectrum_svg(const std::string& path, const Spectrum& spec,
                        const std::vector<PeakResult>& peaks,
                        const std::string& title) {
  PlotSpec plot;
  plot.title = title;
  plot.x_label = "frequency (Hz)";
  plot.y_label = "relative NPSD (1/Hz)";
  plot.log_y = true;
  PlotSeries measured;
  measured.x = spec.frequency_hz;
  measured.y = spec.density_per_hz;
  measured.label = "measured";
  plot.series.push_back(std::move(measured));
  if (spec.mean_rate_per_s > 0.0) {
    PlotSeries floor;
    floor.x = {spec.frequency_hz.front(), spec.frequency_hz.back()};
    const double shot = 2.0 / spec.mean_rate_per_s;
    floor.y = {shot, shot};
    floor.label = "shot-noise floor";
    floor.dashed = true;
    plot.series.push_back(std::move(floor));
  }
  for (const PeakResult& p : peaks) {
    if (p.clipped) continue;
    // Anchor the marker at the tallest bin near the centroid.
    double top = 0.0;
    for (std::size_t i = 0; i < spec.frequency_hz.size(); ++i)
      if (std::abs(spec.frequency_hz[i] - p.frequency_hz) <
          5.0 * spec.rbw_hz)
        top = std::max(top, spec.density_per_hz[i]);
    plot.markers.push_back(
        {p.frequency_hz, top, p.label.empty() ? "peak" : p.label});
  }
  write_svg_plot(path, plot);
}

struct PeakPlan {
  std::vector<PeakWindow> windows;
  std::vector<std::string> labels;  // positional; empty entries allowed
  bool assign = true;               // label by catalog lookup afterwards
  double tolerance = 0.075;
};

// Peak windows: explicit from the config, else one window per catalog mode
// that fits inside the spectrum with a sideband margin.
PeakPlan plan_peaks(const json& cfg, const Catalog& catalog,
                    const Spectrum& spec) {
  PeakPlan plan;
  plan.tolerance = number_or(cfg, "config", "tolerance", 0.075);
  bool any_label = false;
  if (cfg.contains("peaks")) {
    require_valid(cfg.at("peaks").is_array(),
                  "config: \"peaks\" must be an array");
    for (const json& w : cfg.at("peaks")) {
      expect_keys(w, "peaks[]", {"lo_hz", "hi_hz", "label"});
      plan.windows.push_back({require_number(w, "peaks[]", "lo_hz"),
                              require_number(w, "peaks[]", "hi_hz")});
      std::string label = w.contains("label")
                              ? require_string(w, "peaks[]", "label")
                              : std::string();
      any_label = any_label || !label.empty();
      plan.labels.push_back(std::move(label));
    }
  } else {
    const double f_lo = spec.frequency_hz.front();
    const double f_hi = spec.frequency_hz.back();
    struct Auto {
      double lo, hi;
      std::string label;
    };
    std::vector<Auto> autos;
    for (const MechMode& mode : catalog.modes) {
      const double f0 = angular_to_cycles(mode.omega_m_per_s);
      const double half =
          cfg.contains("auto_window_hz")
              ? require_number(cfg, "config", "auto_window_hz")
              : std::max(25.0 * spec.rbw_hz,
                         10.0 * angular_to_cycles(mode.gamma_m_per_s));
      // Keep one window width of sideband on each side.
      if (f0 - 2.0 * half <= f_lo || f0 + 2.0 * half >= f_hi) continue;
      autos.push_back({f0 - half, f0 + half, mode.label});
    }
    std::sort(autos.begin(), autos.end(),
              [](const Auto& a, const Auto& b) { return a.lo < b.lo; });
    for (const Auto& a : autos) {
      if (!plan.windows.empty() && a.lo < plan.windows.back().hi_hz) {
        std::cerr << "note: skipping window for " << a.label
                  << " (overlaps the previous one)\n";
        continue;
      }
      plan.windows.push_back({a.lo, a.hi});
      plan.labels.emplace_back();
    }
  }
  plan.assign = bool_or(cfg, "config", "assign", !any_label);
  return plan;
}

std::vector<PeakResult> quantify_peaks(const Spectrum& spec,
                                       const PeakPlan& plan,
                                       const Catalog& catalog) {
  std::vector<PeakResult> peaks = find_peaks_and_areas(spec, plan.windows);
  if (plan.assign) return assign_modes(peaks, catalog, plan.tolerance);
  for (std::size_t i = 0; i < peaks.size() && i < plan.labels.size(); ++i)
    if (!plan.labels[i].empty()) peaks[i].label = plan.labels[i];
  return peaks;
}

void print_peaks(const std::vector<PeakResult>& peaks) {
  if (peaks.empty()) return;
  std::cout << "  label        f (Hz)          area           sigma          "
               "floor (1/Hz)\n";
  for (const PeakResult& p : peaks) {
    std::cout << "  " << std::left << std::setw(9)
              << (p.label.empty() ? "-" : p.label) << std::right
              << std::setw(14) << std::setprecision(8) << p.frequency_hz
              << std::setw(15) << std::setprecision(6) << p.area
              << std::setw(15) << p.area_sigma << std::setw(15)
              << p.floor_per_hz << (p.clipped ? "  (clipped)" : "") << '\n';
  }
}

}  // namespace

int cmd_simulate(const CliOptions& opts) {
  require_valid(!opts.config_path.empty(), "simulate requires --config");
  const json raw = parse_json_file(opts.config_path);
  const Catalog catalog = catalog_for(raw, opts.catalog_path);
  SimConfig cfg = sim_config_from_json(raw, catalog);
  if (opts.seed) cfg.seed = *opts.seed;
  const double trace_bin_s = number_or(raw, "config", "trace_bin_s", 0.0);

  // The echo is the resolved configuration (defaults materialized), so its
  // digest identifies the run regardless of the file's formatting.
  json echo;
  echo["emitter"] = echo_emitter(cfg.emitter);
  echo["drive"] = echo_drive(cfg.drive);
  echo["efficiency"] = cfg.efficiency;
  echo["temperature_k"] = cfg.temperature_k;
  echo["duration_s"] = cfg.duration_s;
  echo["dt_s"] = cfg.dt_s;
  echo["seed"] = cfg.seed;
  json modes = json::array();
  for (const ModeChannel& ch : cfg.modes)
    modes.push_back(
        {{"label", ch.mode.label},
         {"lambda_over_2pi_hz", angular_to_cycles(ch.lambda_per_s)}});
  echo["modes"] = std::move(modes);
  echo["blinking"] = {{"on_fraction", cfg.blinking.on_fraction},
                      {"correlation_time_s", cfg.blinking.correlation_time_s}};
  echo["detector"] = {{"jitter_sigma_s", cfg.detector.jitter_sigma_s},
                      {"dead_time_s", cfg.detector.dead_time_s},
                      {"channels", cfg.detector.channels}};
  if (trace_bin_s > 0.0) echo["trace_bin_s"] = trace_bin_s;
  cfg.config_digest = fnv1a_digest(echo.dump());
  cfg.validate();

  const PhotonTags tags = run_simulation(cfg);
  ensure_out_dir(opts.out_dir);
  std::vector<std::string> outputs;
  write_ptag(join_path(opts.out_dir, "tags.ptag"), tags);
  outputs.push_back("tags.ptag");
  if (trace_bin_s > 0.0) {
    write_trace_csv(join_path(opts.out_dir, "trace.csv"),
                    bin_tags(tags, trace_bin_s));
    outputs.push_back("trace.csv");
  }
  write_manifest(opts.out_dir, "simulate", echo, outputs);

  std::cout << "simulate: " << tags.events.size() << " events over "
            << tags.duration_s << " s ("
            << static_cast<double>(tags.events.size()) / tags.duration_s
            << " counts/s, " << tags.channel_count << " channel"
            << (tags.channel_count == 1 ? "" : "s") << ") -> " << opts.out_dir
            << '\n';
  return 0;
}

int cmd_analyze(const CliOptions& opts) {
  require_valid(opts.tags_path.empty() != opts.trace_path.empty(),
                "analyze requires exactly one of --tags or --trace");
  const json cfg =
      opts.config_path.empty() ? json::object()
                               : parse_json_file(opts.config_path);
  expect_keys(cfg, "config",
              {"trace_bin_s", "segment_length", "window", "peaks",
               "auto_window_hz", "assign", "tolerance", "g2", "catalog"});
  const Catalog catalog = catalog_for(cfg, opts.catalog_path);

  PhotonTags tags;
  TimeTrace trace;
  bool have_tags = false;
  bool have_trace = false;
  if (!opts.tags_path.empty()) {
    tags = looks_like_ptag(opts.tags_path) ? read_ptag(opts.tags_path)
                                           : read_tags_csv(opts.tags_path);
    have_tags = true;
    const double bin = number_or(cfg, "config", "trace_bin_s", 0.0);
    if (bin > 0.0) {
      trace = bin_tags(tags, bin);
      have_trace = true;
    }
  } else {
    trace = read_trace_csv(opts.trace_path);
    have_trace = true;
    require_valid(!opts.g2, "--g2 needs a photon record, not a binned trace");
  }
  require_valid(have_trace || opts.g2,
                "nothing to do: set trace_bin_s in the config for the trace "
                "route, or pass --g2");

  const auto segment_length = static_cast<std::size_t>(
      number_or(cfg, "config", "segment_length", 16384.0));
  const std::string window_name =
      cfg.contains("window") ? require_string(cfg, "config", "window")
                             : "hann";
  require_valid(window_name == "hann" || window_name == "rectangular",
                "config: window must be \"hann\" or \"rectangular\"");
  const SpectralWindow window = window_name == "hann"
                                    ? SpectralWindow::hann
                                    : SpectralWindow::rectangular;

  ensure_out_dir(opts.out_dir);
  json echo = cfg;
  echo["segment_length"] = segment_length;
  echo["window"] = window_name;
  std::vector<std::string> outputs;
  Provenance common;
  common.add("command", "analyze");
  common.add("source",
             opts.tags_path.empty() ? opts.trace_path : opts.tags_path);

  if (have_trace) {
    const Spectrum spec = trace_npsd(trace, segment_length, window);
    write_spectrum_csv(join_path(opts.out_dir, "spectrum.csv"), spec, common);
    outputs.push_back("spectrum.csv");
    const PeakPlan plan = plan_peaks(cfg, catalog, spec);
    std::vector<PeakResult> peaks;
    if (!plan.windows.empty()) {
      peaks = quantify_peaks(spec, plan, catalog);
      write_peaks_csv(join_path(opts.out_dir, "peaks.csv"), peaks, common);
      outputs.push_back("peaks.csv");
    }
    write_spectrum_svg(join_path(opts.out_dir, "spectrum.svg"), spec, peaks,
                       "Displacement read-out spectrum");
    outputs.push_back("spectrum.svg");
    std::cout << "trace route: " << trace.counts.size() << " bins of "
              << trace.bin_width_s << " s, rbw " << spec.rbw_hz << " Hz, "
              << spec.averages << " averages\n";
    print_peaks(peaks);
  }

  if (opts.g2) {
    require_valid(have_tags, "--g2 needs a photon record");
    require_valid(tags.channel_count >= 2,
                  "--g2 needs a two-channel record (input has " +
                      std::to_string(tags.channel_count) + ")");
    json g2cfg = cfg.contains("g2") ? cfg.at("g2") : json::object();
    expect_keys(g2cfg, "g2", {"bin_s", "tau_max_s", "tau_min_s"});
    const double bin_s = number_or(g2cfg, "g2", "bin_s", 2.5e-7);
    const double tau_max_s = number_or(g2cfg, "g2", "tau_max_s", 2e-3);
    const double tau_min_s = number_or(g2cfg, "g2", "tau_min_s", bin_s);
    echo["g2"] = {{"bin_s", bin_s},
                  {"tau_max_s", tau_max_s},
                  {"tau_min_s", tau_min_s}};

    const CorrelationTable table = g2_histogram(tags, bin_s, tau_max_s);
    if (table.poor_statistics)
      std::cerr << "note: tau range beyond a tenth of the record; "
                   "correlation statistics are thin\n";
    write_correlation_csv(join_path(opts.out_dir, "g2.csv"), table, common);
    outputs.push_back("g2.csv");

    const double mean_rate =
        static_cast<double>(tags.events.size()) / tags.duration_s;
    const Spectrum spec = npsd_from_g2(table, mean_rate, tau_min_s);
    write_spectrum_csv(join_path(opts.out_dir, "g2_spectrum.csv"), spec,
                       common);
    outputs.push_back("g2_spectrum.csv");
    const PeakPlan plan = plan_peaks(cfg, catalog, spec);
    std::vector<PeakResult> peaks;
    if (!plan.windows.empty()) {
      peaks = quantify_peaks(spec, plan, catalog);
      write_peaks_csv(join_path(opts.out_dir, "g2_peaks.csv"), peaks, common);
      outputs.push_back("g2_peaks.csv");
    }
    write_spectrum_svg(join_path(opts.out_dir, "g2_spectrum.svg"), spec,
                       peaks, "Correlation-route spectrum");
    outputs.push_back("g2_spectrum.svg");
    std::cout << "g2 route: " << table.tau_s.size() << " delay bins of "
              << table.bin_s << " s\n";
    print_peaks(peaks);
  }

  write_manifest(opts.out_dir, "analyze", echo, outputs);
  return 0;
}

int cmd_budget(const CliOptions& opts) {
  require_valid(!opts.config_path.empty(), "budget requires --config");
  const json raw = parse_json_file(opts.config_path);
  const Catalog catalog = catalog_for(raw, opts.catalog_path);
  const ReadoutConfig base = readout_config_from_json(raw, catalog);
  base.validate();
  const std::optional<SweepRequest> sweep = sweep_from_json(raw);

  SweepRequest request;
  std::string variable = "none";
  if (sweep) {
    request = *sweep;
    switch (request.variable) {
      case SweepVariable::omega_r: variable = "omega_r"; break;
      case SweepVariable::delta: variable = "delta"; break;
      case SweepVariable::efficiency: variable = "efficiency"; break;
      case SweepVariable::lambda: variable = "lambda"; break;
    }
  } else {
    request.variable = SweepVariable::omega_r;
    request.grid = {base.drive.omega_r_per_s};
    request.pin_delta_to_halfwidth = false;
  }
  const std::vector<NoiseBudget> rows = budget_sweep(base, request);

  // Sweep value per row in file units: Hz for angular variables.
  const bool angular = request.variable != SweepVariable::efficiency;
  CsvTable table;
  table.provenance.add("command", "budget");
  table.provenance.add("mode", base.mode.label);
  table.provenance.add("sweep_variable", variable);
  table.provenance.add("gamma_sp_per_s", base.emitter.gamma_sp_per_s);
  table.provenance.add("temperature_k", base.temperature_k);
  table.columns = {"sweep_value",
                   "omega_r_per_s",
                   "delta_per_s",
                   "rate_per_s",
                   "s_xx_imprecision_m2_per_hz",
                   "s_ff_backaction_n2_per_hz",
                   "s_xx_backaction_at_wm_m2_per_hz",
                   "s_xx_thermal_at_wm_m2_per_hz",
                   "s_xx_added_at_wm_m2_per_hz",
                   "heisenberg_product",
                   "heisenberg_product_normalized",
                   "gamma_opt_per_s",
                   "cooperativity"};
  const double quarter_hbar_sq = 0.25 * k_hbar * k_hbar;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const NoiseBudget& b = rows[i];
    const double value = request.grid[i] / (angular ? k_two_pi : 1.0);
    table.rows.push_back(
        {format_exact(value), format_exact(b.omega_r_per_s),
         format_exact(b.delta_per_s), format_exact(b.rate_per_s),
         format_exact(b.s_xx_imprecision), format_exact(b.s_ff_backaction),
         format_exact(b.s_xx_backaction_at_wm),
         format_exact(b.s_xx_thermal_at_wm), format_exact(b.s_xx_added_at_wm),
         format_exact(b.heisenberg_product),
         format_exact(b.heisenberg_product / quarter_hbar_sq),
         format_exact(b.gamma_opt_per_s), format_exact(b.cooperativity)});
  }
  ensure_out_dir(opts.out_dir);
  write_csv(join_path(opts.out_dir, "budget.csv"), table);
  std::vector<std::string> outputs = {"budget.csv"};

  if (rows.size() >= 2) {
    PlotSpec plot;
    plot.title = "Noise budget (" + base.mode.label + ")";
    plot.x_label = angular ? variable + " (Hz)" : variable;
    plot.y_label = "S_xx at the mode (m^2/Hz)";
    std::vector<double> x;
    for (double v : request.grid) x.push_back(v / (angular ? k_two_pi : 1.0));
    auto add = [&](auto pick, const char* label, bool dashed) {
      PlotSeries s;
      s.x = x;
      for (const NoiseBudget& b : rows) s.y.push_back(pick(b));
      s.label = label;
      s.dashed = dashed;
      plot.series.push_back(std::move(s));
    };
    add([](const NoiseBudget& b) { return b.s_xx_imprecision; },
        "imprecision", false);
    add([](const NoiseBudget& b) { return b.s_xx_backaction_at_wm; },
        "back-action", false);
    add([](const NoiseBudget& b) { return b.s_xx_thermal_at_wm; }, "thermal",
        true);
    add([](const NoiseBudget& b) { return b.s_xx_added_at_wm; }, "added",
        false);
    plot.log_x = true;
    for (double v : x) plot.log_x = plot.log_x && v > 0.0;
    plot.log_y = true;
    write_svg_plot(join_path(opts.out_dir, "budget.svg"), plot);
    outputs.push_back("budget.svg");
  }

  json echo = raw;
  echo["sweep_variable"] = variable;
  write_manifest(opts.out_dir, "budget", echo, outputs);

  const FiguresOfMerit merit = figures_of_merit(base);
  std::cout << "budget: " << rows.size() << " point"
            << (rows.size() == 1 ? "" : "s") << " -> " << opts.out_dir
            << "\n  mode " << base.mode.label
            << ": Gamma_opt/2pi = " << angular_to_cycles(merit.gamma_opt_per_s)
            << " Hz, C = " << merit.cooperativity
            << ", n_coherent = " << merit.n_coherent
            << ", n_thermal = " << merit.n_thermal << '\n';
  return 0;
}

int cmd_localize(const CliOptions& opts) {
  require_valid(!opts.amplitudes_path.empty(),
                "localize requires --amplitudes");
  const json cfg =
      opts.config_path.empty() ? json::object()
                               : parse_json_file(opts.config_path);
  expect_keys(cfg, "config",
              {"r_step_m", "phi_step_rad", "fine_r_step_m",
               "fine_phi_step_rad", "reference", "catalog"});
  const Catalog catalog = catalog_for(cfg, opts.catalog_path);
  const std::vector<LabeledAmplitude> amplitudes =
      read_amplitudes_csv(opts.amplitudes_path);

  LocalizeGrid grid;
  grid.r_step_m = number_or(cfg, "config", "r_step_m", grid.r_step_m);
  grid.phi_step_rad =
      number_or(cfg, "config", "phi_step_rad", grid.phi_step_rad);
  grid.fine_r_step_m =
      number_or(cfg, "config", "fine_r_step_m", grid.fine_r_step_m);
  grid.fine_phi_step_rad =
      number_or(cfg, "config", "fine_phi_step_rad", grid.fine_phi_step_rad);
  if (cfg.contains("reference"))
    grid.reference_label = require_string(cfg, "config", "reference");

  const LocalizationResult result = localize_qd(amplitudes, catalog, grid);

  ensure_out_dir(opts.out_dir);
  Provenance prov;
  prov.add("command", "localize");
  prov.add("source", opts.amplitudes_path);
  write_localization_csv(join_path(opts.out_dir, "localization.csv"), result,
                         prov);

  // Residual map over the whole quadrant, in display units (nm, degrees),
  // log-scaled for contrast around the minimum.
  HeatMapSpec map;
  map.title = "Localization residual (log10 chi^2)";
  map.x_label = "r (nm)";
  map.y_label = "phi (deg)";
  const std::size_t nr = 61, nphi = 37;
  const double radius = catalog.cross_section_radius_m;
  for (std::size_t i = 0; i < nr; ++i)
    map.x.push_back(1e9 * radius * static_cast<double>(i) / (nr - 1.0));
  for (std::size_t j = 0; j < nphi; ++j)
    map.y.push_back(90.0 * static_cast<double>(j) / (nphi - 1.0));
  std::vector<double> chi(nr * nphi, 0.0);
  double chi_max = 0.0;
  for (std::size_t j = 0; j < nphi; ++j)
    for (std::size_t i = 0; i < nr; ++i) {
      // Exact fractions of the bounds: the display coordinates round-trip
      // through nm/degrees and could land just outside the cross-section.
      QDPosition pos{radius * static_cast<double>(i) / (nr - 1.0),
                     0.5 * k_pi * static_cast<double>(j) / (nphi - 1.0)};
      const double c = localization_chi_square(amplitudes, catalog, pos,
                                               grid.reference_label);
      chi[j * nr + i] = c;
      if (std::isfinite(c)) chi_max = std::max(chi_max, c);
    }
  const double eps = 1e-9 * chi_max + 1e-300;
  for (double& c : chi)
    c = std::log10((std::isfinite(c) ? c : chi_max) + eps);
  map.value = std::move(chi);
  map.mark = true;
  map.mark_x = 1e9 * result.position.r_m;
  map.mark_y = result.position.phi_rad * 180.0 / k_pi;
  write_svg_heatmap(join_path(opts.out_dir, "residual_map.svg"), map);

  json echo = cfg;
  echo["amplitudes"] = opts.amplitudes_path;
  write_manifest(opts.out_dir, "localize", echo,
                 {"localization.csv", "residual_map.svg"});

  std::cout << "localize: r = " << 1e9 * result.position.r_m
            << " nm, phi = " << result.position.phi_rad * 180.0 / k_pi
            << " deg, chi^2 = " << result.chi_square << '\n';
  std::cout << "  mode      measured     predicted\n";
  for (std::size_t i = 0; i < result.labels.size(); ++i)
    std::cout << "  " << std::left << std::setw(9) << result.labels[i]
              << std::right << std::setw(11) << std::setprecision(5)
              << result.measured[i] << std::setw(14) << result.predicted[i]
              << '\n';
  return 0;
}

}  // namespace trumpet::cli

namespace trumpet {

int run_command(const CliOptions& opts) {
  try {
    if (opts.command == "simulate") return cli::cmd_simulate(opts);
    if (opts.command == "analyze") return cli::cmd_analyze(opts);
    if (opts.command == "budget") return cli::cmd_budget(opts);
    if (opts.command == "localize") return cli::cmd_localize(opts);
    if (opts.command == "recipe") return cli::cmd_recipe(opts);
    throw ValidationError("unknown command: " + opts.command);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace trumpet
