#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "doctest.h"
#include "trumpet/catalog.hpp"
#include "trumpet/cli.hpp"
#include "trumpet/constants.hpp"
#include "trumpet/csv.hpp"
#include "trumpet/mechanics.hpp"

using namespace trumpet;

namespace {

// Scratch directory freshly created per test case and removed afterwards.
struct ScratchDir {
  std::filesystem::path dir;
  ScratchDir() {
    dir = std::filesystem::temp_directory_path() /
          ("trumpet_cli_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
  }
  ~ScratchDir() { std::filesystem::remove_all(dir); }
  std::string path(const std::string& name) const {
    return (dir / name).string();
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return text;
}

std::size_t column_of(const CsvTable& table, const std::string& name) {
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    if (table.columns[i] == name) return i;
  FAIL("missing column ", name);
  return 0;
}

double provenance_number(const CsvTable& table, const std::string& key) {
  const std::string* value = table.provenance.find(key);
  REQUIRE(value != nullptr);
  return parse_double(*value);
}

// A drive with the power-broadened half width at 2 pi x 1 GHz: the rounded
// Hz value keeps the written config short and the width within a ppm.
constexpr const char* k_omega_r_hz = "1.40878e9";

std::string simulate_config(const std::string& duration_s,
                            const std::string& extras = "") {
  return std::string(R"({
  "emitter": {"gamma_sp_per_s": 1.1e9},
  "drive": {"omega_r_over_2pi_hz": )") +
         k_omega_r_hz + R"(, "delta_over_2pi_hz": 1.0e9},
  "efficiency": 0.01,
  "duration_s": )" +
         duration_s + R"(,
  "dt_s": 8.0e-8,
  "seed": 5,
  "trace_bin_s": 4.0e-6,
  "modes": [{"label": "F1x"}])" +
         extras + "\n}\n";
}

CliOptions options(const std::string& command) {
  CliOptions opts;
  opts.command = command;
  return opts;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate is deterministic per configuration and seed") {
  ScratchDir scratch;
  write_file(scratch.path("config.json"), simulate_config("2.0e-3"));

  CliOptions opts = options("simulate");
  opts.config_path = scratch.path("config.json");
  opts.out_dir = scratch.path("a");
  REQUIRE(run_command(opts) == 0);
  opts.out_dir = scratch.path("b");
  REQUIRE(run_command(opts) == 0);

  // Identical configuration, identical bytes: record and manifest digests.
  CHECK(slurp(scratch.path("a/tags.ptag")) ==
        slurp(scratch.path("b/tags.ptag")));
  CHECK(slurp(scratch.path("a/manifest.json")) ==
        slurp(scratch.path("b/manifest.json")));
  CHECK(std::filesystem::exists(scratch.path("a/trace.csv")));

  // A different seed changes the record (and so the manifest digests).
  opts.out_dir = scratch.path("c");
  opts.seed = 9;
  REQUIRE(run_command(opts) == 0);
  CHECK(slurp(scratch.path("a/manifest.json")) !=
        slurp(scratch.path("c/manifest.json")));
  CHECK(slurp(scratch.path("a/tags.ptag")) !=
        slurp(scratch.path("c/tags.ptag")));
}

TEST_CASE("simulate rejects broken configurations with exit code 2") {
  ScratchDir scratch;
  CliOptions opts = options("simulate");
  opts.out_dir = scratch.path("out");

  // Zero duration fails the record-length validation.
  write_file(scratch.path("zero.json"), simulate_config("0.0"));
  opts.config_path = scratch.path("zero.json");
  CHECK(run_command(opts) == 2);

  // A typo in a key is rejected, not silently defaulted.
  write_file(scratch.path("typo.json"),
             simulate_config("2.0e-3", ",\n  \"efficienty\": 0.5"));
  opts.config_path = scratch.path("typo.json");
  CHECK(run_command(opts) == 2);

  // Unknown mode label.
  std::string bad = simulate_config("2.0e-3");
  const std::string from = "\"F1x\"";
  bad.replace(bad.find(from), from.size(), "\"F9z\"");
  write_file(scratch.path("label.json"), bad);
  opts.config_path = scratch.path("label.json");
  CHECK(run_command(opts) == 2);

  // JSON syntax errors carry a line anchor but still exit 2.
  write_file(scratch.path("syntax.json"), "{\n  \"emitter\": {,}\n}\n");
  opts.config_path = scratch.path("syntax.json");
  CHECK(run_command(opts) == 2);

  // Missing config path.
  opts.config_path.clear();
  CHECK(run_command(opts) == 2);
}

TEST_CASE("analyze quantifies a simulated record and guards the g2 route") {
  ScratchDir scratch;
  write_file(scratch.path("config.json"), simulate_config("5.0e-2"));
  CliOptions sim = options("simulate");
  sim.config_path = scratch.path("config.json");
  sim.out_dir = scratch.path("rec");
  REQUIRE(run_command(sim) == 0);

  write_file(scratch.path("analysis.json"), R"({
  "trace_bin_s": 6.25e-7,
  "segment_length": 1024,
  "auto_window_hz": 3000.0
}
)");
  CliOptions analyze = options("analyze");
  analyze.tags_path = scratch.path("rec/tags.ptag");
  analyze.config_path = scratch.path("analysis.json");
  analyze.out_dir = scratch.path("spec");
  REQUIRE(run_command(analyze) == 0);
  CHECK(std::filesystem::exists(scratch.path("spec/spectrum.csv")));
  CHECK(std::filesystem::exists(scratch.path("spec/spectrum.svg")));
  CHECK(std::filesystem::exists(scratch.path("spec/manifest.json")));

  // The F1x sideband is found, labeled from the catalog, and its area is
  // the transduction value (lambda u_th / (Gamma u_zpf))^2 = 0.0215.
  const CsvTable peaks = read_csv(scratch.path("spec/peaks.csv"));
  const std::size_t label = column_of(peaks, "label");
  const std::size_t area = column_of(peaks, "area");
  const std::size_t freq = column_of(peaks, "frequency_hz");
  bool found = false;
  for (const auto& row : peaks.rows) {
    if (row[label] != "F1x") continue;
    found = true;
    CHECK(parse_double(row[freq]) ==
          doctest::Approx(607.9e3).epsilon(2e-3));
    CHECK(parse_double(row[area]) == doctest::Approx(0.0215).epsilon(0.4));
  }
  CHECK(found);

  // The correlation route needs a detector pair.
  analyze.g2 = true;
  analyze.out_dir = scratch.path("g2_bad");
  CHECK(run_command(analyze) == 2);

  // Tags alone with no route selected is an error, not a silent no-op.
  CliOptions idle = options("analyze");
  idle.tags_path = scratch.path("rec/tags.ptag");
  idle.out_dir = scratch.path("idle");
  CHECK(run_command(idle) == 2);

  // Exactly one input is required.
  CliOptions both = options("analyze");
  both.tags_path = scratch.path("rec/tags.ptag");
  both.trace_path = scratch.path("rec/trace.csv");
  CHECK(run_command(both) == 2);
  CHECK(run_command(options("analyze")) == 2);

  // The binned trace export analyzes the same way.
  CliOptions from_trace = options("analyze");
  from_trace.trace_path = scratch.path("rec/trace.csv");
  from_trace.config_path = scratch.path("analysis.json");
  from_trace.out_dir = scratch.path("spec2");
  REQUIRE(run_command(from_trace) == 0);
  CHECK(std::filesystem::exists(scratch.path("spec2/spectrum.csv")));
}

TEST_CASE("analyze runs the correlation route on a detector pair") {
  ScratchDir scratch;
  write_file(scratch.path("config.json"),
             simulate_config("2.0e-2",
                             ",\n  \"detector\": {\"channels\": 2}"));
  CliOptions sim = options("simulate");
  sim.config_path = scratch.path("config.json");
  sim.out_dir = scratch.path("rec");
  REQUIRE(run_command(sim) == 0);

  write_file(scratch.path("analysis.json"), R"({
  "g2": {"bin_s": 1.0e-6, "tau_max_s": 1.0e-4},
  "auto_window_hz": 3000.0
}
)");
  CliOptions analyze = options("analyze");
  analyze.tags_path = scratch.path("rec/tags.ptag");
  analyze.config_path = scratch.path("analysis.json");
  analyze.out_dir = scratch.path("g2");
  analyze.g2 = true;
  REQUIRE(run_command(analyze) == 0);
  CHECK(std::filesystem::exists(scratch.path("g2/g2.csv")));
  CHECK(std::filesystem::exists(scratch.path("g2/g2_spectrum.csv")));
  const CsvTable g2 = read_csv(scratch.path("g2/g2.csv"));
  CHECK(provenance_number(g2, "bin_s") == doctest::Approx(1e-6));
  CHECK(g2.rows.size() == 100);
}

TEST_CASE("budget sweeps expose the closed-form scalings") {
  ScratchDir scratch;

  // Imprecision scales as 1/efficiency; back-action is efficiency-blind.
  write_file(scratch.path("eff.json"), R"({
  "emitter": {"gamma_sp_per_s": 1.1e9},
  "drive": {"omega_r_over_2pi_hz": 1.40878e9, "delta_over_2pi_hz": 1.0e9},
  "mode": "B2",
  "sweep": {"variable": "efficiency", "start": 1.0e-2, "stop": 1.0,
            "points": 3, "spacing": "log"}
}
)");
  CliOptions budget = options("budget");
  budget.config_path = scratch.path("eff.json");
  budget.out_dir = scratch.path("eff");
  REQUIRE(run_command(budget) == 0);
  const CsvTable eff = read_csv(scratch.path("eff/budget.csv"));
  const std::size_t imp = column_of(eff, "s_xx_imprecision_m2_per_hz");
  const std::size_t ba = column_of(eff, "s_xx_backaction_at_wm_m2_per_hz");
  const std::size_t added = column_of(eff, "s_xx_added_at_wm_m2_per_hz");
  REQUIRE(eff.rows.size() == 3);
  CHECK(parse_double(eff.rows[0][imp]) ==
        doctest::Approx(100.0 * parse_double(eff.rows[2][imp])));
  CHECK(parse_double(eff.rows[0][ba]) ==
        doctest::Approx(parse_double(eff.rows[2][ba])));
  for (const auto& row : eff.rows)
    CHECK(parse_double(row[added]) >=
          parse_double(row[imp]) + parse_double(row[ba]) - 1e-30);

  // At the pinned optimum with no pure dephasing the imprecision-backaction
  // product follows the two-level bound 1 + 2 (Omega_R/gamma_sp)^2.
  write_file(scratch.path("drive.json"), R"({
  "emitter": {"gamma_sp_per_s": 1.1e9},
  "drive": {"omega_r_over_2pi_hz": 1.0e8, "delta_over_2pi_hz": 1.0e9},
  "mode": "F1x",
  "sweep": {"variable": "omega_r", "start": 1.0e7, "stop": 3.0e9,
            "points": 9, "spacing": "log"}
}
)");
  budget.config_path = scratch.path("drive.json");
  budget.out_dir = scratch.path("drive");
  REQUIRE(run_command(budget) == 0);
  const CsvTable drive = read_csv(scratch.path("drive/budget.csv"));
  const std::size_t value = column_of(drive, "sweep_value");
  const std::size_t product =
      column_of(drive, "heisenberg_product_normalized");
  REQUIRE(drive.rows.size() == 9);
  for (const auto& row : drive.rows) {
    const double omega = k_two_pi * parse_double(row[value]);
    const double bound = 1.0 + 2.0 * (omega / 1.1e9) * (omega / 1.1e9);
    CHECK(parse_double(row[product]) ==
          doctest::Approx(bound).epsilon(1e-9));
  }
  CHECK(std::filesystem::exists(scratch.path("drive/budget.svg")));

  // No sweep block: a single evaluated point, no plot.
  write_file(scratch.path("point.json"), R"({
  "emitter": {"gamma_sp_per_s": 1.1e9},
  "drive": {"omega_r_over_2pi_hz": 1.40878e9, "delta_over_2pi_hz": 1.0e9},
  "mode": "B2"
}
)");
  budget.config_path = scratch.path("point.json");
  budget.out_dir = scratch.path("point");
  REQUIRE(run_command(budget) == 0);
  CHECK(read_csv(scratch.path("point/budget.csv")).rows.size() == 1);
  CHECK(!std::filesystem::exists(scratch.path("point/budget.svg")));

  // Unknown sweep variable.
  write_file(scratch.path("bad.json"), R"({
  "emitter": {"gamma_sp_per_s": 1.1e9},
  "drive": {"omega_r_over_2pi_hz": 1.40878e9, "delta_over_2pi_hz": 1.0e9},
  "mode": "B2",
  "sweep": {"variable": "banana", "start": 1.0, "stop": 2.0, "points": 2}
}
)");
  budget.config_path = scratch.path("bad.json");
  budget.out_dir = scratch.path("bad");
  CHECK(run_command(budget) == 2);
}

TEST_CASE("localize recovers a forward-modeled position") {
  ScratchDir scratch;
  const Catalog& catalog = default_catalog();
  const QDPosition truth{35e-9, 20.0 * k_pi / 180.0};
  const double radius = catalog.cross_section_radius_m;
  const double ref = strain_at(catalog.mode("B2"), truth, radius).e_zz;

  CsvTable table;
  table.columns = {"label", "amplitude"};
  for (const MechMode& mode : catalog.modes) {
    const double zz = strain_at(mode, truth, radius).e_zz;
    table.rows.push_back(
        {mode.label, format_exact((zz / ref) * (zz / ref))});
  }
  write_csv(scratch.path("amplitudes.csv"), table);

  CliOptions localize = options("localize");
  localize.amplitudes_path = scratch.path("amplitudes.csv");
  localize.out_dir = scratch.path("out");
  REQUIRE(run_command(localize) == 0);

  const CsvTable result = read_csv(scratch.path("out/localization.csv"));
  CHECK(provenance_number(result, "position.r_m") ==
        doctest::Approx(35e-9).epsilon(1e-6));
  CHECK(provenance_number(result, "position.phi_rad") ==
        doctest::Approx(truth.phi_rad).epsilon(1e-6));
  CHECK(slurp(scratch.path("out/residual_map.svg")).find("<rect") !=
        std::string::npos);

  // Breathing modes alone carry no angular information: the command maps
  // the degeneracy to the numerical-failure exit code.
  CsvTable breathing;
  breathing.columns = {"label", "amplitude"};
  breathing.rows = {{"B1", "0.25"}, {"B2", "1.0"}};
  write_csv(scratch.path("breathing.csv"), breathing);
  localize.amplitudes_path = scratch.path("breathing.csv");
  localize.out_dir = scratch.path("bad");
  CHECK(run_command(localize) == 3);

  CHECK(run_command(options("localize")) == 2);
}

TEST_CASE("recipes run end to end and unknown names are rejected") {
  ScratchDir scratch;
  const std::vector<std::string> expected = {"fig2a", "fig2b", "fig3b",
                                             "fig4a", "fig4b", "fig4c",
                                             "figs2", "figs3", "figs4"};
  CHECK(recipe_names() == expected);

  CliOptions recipe = options("recipe");
  recipe.recipe_name = "fig9z";
  recipe.out_dir = scratch.path("x");
  CHECK(run_command(recipe) == 2);
  CHECK(run_command(options("recipe")) == 2);

  // The localization study reproduces the measured position exactly.
  recipe.recipe_name = "fig3b";
  recipe.out_dir = scratch.path("r");
  REQUIRE(run_command(recipe) == 0);
  const CsvTable loc = read_csv(scratch.path("r/fig3b/localization.csv"));
  CHECK(provenance_number(loc, "position.r_m") ==
        doctest::Approx(35e-9).epsilon(1e-6));
  CHECK(provenance_number(loc, "position.phi_rad") ==
        doctest::Approx(20.0 * k_pi / 180.0).epsilon(1e-6));

  // The product study's closed forms agree: measured column = bound column.
  recipe.recipe_name = "fig4c";
  REQUIRE(run_command(recipe) == 0);
  const CsvTable product = read_csv(scratch.path("r/fig4c/fig4c.csv"));
  const std::size_t normalized = column_of(product, "product_normalized");
  const std::size_t bound = column_of(product, "two_level_bound");
  REQUIRE(product.rows.size() == 121);
  for (const auto& row : product.rows)
    CHECK(parse_double(row[normalized]) ==
          doctest::Approx(parse_double(row[bound])).epsilon(1e-9));
}

}  // TEST_SUITE
