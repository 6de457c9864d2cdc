// Command-line entry point: argv parsing only; all behavior lives in the
// cli library so tests can drive it in-process.

#include <cstdint>
#include <string>

#include "CLI11.hpp"
#include "trumpet/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "trumpet: displacement read-out of a photonic-wire mechanical "
      "resonator through the resonance fluorescence of an embedded "
      "quantum dot"};
  app.require_subcommand(1);

  trumpet::CliOptions opts;
  std::uint64_t seed = 0;

  auto* simulate = app.add_subcommand(
      "simulate", "generate a photon record from a JSON configuration");
  simulate->add_option("--config", opts.config_path, "configuration file")
      ->required();
  auto* sim_seed =
      simulate->add_option("--seed", seed, "override the config seed");

  auto* analyze = app.add_subcommand(
      "analyze", "spectra and peak areas from a photon record or trace");
  analyze->add_option("--tags", opts.tags_path,
                      "photon record (.ptag or CSV)");
  analyze->add_option("--trace", opts.trace_path, "binned count trace CSV");
  analyze->add_option("--config", opts.config_path,
                      "analysis options (JSON)");
  analyze->add_flag("--g2", opts.g2,
                    "add the pair-correlation spectral route");

  auto* budget = app.add_subcommand(
      "budget", "closed-form noise budget at (or swept around) an "
                "operating point");
  budget->add_option("--config", opts.config_path, "configuration file")
      ->required();

  auto* localize = app.add_subcommand(
      "localize", "emitter position from relative mode amplitudes");
  localize->add_option("--amplitudes", opts.amplitudes_path,
                       "label,amplitude[,sigma] CSV")
      ->required();
  localize->add_option("--config", opts.config_path,
                       "grid options (JSON)");

  std::string recipe_list;
  for (const std::string& name : trumpet::recipe_names()) {
    if (!recipe_list.empty()) recipe_list += ", ";
    recipe_list += name;
  }
  auto* recipe =
      app.add_subcommand("recipe", "canned studies: " + recipe_list);
  recipe->add_option("name", opts.recipe_name, "which study to run");
  auto* recipe_seed =
      recipe->add_option("--seed", seed, "override the built-in seed");

  for (CLI::App* cmd : {simulate, analyze, budget, localize, recipe}) {
    cmd->add_option("--out", opts.out_dir,
                    "output directory, created if missing (default .)");
    cmd->add_option("--catalog", opts.catalog_path,
                    "mode catalog JSON (default: built-in)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad arguments are validation failures
  }

  opts.command = app.get_subcommands().front()->get_name();
  if (sim_seed->count() > 0 || recipe_seed->count() > 0) opts.seed = seed;
  return trumpet::run_command(opts);
}
