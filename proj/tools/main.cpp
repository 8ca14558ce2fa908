// tegrec command-line interface.
//
// Exit codes: 0 success, 2 usage/config error, 3 runtime error.

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace tegrec;
  using namespace tegrec::cli;

  CLI::App app{"Reconfigurable TEG array simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::vector<std::string> scheme_names;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "Seed override for synthetic traces and random studies");
  app.add_option("--out", out_dir, "Output directory (overrides out_dir)");
  app.add_option("--scheme", scheme_names, "Scheme to run: dnor, inor, fixed (repeatable)")
      ->take_all();
  app.fallthrough();

  auto* curves = app.add_subcommand("curves", "Module I-V / P-V curves per temperature difference");
  std::vector<double> delta_ts;
  curves->add_option("--delta-t", delta_ts, "Temperature differences [K]")->take_all();

  auto* run_cmd = app.add_subcommand("run", "Simulate each configured scheme");
  auto* compare_cmd = app.add_subcommand("compare", "Side-by-side comparison of >= 2 schemes");
  auto* validate_cmd = app.add_subcommand("validate", "INOR-vs-oracle gap study and invariants");
  bool strict = false;
  validate_cmd->add_flag("--strict", strict, "Exit 1 if any invariant fails");

  auto* scaling_cmd = app.add_subcommand("scaling", "Runtime scaling of INOR in the array size");
  std::vector<std::size_t> sizes;
  scaling_cmd->add_option("--sizes", sizes, "Array sizes, at least two")
      ->required()
      ->take_all()
      ->expected(2, -1);

  auto* synth_cmd = app.add_subcommand("synth-trace", "Write the configured synthetic trace");
  std::optional<std::string> synth_output;
  synth_cmd->add_option("--output", synth_output, "Trace CSV path (default <out>/trace.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (seed) {
      cfg.seed = *seed;
      cfg.synth.seed = *seed;
    }
    if (out_dir) cfg.out_dir = *out_dir;
    if (!scheme_names.empty()) {
      cfg.schemes.clear();
      for (const auto& name : scheme_names)
        cfg.schemes.push_back(scheme_from_name(name, cfg.settings.predictor.horizon));
    }
    if (!delta_ts.empty()) cfg.curves.delta_t = delta_ts;
    validate(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const std::filesystem::path out = cfg.out_dir;
    if (curves->parsed()) {
      cmd_curves(cfg, out, std::cout);
    } else if (run_cmd->parsed()) {
      cmd_run(cfg, out, std::cout);
    } else if (compare_cmd->parsed()) {
      cmd_compare(cfg, out, std::cout);
    } else if (validate_cmd->parsed()) {
      const auto res = cmd_validate(cfg, out, std::cout);
      if (strict && !res.all_passed) return 1;
    } else if (scaling_cmd->parsed()) {
      cmd_scaling(cfg, sizes, out, std::cout);
    } else if (synth_cmd->parsed()) {
      cmd_synth_trace(cfg, synth_output ? std::filesystem::path(*synth_output) : out / "trace.csv",
                      std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
