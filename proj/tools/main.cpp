#include <CLI11.hpp>

#include "spdecohere/cli_commands.hpp"
#include "spdecohere/version.hpp"

namespace {

void add_common(CLI::App* cmd, spdecohere::GlobalOptions& options, bool needs_sweep) {
  cmd->add_option("--config", options.config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  if (needs_sweep)
    cmd->add_option("--sweep", options.sweep_path, "sweep grid file")
        ->required()
        ->check(CLI::ExistingFile);
  cmd->add_option("--out", options.out_path, "output path (default: config output.path or stdout)");
  cmd->add_option("--seed", options.seed, "override the RNG seed");
  cmd->add_option("--preset-e2", options.preset_e2, "coupling convention preset")
      ->check(CLI::IsMember({"gaussian", "heaviside"}));
  cmd->add_option("--mode", options.mode, "grating model")
      ->check(CLI::IsMember({"approx", "full"}));
  cmd->add_flag("--attenuate", options.attenuate, "apply the exp(-4 pi z0 / d) height factor");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smith-Purcell grating decoherence calculator"};
  app.set_version_flag("--version", std::string(spdecohere::kVersion));
  app.require_subcommand(1);

  spdecohere::GlobalOptions options;
  CLI::App* compute = app.add_subcommand("compute", "evaluate one scenario, emit a JSON report");
  add_common(compute, options, false);
  CLI::App* sweep = app.add_subcommand("sweep", "evaluate a parameter grid, emit CSV");
  add_common(sweep, options, true);
  CLI::App* convergence =
      app.add_subcommand("convergence", "tolerance ladder + oracle agreement report");
  add_common(convergence, options, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems are configuration errors
  }

  if (compute->parsed()) return spdecohere::cmd_compute(options);
  if (sweep->parsed()) return spdecohere::cmd_sweep(options);
  return spdecohere::cmd_convergence(options);
}
