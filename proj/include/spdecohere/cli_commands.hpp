#pragma once

#include <optional>
#include <string>

#include "spdecohere/config.hpp"

namespace spdecohere {

// Options gathered from argv; empty strings mean "not given".
struct GlobalOptions {
  std::string config_path;
  std::string sweep_path;
  std::string out_path;  // overrides output.path from the config
  std::optional<std::uint64_t> seed;
  std::string preset_e2;  // "gaussian" | "heaviside" | ""
  std::string mode;       // "approx" | "full" | ""
  bool attenuate = false;
};

// Exit codes: 0 ok, 1 configuration error, 2 computation error.
int cmd_compute(const GlobalOptions& options);
int cmd_sweep(const GlobalOptions& options);
int cmd_convergence(const GlobalOptions& options);

} // namespace spdecohere
