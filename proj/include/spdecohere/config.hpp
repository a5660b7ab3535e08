#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>

#include "spdecohere/decoherence.hpp"
#include "spdecohere/profiles.hpp"
#include "spdecohere/quadrature.hpp"

namespace spdecohere {

// Thrown for malformed or physically invalid configuration input; the CLI
// maps it to exit code 1 (compute failures map to 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fully validated experiment description. Lengths are stored in the
// canonical unit (micrometres, with c = 1 so times share it); only
// dimensionless ratios ever reach the physics layer.
struct ExperimentConfig {
  GratingGeometry grating;
  BeamConfig beam;
  double w_plane = 0.0;
  SpMode mode = SpMode::approximate;
  bool attenuate = false;
  std::uint64_t seed = 1;
  QuadratureSpec quad;
  double proximity_warn_ratio = 0.2;
  std::string e2_convention = "custom";  // gaussian | heaviside | custom
  std::string output_path;               // empty means stdout
};

struct SweepSpec {
  enum class Parameter { r_over_tau, tz_over_tau, grooves, theta, v_y };
  Parameter parameter = Parameter::r_over_tau;
  double min = 0.0;
  double max = 1.0;
  int count = 2;
  bool log_scale = false;
  bool per_epsilon = true;
};

// Command-line overrides applied on top of the config file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> preset_e2;  // "gaussian" or "heaviside"
  std::optional<SpMode> mode;
  bool attenuate = false;  // flag: only ever forces attenuation on
};

ExperimentConfig parse_config(std::istream& in, const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});
SweepSpec parse_sweep(std::istream& in);
SweepSpec load_sweep(const std::string& path);

const char* parameter_name(SweepSpec::Parameter p);

} // namespace spdecohere
