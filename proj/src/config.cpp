#include "spdecohere/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace spdecohere {

namespace {

std::string trim(std::string s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

[[noreturn]] void fail_key(const std::string& key, const std::string& what) {
  fail("config key '" + key + "': " + what);
}

// Key/value store for one parsed file, with duplicate and leftover detection.
class KeyValues {
 public:
  KeyValues(std::istream& in, const char* what) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        fail(std::string(what) + " line " + std::to_string(lineno) +
             ": expected 'section.key = value'");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty() || key.find('.') == std::string::npos)
        fail(std::string(what) + " line " + std::to_string(lineno) +
             ": key must look like 'section.key'");
      if (value.empty())
        fail(std::string(what) + " line " + std::to_string(lineno) + ": empty value for '" +
             key + "'");
      if (!entries_.emplace(key, value).second)
        fail(std::string(what) + " line " + std::to_string(lineno) + ": duplicate key '" +
             key + "'");
    }
  }

  std::optional<std::string> take(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    std::string value = it->second;
    entries_.erase(it);
    return value;
  }

  std::string require(const std::string& key) {
    auto v = take(key);
    if (!v) fail("missing required config key '" + key + "'");
    return *v;
  }

  void reject_leftovers(const char* what) const {
    if (entries_.empty()) return;
    std::string keys;
    for (const auto& [k, v] : entries_) keys += (keys.empty() ? "" : ", ") + k;
    fail(std::string(what) + ": unknown key(s): " + keys);
  }

 private:
  std::map<std::string, std::string> entries_;
};

double parse_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) fail_key(key, "trailing characters after number '" + text + "'");
    if (!std::isfinite(v)) fail_key(key, "value must be finite");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail_key(key, "cannot parse number from '" + text + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size())
    fail_key(key, "cannot parse integer from '" + text + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size())
    fail_key(key, "cannot parse unsigned integer from '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  fail_key(key, "expected a boolean, got '" + text + "'");
}

// Split "value [suffix]" where the suffix is the non-numeric tail.
std::pair<double, std::string> parse_suffixed(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    fail_key(key, "cannot parse number from '" + text + "'");
  }
  if (!std::isfinite(v)) fail_key(key, "value must be finite");
  return {v, trim(text.substr(used))};
}

// Lengths are stored in micrometres; times share the unit since c = 1.
double parse_length(const std::string& key, const std::string& text) {
  const auto [v, suffix] = parse_suffixed(key, text);
  if (suffix.empty() || suffix == "um" || suffix == "µm") return v;
  if (suffix == "nm") return v * 1e-3;
  if (suffix == "mm") return v * 1e3;
  if (suffix == "m") return v * 1e6;
  fail_key(key, "unknown length unit '" + suffix + "' (use um, nm, mm or m)");
}

double parse_angle(const std::string& key, const std::string& text) {
  const auto [v, suffix] = parse_suffixed(key, text);
  if (suffix.empty() || suffix == "rad") return v;
  if (suffix == "deg") return v * std::numbers::pi / 180.0;
  fail_key(key, "unknown angle unit '" + suffix + "' (use rad or deg)");
}

// e^2 accepts a convention name or an explicit positive number.
std::pair<double, std::string> parse_coupling(const std::string& key, const std::string& text) {
  if (text == "gaussian") return {kGaussianCoupling, "gaussian"};
  if (text == "heaviside") return {kHeavisideLorentzCoupling, "heaviside"};
  const double v = parse_number(key, text);
  if (v <= 0.0) fail_key(key, "coupling must be positive");
  return {v, "custom"};
}

SpMode parse_mode(const std::string& key, const std::string& text) {
  if (text == "approx" || text == "approximate") return SpMode::approximate;
  if (text == "full") return SpMode::full;
  fail_key(key, "expected 'approx' or 'full', got '" + text + "'");
}

} // namespace

const char* parameter_name(SweepSpec::Parameter p) {
  switch (p) {
    case SweepSpec::Parameter::r_over_tau: return "R_over_tau";
    case SweepSpec::Parameter::tz_over_tau: return "Tz_over_tau";
    case SweepSpec::Parameter::grooves: return "N";
    case SweepSpec::Parameter::theta: return "theta";
    case SweepSpec::Parameter::v_y: return "v_y";
  }
  return "?";
}

ExperimentConfig parse_config(std::istream& in, const ConfigOverrides& overrides) {
  KeyValues kv(in, "config");

  const long long grooves = parse_integer("grating.grooves", kv.require("grating.grooves"));
  if (grooves < 1 || grooves > 10'000'000) fail_key("grating.grooves", "must lie in [1, 1e7]");
  const double half_period = parse_length("grating.half_period", kv.require("grating.half_period"));
  const double depth = parse_length("grating.depth", kv.require("grating.depth"));
  const double slope_angle = parse_angle("grating.slope_angle", kv.require("grating.slope_angle"));

  const double v_y = parse_number("beam.v_y", kv.require("beam.v_y"));
  const double separation = parse_length("beam.separation", kv.require("beam.separation"));
  const double height = parse_length("beam.height", kv.require("beam.height"));
  const long long epsilon = parse_integer("beam.epsilon", kv.require("beam.epsilon"));
  if (epsilon < -1 || epsilon > 1) fail_key("beam.epsilon", "must be -1, 0 or +1");

  double e2 = 0.0;
  std::string convention;
  if (overrides.preset_e2) {
    std::tie(e2, convention) = parse_coupling("--preset-e2", *overrides.preset_e2);
    if (convention == "custom") fail("--preset-e2 accepts 'gaussian' or 'heaviside'");
    kv.take("beam.e2");  // overridden; still accepted in the file
  } else {
    std::tie(e2, convention) = parse_coupling("beam.e2", kv.require("beam.e2"));
  }

  double w_plane = 0.0;
  if (const auto v = kv.take("model.w_plane")) w_plane = parse_number("model.w_plane", *v);
  if (!(std::isfinite(w_plane) && w_plane >= 0.0)) fail_key("model.w_plane", "must be >= 0");

  SpMode mode = SpMode::approximate;
  if (const auto v = kv.take("model.mode")) mode = parse_mode("model.mode", *v);
  if (overrides.mode) mode = *overrides.mode;

  bool attenuate = false;
  if (const auto v = kv.take("model.attenuate")) attenuate = parse_bool("model.attenuate", *v);
  if (overrides.attenuate) attenuate = true;

  std::uint64_t seed = 1;
  if (const auto v = kv.take("model.seed")) seed = parse_u64("model.seed", *v);
  if (overrides.seed) seed = *overrides.seed;

  QuadratureSpec quad;
  if (const auto v = kv.take("quad.rel_tol")) quad.rel_tol = parse_number("quad.rel_tol", *v);
  if (const auto v = kv.take("quad.abs_tol")) quad.abs_tol = parse_number("quad.abs_tol", *v);
  if (quad.rel_tol < 0 || quad.abs_tol < 0 || (quad.rel_tol == 0 && quad.abs_tol == 0))
    fail("quad tolerances: need rel_tol > 0 or abs_tol > 0, neither negative");
  if (const auto v = kv.take("quad.max_subdivisions")) {
    const long long n = parse_integer("quad.max_subdivisions", *v);
    if (n < 64) fail_key("quad.max_subdivisions", "must be at least 64");
    quad.max_subdivisions = n;
  }
  if (const auto v = kv.take("quad.omega_max")) {
    const double w = parse_number("quad.omega_max", *v);
    if (w <= 0) fail_key("quad.omega_max", "must be positive");
    quad.omega_max = w;
  }

  double warn_ratio = 0.2;
  if (const auto v = kv.take("quad.proximity_warn_ratio"))
    warn_ratio = parse_number("quad.proximity_warn_ratio", *v);
  if (!(warn_ratio > 0 && warn_ratio <= 1)) fail_key("quad.proximity_warn_ratio", "must lie in (0, 1]");

  std::string output_path;
  if (const auto v = kv.take("output.path")) output_path = *v;

  kv.reject_leftovers("config");

  try {
    return ExperimentConfig{GratingGeometry(int(grooves), half_period, depth, slope_angle),
                            BeamConfig(v_y, separation, height, int(epsilon), e2),
                            w_plane,
                            mode,
                            attenuate,
                            seed,
                            quad,
                            warn_ratio,
                            convention,
                            output_path};
  } catch (const std::invalid_argument& e) {
    fail(std::string("invalid configuration: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path + "'");
  return parse_config(in, overrides);
}

SweepSpec parse_sweep(std::istream& in) {
  KeyValues kv(in, "sweep");
  SweepSpec spec;

  const std::string name = kv.require("sweep.parameter");
  if (name == "R_over_tau") spec.parameter = SweepSpec::Parameter::r_over_tau;
  else if (name == "Tz_over_tau") spec.parameter = SweepSpec::Parameter::tz_over_tau;
  else if (name == "N") spec.parameter = SweepSpec::Parameter::grooves;
  else if (name == "theta") spec.parameter = SweepSpec::Parameter::theta;
  else if (name == "v_y") spec.parameter = SweepSpec::Parameter::v_y;
  else fail_key("sweep.parameter", "unknown parameter '" + name + "'");

  spec.min = parse_number("sweep.min", kv.require("sweep.min"));
  spec.max = parse_number("sweep.max", kv.require("sweep.max"));
  if (!(spec.min < spec.max)) fail("sweep grid: min must be < max");

  const long long count = parse_integer("sweep.count", kv.require("sweep.count"));
  if (count < 2 || count > 1'000'000) fail_key("sweep.count", "must lie in [2, 1e6]");
  spec.count = int(count);

  if (const auto v = kv.take("sweep.scale")) {
    if (*v == "linear") spec.log_scale = false;
    else if (*v == "log") spec.log_scale = true;
    else fail_key("sweep.scale", "expected 'linear' or 'log'");
  }
  if (spec.log_scale && spec.min <= 0.0) fail("sweep grid: log scale needs min > 0");

  if (const auto v = kv.take("sweep.per_epsilon"))
    spec.per_epsilon = parse_bool("sweep.per_epsilon", *v);

  kv.reject_leftovers("sweep");
  return spec;
}

SweepSpec load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open sweep file '" + path + "'");
  return parse_sweep(in);
}

} // namespace spdecohere
