#include "spdecohere/report.hpp"

#include <charconv>
#include <fstream>
#include <iostream>

#include "spdecohere/version.hpp"

namespace spdecohere {

using nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, end);
}

ordered_json config_json(const ExperimentConfig& c) {
  ordered_json j;
  j["grating"] = {{"grooves", c.grating.grooves},
                  {"half_period_um", c.grating.half_period},
                  {"depth_um", c.grating.depth},
                  {"slope_angle_rad", c.grating.slope_angle}};
  j["beam"] = {{"v_y", c.beam.v_y},
               {"separation_um", c.beam.separation},
               {"height_um", c.beam.height},
               {"epsilon", c.beam.epsilon},
               {"e2", c.beam.e2}};
  j["model"] = {{"w_plane", c.w_plane},
                {"mode", c.mode == SpMode::full ? "full" : "approx"},
                {"attenuate", c.attenuate},
                {"seed", c.seed}};
  ordered_json quad = {{"rel_tol", c.quad.rel_tol},
                       {"abs_tol", c.quad.abs_tol},
                       {"max_subdivisions", c.quad.max_subdivisions}};
  if (c.quad.omega_max) quad["omega_max"] = *c.quad.omega_max;
  quad["proximity_warn_ratio"] = c.proximity_warn_ratio;
  j["quad"] = quad;
  return j;
}

ordered_json quadrature_json(const SpectralIntegral& q) {
  return {{"value", q.value},
          {"error_estimate", q.error_estimate},
          {"tolerance_met", q.tolerance_met},
          {"panels", q.panels},
          {"omega_cutoff", q.omega_cutoff},
          {"tail_bound", q.tail_bound}};
}

ordered_json breakdown_json(const DecoherenceBreakdown& b) {
  ordered_json j;
  j["grooves"] = b.grooves;
  j["epsilon"] = b.epsilon;
  j["e2"] = b.e2;
  j["v_z"] = b.v_z;
  j["tau_z_um"] = b.tau_z;
  j["t_z_um"] = b.t_z;
  j["w_half_zz"] = b.w_half_zz;
  if (b.w_bb_zz) j["w_bb_zz"] = *b.w_bb_zz;
  j["eta_closed"] = b.eta_closed;
  if (b.eta_timedomain) j["eta_timedomain"] = *b.eta_timedomain;
  j["w_plane"] = b.w_plane;
  if (b.attenuation) j["attenuation"] = *b.attenuation;
  j["delta_w"] = b.delta_w;
  j["w_sp"] = b.w_sp;
  j["visibility"] = b.visibility;
  j["eta_over_2n_w_half"] = b.eta_over_2n_whalf;
  j["dropped_shift_scale"] = b.dropped_shift_scale;
  return j;
}

namespace {

ordered_json flags_json(const ValidityFlags& f) {
  return {{"proximity_height_ok", f.proximity_height_ok},
          {"proximity_depth_ok", f.proximity_depth_ok},
          {"separation_height_ok", f.separation_height_ok},
          {"separation_window_ok", f.separation_window_ok},
          {"subluminal_ok", f.subluminal_ok},
          {"v_y_small_ok", f.v_y_small_ok}};
}

} // namespace

ordered_json compute_report(const ExperimentConfig& config, const DecoherenceBreakdown& b) {
  ordered_json j;
  j["tool"] = "spdecohere";
  j["version"] = kVersion;
  j["command"] = "compute";
  j["config"] = config_json(config);
  j["coupling"] = {{"value", b.e2}, {"convention", config.e2_convention}};
  j["breakdown"] = breakdown_json(b);
  ordered_json quad;
  quad["w_half_zz"] = quadrature_json(b.w_half_quadrature);
  if (b.w_bb_quadrature) quad["w_bb_zz"] = quadrature_json(*b.w_bb_quadrature);
  j["quadrature"] = quad;
  j["flags"] = flags_json(b.flags);

  ordered_json notes = ordered_json::array();
  notes.push_back(
      "Results scale linearly in e^2; the coupling convention only rescales W. "
      "Conventions shipped: gaussian (e^2 = alpha) and heaviside (e^2 = 4*pi*alpha).");
  notes.push_back(
      "Reference point: for the canonical 1000-groove scenario a previously published "
      "estimate quotes an overlap factor |F| ~ 0.42 (W ~ 0.867). Formula-level evaluation "
      "of the same closed forms does not reproduce that number under either standard "
      "coupling convention; this tool reports the formula-level value.");
  if (!b.flags.proximity_height_ok)
    notes.push_back("Proximity warning: beam height is not small against the half period.");
  if (!b.flags.proximity_depth_ok)
    notes.push_back("Proximity warning: groove depth is not small against the half period.");
  if (!b.flags.separation_height_ok)
    notes.push_back("Image-pair warning: height exceeds the requested fraction of the path "
                    "separation, so the two image tracks are not cleanly resolved.");
  if (!b.flags.separation_window_ok)
    notes.push_back("Validity violation: 2R >= T_z(1 - v_y); correlated-path interference "
                    "terms overlap adjacent grooves and the epsilon != 0 result is suspect.");
  if (!b.flags.subluminal_ok)
    notes.push_back("Validity violation: image peak speed reaches c; treat results as "
                    "formal continuations only.");
  if (!b.flags.v_y_small_ok)
    notes.push_back("The nonrelativistic reduction assumes v_y small; dropped terms scale "
                    "with v_y times the quoted shift scale.");
  j["diagnostics"] = {{"notes", notes}};
  return j;
}

ordered_json error_report(const std::string& type, const std::string& message) {
  ordered_json j;
  j["tool"] = "spdecohere";
  j["version"] = kVersion;
  j["error"] = {{"type", type}, {"message", message}};
  return j;
}

void write_text(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << body;
  out.flush();
  if (!out) throw ConfigError("failed writing output file '" + path + "'");
}

} // namespace spdecohere
