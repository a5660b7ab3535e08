#include "spdecohere/cli_commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "spdecohere/oracle.hpp"
#include "spdecohere/report.hpp"
#include "spdecohere/version.hpp"

namespace spdecohere {

namespace {

using nlohmann::ordered_json;

ConfigOverrides overrides_from(const GlobalOptions& options) {
  ConfigOverrides o;
  o.seed = options.seed;
  if (!options.preset_e2.empty()) o.preset_e2 = options.preset_e2;
  if (!options.mode.empty()) {
    if (options.mode == "approx" || options.mode == "approximate")
      o.mode = SpMode::approximate;
    else if (options.mode == "full")
      o.mode = SpMode::full;
    else
      throw ConfigError("--mode accepts 'approx' or 'full'");
  }
  o.attenuate = options.attenuate;
  return o;
}

std::string choose_output(const GlobalOptions& options, const ExperimentConfig& config) {
  return options.out_path.empty() ? config.output_path : options.out_path;
}

int thread_budget(long long jobs) {
  int n = 0;
  if (const char* env = std::getenv("SPDECOHERE_THREADS")) n = std::atoi(env);
  if (n <= 0) n = int(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  return int(std::min<long long>(n, jobs));
}

// Run fn(0..jobs-1) on the thread budget; rethrows the first failure.
template <class Fn>
void run_jobs(long long jobs, Fn&& fn) {
  const int workers = thread_budget(jobs);
  if (workers <= 1) {
    for (long long i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<long long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (long long i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(jobs);
          break;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// One sweep grid point remapped onto the base scenario.
struct GridScenario {
  double param;  // echoed value (rounded for integer parameters)
  GratingGeometry grating;
  BeamConfig beam;
};

GridScenario scenario_for(const ExperimentConfig& cfg, SweepSpec::Parameter p, double x) {
  const GratingGeometry& g = cfg.grating;
  const BeamConfig& b = cfg.beam;
  const double v_z = b.v_y * std::tan(g.slope_angle);
  const double tau_z = v_z > 0.0 ? g.depth / v_z : 0.0;
  switch (p) {
    case SweepSpec::Parameter::r_over_tau: {
      if (tau_z <= 0.0) throw ConfigError("R_over_tau sweep needs a non-flat grating");
      return {x, g, BeamConfig(b.v_y, x * tau_z, b.height, b.epsilon, b.e2)};
    }
    case SweepSpec::Parameter::tz_over_tau: {
      if (tau_z <= 0.0) throw ConfigError("Tz_over_tau sweep needs a non-flat grating");
      const double d = x * tau_z * b.v_y;  // T_z = d / v_y
      return {x, GratingGeometry(g.grooves, d, g.depth, g.slope_angle), b};
    }
    case SweepSpec::Parameter::grooves: {
      const long long n = std::llround(x);
      if (n < 1) throw ConfigError("N sweep produced a groove count below 1");
      return {double(n), GratingGeometry(int(n), g.half_period, g.depth, g.slope_angle), b};
    }
    case SweepSpec::Parameter::theta:
      return {x, GratingGeometry(g.grooves, g.half_period, g.depth, x), b};
    case SweepSpec::Parameter::v_y:
      return {x, g, BeamConfig(x, b.separation, b.height, b.epsilon, b.e2)};
  }
  throw ConfigError("unknown sweep parameter");
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
  std::vector<double> xs(std::size_t(spec.count));
  for (int i = 0; i < spec.count; ++i) {
    const double f = double(i) / double(spec.count - 1);
    xs[std::size_t(i)] = spec.log_scale
                             ? spec.min * std::pow(spec.max / spec.min, f)
                             : spec.min + (spec.max - spec.min) * f;
  }
  return xs;
}

struct SweepRow {
  double param = 0.0;
  int epsilon = 0;
  double w_half = 0.0;
  double ratio = 0.0;
  double err = 0.0;
  double w_bb = 0.0;        // full mode only
  double w_bb_ratio = 0.0;  // full mode only
};

} // namespace

int cmd_compute(const GlobalOptions& options) {
  std::string out_path;
  try {
    const ExperimentConfig cfg = load_config(options.config_path, overrides_from(options));
    out_path = choose_output(options, cfg);
    const DecoherenceBreakdown b =
        w_sp(cfg.grating, cfg.beam, cfg.w_plane, cfg.mode, cfg.attenuate, cfg.quad,
             cfg.proximity_warn_ratio);
    write_text(out_path, compute_report(cfg, b).dump(2) + "\n");
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << error_report("config", e.what()).dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << error_report("compute", e.what()).dump(2) << "\n";
    return 2;
  }
}

int cmd_sweep(const GlobalOptions& options) {
  try {
    const ExperimentConfig cfg = load_config(options.config_path, overrides_from(options));
    if (options.sweep_path.empty()) throw ConfigError("sweep requires --sweep <path>");
    const SweepSpec spec = load_sweep(options.sweep_path);
    const std::string out_path = choose_output(options, cfg);
    const bool full = cfg.mode == SpMode::full;

    const std::vector<double> xs = sweep_grid(spec);
    std::vector<GridScenario> scenarios;
    scenarios.reserve(xs.size());
    for (const double x : xs) scenarios.push_back(scenario_for(cfg, spec.parameter, x));

    const std::vector<int> eps_list =
        spec.per_epsilon ? std::vector<int>{-1, 0, 1} : std::vector<int>{cfg.beam.epsilon};

    std::vector<std::vector<SweepRow>> rows(scenarios.size());
    run_jobs(static_cast<long long>(scenarios.size()), [&](long long i) {
      const GridScenario& sc = scenarios[std::size_t(i)];
      const GratingTraversal traversal =
          profile_from_grating(sc.grating, sc.beam, cfg.proximity_warn_ratio);
      const SpectralTransform transform(traversal.profile);
      const WResult base =
          w_half_zz(transform, sc.beam.separation, 0, sc.beam.e2, cfg.quad);
      auto& out = rows[std::size_t(i)];
      for (const int eps : eps_list) {
        const WResult w = eps == 0 ? base
                                   : w_half_zz(transform, sc.beam.separation, eps,
                                               sc.beam.e2, cfg.quad);
        SweepRow row;
        row.param = sc.param;
        row.epsilon = eps;
        row.w_half = w.value;
        row.ratio = base.value != 0.0 ? w.value / base.value : (eps == 0 ? 1.0 : 0.0);
        row.err = w.quadrature.error_estimate;
        if (full) {
          const WResult bb = w_bb_zz_full(transform, sc.beam.separation, eps,
                                          sc.grating.grooves, traversal.t_z, sc.beam.e2,
                                          cfg.quad, sc.beam.v_y);
          row.w_bb = bb.value;
          const double denom = 2.0 * double(sc.grating.grooves) * w.value;
          row.w_bb_ratio = denom != 0.0 ? bb.value / denom : 0.0;
        }
        out.push_back(row);
      }
    });

    std::string csv = "param,epsilon,w_half_zz,w_half_zz_over_eps0,err_estimate";
    if (full) csv += ",w_bb_zz,w_bb_over_2n_w_half";
    csv += "\n";
    for (const auto& point : rows)
      for (const SweepRow& r : point) {
        csv += format_double(r.param);
        csv += ',';
        csv += std::to_string(r.epsilon);
        csv += ',';
        csv += format_double(r.w_half);
        csv += ',';
        csv += format_double(r.ratio);
        csv += ',';
        csv += format_double(r.err);
        if (full) {
          csv += ',';
          csv += format_double(r.w_bb);
          csv += ',';
          csv += format_double(r.w_bb_ratio);
        }
        csv += '\n';
      }
    write_text(out_path, csv);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << error_report("config", e.what()).dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << error_report("compute", e.what()).dump(2) << "\n";
    return 2;
  }
}

int cmd_convergence(const GlobalOptions& options) {
  try {
    const ExperimentConfig cfg = load_config(options.config_path, overrides_from(options));
    const std::string out_path = choose_output(options, cfg);

    const double final_tol = cfg.quad.rel_tol;
    std::vector<double> ladder;
    for (const double t : {1e-4, 1e-5, 1e-6, 1e-7})
      if (t > final_tol) ladder.push_back(t);
    ladder.push_back(final_tol);

    struct Rung {
      double tol;
      DecoherenceBreakdown breakdown;
    };
    std::vector<Rung> rungs;
    for (const double tol : ladder) {
      QuadratureSpec quad = cfg.quad;
      quad.rel_tol = tol;
      rungs.push_back({tol, w_sp(cfg.grating, cfg.beam, cfg.w_plane, cfg.mode, cfg.attenuate,
                                 quad, cfg.proximity_warn_ratio)});
    }
    const DecoherenceBreakdown& final_b = rungs.back().breakdown;

    ordered_json j;
    j["tool"] = "spdecohere";
    j["version"] = kVersion;
    j["command"] = "convergence";
    j["config"] = config_json(cfg);

    const GratingTraversal traversal =
        profile_from_grating(cfg.grating, cfg.beam, cfg.proximity_warn_ratio);
    const bool zero_amplitude = traversal.v_z == 0.0;
    j["zero_amplitude"] = zero_amplitude;

    bool stable = true;
    ordered_json ladder_json = ordered_json::array();
    for (const Rung& r : rungs) {
      const double delta = std::abs(r.breakdown.w_sp - final_b.w_sp);
      const bool within = delta <= 10.0 * r.tol * std::abs(final_b.w_sp);
      stable = stable && within;
      ladder_json.push_back({{"rel_tol", r.tol},
                             {"w_sp", r.breakdown.w_sp},
                             {"visibility", r.breakdown.visibility},
                             {"w_half_zz", r.breakdown.w_half_zz},
                             {"err_estimate", r.breakdown.w_half_quadrature.error_estimate},
                             {"delta_vs_final", delta},
                             {"within_10x_tol", within}});
    }
    j["ladder"] = ladder_json;
    j["stable"] = stable;

    // oracle agreement on the single-steep quantity the oracles compute
    const double ref = final_b.w_half_zz;
    ordered_json mc_json = ordered_json::array();
    for (const long long samples : {100'000LL, 1'000'000LL}) {
      const OracleResult mc = mc_w1osc(traversal.profile, cfg.beam.separation,
                                       cfg.beam.epsilon, cfg.beam.e2, samples, cfg.seed);
      const double dev = std::abs(mc.estimate - ref);
      const bool within = dev <= 3.0 * mc.std_error || dev == 0.0;
      mc_json.push_back({{"samples", samples},
                         {"estimate", mc.estimate},
                         {"std_error", mc.std_error},
                         {"abs_dev", dev},
                         {"sigmas", mc.std_error > 0.0 ? dev / mc.std_error : 0.0},
                         {"within_3_sigma", within}});
    }
    const double nested_tol = 1e-6;
    const OracleResult nested =
        nested_w1osc(traversal.profile, cfg.beam.separation, cfg.beam.epsilon, cfg.beam.e2,
                     nested_tol);
    const double nested_dev =
        ref != 0.0 ? std::abs(nested.estimate - ref) / std::abs(ref)
                   : std::abs(nested.estimate);
    j["oracles"] = {{"reference_w_half_zz", ref},
                    {"mc", mc_json},
                    {"nested",
                     {{"tol", nested_tol},
                      {"estimate", nested.estimate},
                      {"error_bound", nested.std_error},
                      {"rel_dev", nested_dev},
                      {"within_1e5_rel", nested_dev <= 1e-5}}}};

    write_text(out_path, j.dump(2) + "\n");
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << error_report("config", e.what()).dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << error_report("compute", e.what()).dump(2) << "\n";
    return 2;
  }
}

} // namespace spdecohere
