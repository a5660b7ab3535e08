#include "spdecohere/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace spdecohere {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

} // namespace

double angular_kernel(double a) {
  require(std::isfinite(a), "angular kernel argument must be finite");
  const double x = std::abs(a);
  if (x < 0.5) {
    // 4*pi * sum t_n with t_0 = 2/3 and the term ratio below; converges in a
    // handful of terms and avoids the 1/a^2 cancellation of the closed form.
    double term = 2.0 / 3.0;
    double sum = term;
    const double a2 = x * x;
    for (int n = 0; n < 12; ++n) {
      term *= -a2 * double(2 * n + 4) /
              (double(2 * n + 2) * double(2 * n + 2) * double(2 * n + 5));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return 4.0 * kPi * sum;
  }
  const double s = std::sin(x);
  const double c = std::cos(x);
  return 4.0 * kPi * (s / x + c / (x * x) - s / (x * x * x));
}

double groove_sum(double kappa, int grooves, double pole_halfwidth) {
  require(grooves >= 1, "groove count must be at least 1");
  require(std::isfinite(kappa), "groove sum argument must be finite");
  require(pole_halfwidth > 0.0 && pole_halfwidth < 0.1, "pole halfwidth must lie in (0, 0.1)");

  // Near a peak the value is ~4N^2 and d(ratio)/d(delta) is ~N, so a double
  // reduction of kappa would already cost ~N*eps*kappa in relative accuracy.
  // Extended precision keeps the result honest for large N and large kappa.
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double n = (long double)grooves;
  // distance to the nearest odd multiple of pi, wrapped to [-pi, pi]
  const long double wrapped = remainderl((long double)kappa, 2.0L * pi);
  long double delta = wrapped - pi;
  if (delta < -pi) delta += 2.0L * pi;
  const double limit = double(4.0L * n * n);
  long double value;
  if (fabsl(delta) < (long double)pole_halfwidth) {
    // quadratic expansion about the constructive peak, exact limit 4 N^2
    value = 4.0L * n * n * (1.0L - (4.0L * n * n - 1.0L) * delta * delta / 12.0L);
  } else {
    const long double ratio = sinl(n * delta) / sinl(0.5L * delta);
    value = ratio * ratio;
  }
  return std::clamp(double(value), 0.0, limit);
}

// ---------------------------------------------------------------------------
// 15-point Kronrod rule with embedded 7-point Gauss (classic dqk15 layout).
// ---------------------------------------------------------------------------

namespace {

constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

struct Panel {
  double value = 0.0;
  double error = 0.0;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);

  double fv1[7], fv2[7];
  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);

  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double absc = hlgth * kXgk[jtw];
    fv1[jtw] = f(center - absc);
    fv2[jtw] = f(center + absc);
    const double fsum = fv1[jtw] + fv2[jtw];
    resg += kWg[j] * fsum;
    resk += kWgk[jtw] * fsum;
    resabs += kWgk[jtw] * (std::abs(fv1[jtw]) + std::abs(fv2[jtw]));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double absc = hlgth * kXgk[jtwm1];
    fv1[jtwm1] = f(center - absc);
    fv2[jtwm1] = f(center + absc);
    const double fsum = fv1[jtwm1] + fv2[jtwm1];
    resk += kWgk[jtwm1] * fsum;
    resabs += kWgk[jtwm1] * (std::abs(fv1[jtwm1]) + std::abs(fv2[jtwm1]));
  }

  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

  Panel out;
  out.value = resk * hlgth;
  resabs *= std::abs(hlgth);
  resasc *= std::abs(hlgth);
  out.error = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && out.error != 0.0)
    out.error = resasc * std::min(1.0, std::pow(200.0 * out.error / resasc, 1.5));
  if (resabs > kTiny / (50.0 * kEps))
    out.error = std::max(50.0 * kEps * resabs, out.error);
  return out;
}

struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Streaming adaptive driver: panels are refined depth-first and folded into
// running sums immediately, so memory stays O(recursion depth) no matter how
// hard the integrand is.
class AdaptiveDriver {
 public:
  AdaptiveDriver(const std::function<double(double)>& f, long long budget, double osc_cap)
      : f_(f), budget_(budget), osc_cap_(osc_cap) {}

  // Integrate [a, b] splitting first at the supplied interior seeds, refining
  // until each panel's error is below share_per_width * width.
  Panel region(double a, double b, const std::vector<double>& seeds, double share_per_width) {
    Kahan value;
    double error = 0.0;
    double lo = a;
    auto run = [&](double x0, double x1) {
      if (x1 <= x0) return;
      Panel p = evaluate(x0, x1);
      refine(x0, x1, p, share_per_width, 0, value, error);
    };
    for (double s : seeds) {
      if (s <= lo || s >= b) continue;
      run(lo, s);
      lo = s;
    }
    run(lo, b);
    return {value.sum, error};
  }

  long long panels_used() const { return panels_; }
  bool budget_exhausted() const { return exhausted_; }

 private:
  Panel evaluate(double a, double b) {
    ++panels_;
    return gk15(f_, a, b);
  }

  void refine(double a, double b, const Panel& p, double spw, int depth, Kahan& value,
              double& error) {
    const double width = b - a;
    const double target = spw * width;
    const bool width_ok = osc_cap_ <= 0.0 || width <= osc_cap_;
    // a panel wider than the oscillation guard may only pass with a much
    // stricter error, so aliased oscillations cannot slip through
    const bool accept = (p.error <= target && width_ok) || p.error <= 0.02 * target;
    if (accept || depth >= kMaxDepth || panels_ >= budget_) {
      if (!accept && panels_ >= budget_) exhausted_ = true;
      value.add(p.value);
      error += p.error;
      return;
    }
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) {  // interval no longer splittable in fp
      value.add(p.value);
      error += p.error;
      return;
    }
    const Panel left = evaluate(a, mid);
    const Panel right = evaluate(mid, b);
    refine(a, mid, left, spw, depth + 1, value, error);
    refine(mid, b, right, spw, depth + 1, value, error);
  }

  static constexpr int kMaxDepth = 60;
  const std::function<double(double)>& f_;
  long long budget_;
  double osc_cap_;
  long long panels_ = 0;
  bool exhausted_ = false;
};

std::vector<double> resonance_seeds(const IntegrandHints& hints, double lo, double hi,
                                    std::size_t max_seeds) {
  std::vector<double> seeds;
  if (hints.resonance_first > 0.0 && hi > hints.resonance_first) {
    const double spacing = hints.resonance_spacing;
    if (spacing > 0.0) {
      const double first_idx = std::ceil((lo - hints.resonance_first) / spacing);
      const long long j0 = std::max(0LL, (long long)first_idx);
      const long long count = (long long)((hi - hints.resonance_first) / spacing) - j0 + 1;
      if (count > 0) {
        const long long stride = std::max(1LL, count / (long long)max_seeds);
        for (long long j = j0; ; j += stride) {
          const double s = hints.resonance_first + double(j) * spacing;
          if (s >= hi) break;
          if (s > lo) seeds.push_back(s);
          if (seeds.size() >= max_seeds) break;
        }
      }
    } else if (hints.resonance_first > lo && hints.resonance_first < hi) {
      seeds.push_back(hints.resonance_first);
    }
  }
  return seeds;
}

} // namespace

SpectralIntegral integrate_spectral(const std::function<double(double)>& f,
                                    const QuadratureSpec& spec, const IntegrandHints& hints) {
  require(spec.rel_tol >= 0.0 && spec.abs_tol >= 0.0 && (spec.rel_tol > 0.0 || spec.abs_tol > 0.0),
          "quadrature needs a positive relative or absolute tolerance");
  require(spec.max_subdivisions >= 64, "quadrature panel budget is unreasonably small");
  require(!spec.omega_max || *spec.omega_max > 0.0, "omega_max must be positive when given");
  require(hints.tail_c >= 0.0, "tail bound coefficient must be non-negative");
  require(hints.tail_c == 0.0 || hints.tail_power >= 2,
          "tail bound needs an integrand decay power of at least 2");
  require(hints.omega_break >= 0.0 && hints.oscillation_scale >= 0.0 &&
              hints.resonance_first >= 0.0 && hints.resonance_spacing >= 0.0,
          "integrand hints must be non-negative");

  double head_end = hints.omega_break > 0.0
                        ? hints.omega_break
                        : (spec.omega_max ? *spec.omega_max : 1.0);
  if (spec.omega_max) head_end = std::min(head_end, *spec.omega_max);
  const bool clipped = spec.omega_max && head_end >= *spec.omega_max;
  const double osc_cap = hints.oscillation_scale > 0.0 ? 4.0 * hints.oscillation_scale : 0.0;

  AdaptiveDriver driver(f, spec.max_subdivisions, osc_cap);

  // --- probe pass: cheap estimate of the magnitude to set the error target
  double probe_abs = 0.0;
  double probe_val = 0.0;
  {
    auto seeds = resonance_seeds(hints, 0.0, head_end, 512);
    std::size_t panels = std::max<std::size_t>(32, std::min<std::size_t>(seeds.size() * 2, 1024));
    double lo = 0.0;
    std::size_t si = 0;
    for (std::size_t i = 1; i <= panels; ++i) {
      double hi = head_end * double(i) / double(panels);
      while (si < seeds.size() && seeds[si] <= hi) {
        if (seeds[si] > lo) {
          Panel p = gk15(f, lo, seeds[si]);
          probe_val += p.value;
          probe_abs += std::abs(p.value);
          lo = seeds[si];
        }
        ++si;
      }
      if (hi > lo) {
        Panel p = gk15(f, lo, hi);
        probe_val += p.value;
        probe_abs += std::abs(p.value);
        lo = hi;
      }
    }
  }

  if (probe_abs == 0.0 && hints.tail_c == 0.0) {
    // nothing anywhere the probe looked and no declared tail: identically zero
    SpectralIntegral out;
    out.omega_cutoff = head_end;
    return out;
  }

  const double user_target = std::max(spec.abs_tol, spec.rel_tol * std::abs(probe_val));
  const double target = std::max(0.5 * user_target, 1e-300);

  auto run_pass = [&](double tighten) -> SpectralIntegral {
    Kahan value;
    double error = 0.0;
    SpectralIntegral out;

    // head region gets 40% of the error budget
    {
      auto seeds = resonance_seeds(hints, 0.0, head_end, 1u << 16);
      const double budget = 0.4 * target * tighten;
      Panel head = driver.region(0.0, head_end, seeds, budget / head_end);
      value.add(head.value);
      error += head.error;
    }

    double omega = head_end;
    out.omega_cutoff = omega;

    if (!clipped) {
      // geometric tail blocks, each with a shrinking share of the budget
      double prev_block = std::numeric_limits<double>::infinity();
      int small_blocks = 0;
      int stuck_blocks = 0;
      double block_budget = 0.2 * target * tighten;
      for (int k = 0; k < 1024; ++k) {
        if (hints.tail_c > 0.0) {
          const double bound = hints.tail_c / (double(hints.tail_power - 1) *
                                               std::pow(omega, hints.tail_power - 1));
          if (bound <= 0.5 * target) {
            error += bound;
            out.tail_bound = bound;
            break;
          }
        }
        double next = 2.0 * omega;
        bool clip_block = false;
        if (spec.omega_max && next >= *spec.omega_max) {
          next = *spec.omega_max;
          clip_block = true;
        }
        auto seeds = resonance_seeds(hints, omega, next, 1u << 16);
        Panel block = driver.region(omega, next, seeds, block_budget / (next - omega));
        value.add(block.value);
        error += block.error;
        omega = next;
        out.omega_cutoff = omega;
        if (clip_block) break;
        if (driver.budget_exhausted()) break;

        const double mag = std::abs(block.value);
        if (mag <= 0.25 * target && mag <= prev_block) {
          if (++small_blocks >= 2) {
            error += 2.0 * mag;
            out.tail_bound = 2.0 * mag;
            break;
          }
        } else {
          small_blocks = 0;
        }
        if (mag >= prev_block && mag > 0.25 * target) {
          if (++stuck_blocks >= 8)
            throw NonConvergentError(
                "spectral integral: tail contributions failed to decay over eight octaves");
        } else {
          stuck_blocks = 0;
        }
        prev_block = mag;
        block_budget = std::max(0.5 * block_budget, 1e-300);
      }
    } else if (hints.tail_c > 0.0) {
      out.tail_bound = hints.tail_c / (double(hints.tail_power - 1) *
                                       std::pow(omega, hints.tail_power - 1));
    }

    out.value = value.sum;
    out.error_estimate = error;
    return out;
  };

  SpectralIntegral result = run_pass(1.0);
  auto met = [&](const SpectralIntegral& r) {
    return r.error_estimate <= std::max(spec.abs_tol, spec.rel_tol * std::abs(r.value));
  };
  if (!met(result) && !driver.budget_exhausted()) {
    // one retry with the per-panel shares tightened by the observed shortfall
    const double shortfall =
        std::max(spec.abs_tol, spec.rel_tol * std::abs(result.value)) /
        std::max(result.error_estimate, 1e-300);
    SpectralIntegral second = run_pass(std::max(0.25 * shortfall, 1e-3));
    // an exhausted retry left coarse panels whose estimates may alias small;
    // keep the completed first pass in that case
    if (!driver.budget_exhausted() && second.error_estimate < result.error_estimate)
      result = second;
  }

  result.panels = driver.panels_used();
  result.tolerance_met = met(result) && !driver.budget_exhausted();
  return result;
}

namespace {

IntegrandHints transform_hints(const SpectralTransform& transform, int moment_power) {
  IntegrandHints hints;
  hints.omega_break = 50.0 / transform.duration();
  const double c = transform.decay_constant();
  hints.tail_c = c * c;
  // w^m |F|^2 <= C^2 / w^(4 - m)
  hints.tail_power = 4 - moment_power;
  // |F|^2 structure repeats on the sinc-lobe scale set by the duration
  hints.oscillation_scale = 2.0 * std::numbers::pi / transform.duration();
  return hints;
}

} // namespace

SpectralIntegral spectral_moment(const SpectralTransform& transform,
                                 const QuadratureSpec& spec) {
  if (transform.is_zero()) return {};
  if (!transform.zero_endpoints() && !spec.omega_max)
    throw NonConvergentError(
        "spectral moment diverges logarithmically for nonzero endpoint velocities; "
        "set omega_max to clip deliberately");
  const auto hints = transform_hints(transform, 1);
  return integrate_spectral([&](double w) { return w * transform.power(w); }, spec,
                            transform.zero_endpoints() ? hints : IntegrandHints{});
}

double spectral_mean_omega(const SpectralTransform& transform, const QuadratureSpec& spec) {
  if (transform.is_zero()) return 0.0;
  if (!transform.zero_endpoints() && !spec.omega_max)
    throw NonConvergentError(
        "spectral mean frequency diverges for nonzero endpoint velocities; "
        "set omega_max to clip deliberately");
  const bool bounded = transform.zero_endpoints();
  const auto first = integrate_spectral([&](double w) { return w * transform.power(w); },
                                        spec, bounded ? transform_hints(transform, 1)
                                                      : IntegrandHints{});
  const auto second = integrate_spectral(
      [&](double w) { return w * w * transform.power(w); }, spec,
      bounded ? transform_hints(transform, 2) : IntegrandHints{});
  if (first.value <= 0.0) return 0.0;
  return second.value / first.value;
}

} // namespace spdecohere
