#include "spdecohere/decoherence.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace spdecohere {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Angular weight of the k-space integral after the direction average:
// G_0 = 2 pi/3, G_{+-1}(x) = 4 pi/3 -+ A(2x)/2.
double g_factor(int epsilon, double x) {
  if (epsilon == 0) return 2.0 * kPi / 3.0;
  return 4.0 * kPi / 3.0 - 0.5 * double(epsilon) * angular_kernel(2.0 * x);
}

// Worst-case angular weight, for tail bounds.
double g_bound(int epsilon) { return epsilon == 0 ? 2.0 * kPi / 3.0 : 8.0 * kPi / 3.0; }

IntegrandHints spectrum_hints(const SpectralTransform& transform, int epsilon,
                              double separation) {
  IntegrandHints hints;
  const double tau = transform.duration();
  hints.omega_break = 50.0 / tau;
  const double c = transform.decay_constant();
  hints.tail_c = g_bound(epsilon) * c * c;
  hints.tail_power = 3;
  double scale = 2.0 * kPi / tau;  // sinc-lobe structure of |F|^2
  if (epsilon != 0 && separation > 0.0)
    scale = std::min(scale, kPi / separation);  // A(2 w R) interference fringes
  hints.oscillation_scale = scale;
  return hints;
}

void scale_result(WResult& out, double prefactor, const SpectralIntegral& raw) {
  out.quadrature = raw;
  out.quadrature.value *= prefactor;
  out.quadrature.error_estimate *= prefactor;
  out.quadrature.tail_bound *= prefactor;
  out.value = out.quadrature.value;
}

} // namespace

WResult w_half_zz(const SpectralTransform& transform, double separation, int epsilon,
                  double e2, const QuadratureSpec& spec) {
  require(epsilon == -1 || epsilon == 0 || epsilon == 1, "epsilon must be -1, 0 or +1");
  require(std::isfinite(separation) && separation >= 0.0, "separation must be non-negative");
  require(std::isfinite(e2) && e2 > 0.0, "coupling e^2 must be positive");

  WResult out;
  if (transform.is_zero()) return out;
  if (epsilon == 1 && separation == 0.0) return out;  // coincident in-phase sources cancel

  const double prefactor = e2 / std::pow(2.0 * kPi, 3);
  const auto f = [&](double w) {
    return w * transform.power(w) * g_factor(epsilon, w * separation);
  };
  const auto raw = integrate_spectral(f, spec, spectrum_hints(transform, epsilon, separation));
  scale_result(out, prefactor, raw);
  return out;
}

WResult w_bb_zz_full(const SpectralTransform& transform, double separation, int epsilon,
                     int grooves, double t_z, double e2, const QuadratureSpec& spec,
                     double v_y) {
  require(epsilon == -1 || epsilon == 0 || epsilon == 1, "epsilon must be -1, 0 or +1");
  require(std::isfinite(separation) && separation >= 0.0, "separation must be non-negative");
  require(grooves >= 1, "groove count must be at least 1");
  require(std::isfinite(e2) && e2 > 0.0, "coupling e^2 must be positive");
  require(std::isfinite(v_y) && v_y >= 0.0 && v_y < 1.0, "v_y must lie in [0, 1)");
  require(std::isfinite(t_z) && t_z > transform.duration(),
          "tooth spacing time T_z must exceed the profile duration tau_z");

  WResult out;
  out.separation_window_ok =
      epsilon == 0 || 2.0 * separation < t_z * (1.0 - v_y);
  if (transform.is_zero()) return out;
  if (epsilon == 1 && separation == 0.0) return out;

  // The groove sum is split pointwise as S = 2N + D. Its mean over every
  // resonance period 2 pi / T_z is exactly 2N (all Fourier modes of S except
  // the constant average to zero), so the bulk of the integral is 2N times a
  // smooth single-steep-type integral, which the tail machinery handles
  // cheaply. Only the mean-free remainder D needs the resonance fringes
  // resolved, and only over a finite head: D's second periodic antiderivative
  // is bounded by (4 pi^2/3) N / T_z^2, so truncating at a period boundary a
  // leaves |remainder| <= (4 pi^2/3) (N / T_z^2) int_a^inf |f''|, estimated
  // from the envelope |f| <= G C^2 / w^3 with curvature rate max(tau/4, 2R).
  const double n2 = 2.0 * double(grooves);
  const double prefactor = e2 / std::pow(2.0 * kPi, 3);

  auto mean_hints = spectrum_hints(transform, epsilon, separation);
  mean_hints.tail_c *= n2;
  const auto f_mean = [&](double w) {
    return n2 * w * transform.power(w) * g_factor(epsilon, w * separation);
  };
  const auto mean_raw = integrate_spectral(f_mean, spec, mean_hints);

  const double target_raw =
      std::max(spec.abs_tol, spec.rel_tol * std::abs(mean_raw.value));
  const double period = 2.0 * kPi / t_z;
  const double c2 = transform.decay_constant() * transform.decay_constant();
  // int_a^inf |f''| taken term by term, each with a safety factor of 4: the
  // solid-angle constant times the sinc envelope curves at rate tau/4 and
  // integrates to ~1/a^2; the interference fringe curves at rate 2R but its
  // amplitude carries a 4.4 pi / (2 w R) falloff (valid for 2 w R >= 10, i.e.
  // whenever this term is not already covered by the first), leaving
  // (2R)^2 * 4.4 pi C^2 / (2 R w^4) integrated to 4.4 pi R C^2 / (3 a^3).
  const double wiggle_prefactor =
      (4.0 * kPi * kPi / 3.0) * double(grooves) / (t_z * t_z);
  const double quarter_tau = transform.duration() / 4.0;
  const double coeff_a2 =
      wiggle_prefactor * 2.0 * quarter_tau * quarter_tau * g_bound(epsilon) * c2;
  const double coeff_a3 =
      epsilon != 0
          ? wiggle_prefactor * (4.0 * 4.4 * kPi / 3.0) * separation * c2
          : 0.0;
  const auto d_tail_at = [&](double a) {
    return coeff_a2 / (a * a) + coeff_a3 / (a * a * a);
  };

  auto d_hints = spectrum_hints(transform, epsilon, separation);
  double head = d_hints.omega_break;
  if (target_raw > 0.0) {
    double a = std::sqrt(coeff_a2 / (0.3 * target_raw));
    for (int i = 0; i < 4; ++i)
      a = std::sqrt((coeff_a2 + coeff_a3 / std::max(a, head)) /
                    (0.3 * target_raw));
    head = std::max(head, a);
  }
  // The fringe cos(2 N T_z w) needs ~ one panel per period N T_z / pi for a
  // trustworthy 15-point estimate, so resolving [0, a] costs ~ 2.5 a N T_z/pi
  // panels with the bisection tree; running out of budget mid-span would
  // leave aliased coarse panels whose error estimates cannot be trusted. Cap
  // the resolved span at what the budget can finish and push the difference
  // into the remainder bound, which stays rigorous and keeps tolerance_met
  // honest.
  const double floor_per_omega = double(grooves) * t_z / kPi;
  const double affordable = double(spec.max_subdivisions) / (5.0 * floor_per_omega);
  head = std::min(head, std::max(affordable, d_hints.omega_break));
  double cutoff = period * std::ceil(head / period);
  double d_tail = d_tail_at(cutoff);
  if (spec.omega_max && *spec.omega_max < cutoff) {
    cutoff = *spec.omega_max;  // deliberate clip: no remainder accounting
    d_tail = 0.0;
  }

  d_hints.omega_break = cutoff;
  d_hints.tail_c = 0.0;
  d_hints.resonance_first = kPi / t_z;
  d_hints.resonance_spacing = period;
  // quarter of the fringe period: the driver widens its seed cap fourfold
  d_hints.oscillation_scale =
      std::min(d_hints.oscillation_scale, kPi / (4.0 * double(grooves) * t_z));
  QuadratureSpec d_spec = spec;
  // No point chasing quadrature error far below the truncation remainder:
  // when the span had to be capped, the remainder dominates anyway and the
  // relaxed target keeps the refinement depth (and cost) proportionate.
  d_spec.abs_tol = std::max({spec.abs_tol,
                             0.5 * spec.rel_tol * std::abs(mean_raw.value),
                             0.5 * d_tail});
  d_spec.omega_max = cutoff;
  const auto f_d = [&](double w) {
    return w * transform.power(w) * g_factor(epsilon, w * separation) *
           (groove_sum(w * t_z, grooves, spec.near_pole_exclusion_halfwidth) - n2);
  };
  const auto d_raw = integrate_spectral(f_d, d_spec, d_hints);

  SpectralIntegral combined;
  combined.value = mean_raw.value + d_raw.value;
  combined.error_estimate = mean_raw.error_estimate + d_raw.error_estimate + d_tail;
  combined.panels = mean_raw.panels + d_raw.panels;
  combined.omega_cutoff = std::max(mean_raw.omega_cutoff, d_raw.omega_cutoff);
  combined.tail_bound = mean_raw.tail_bound + d_raw.tail_bound + d_tail;
  combined.tolerance_met =
      mean_raw.tolerance_met && d_raw.tolerance_met &&
      combined.error_estimate <=
          std::max(spec.abs_tol, spec.rel_tol * std::abs(combined.value));
  scale_result(out, prefactor, combined);
  return out;
}

double eta_closed(int grooves, double depth, double t_z, double e2) {
  require(grooves >= 1, "groove count must be at least 1");
  require(std::isfinite(depth) && depth >= 0.0, "depth must be non-negative");
  require(std::isfinite(t_z) && t_z > 0.0, "tooth spacing time must be positive");
  require(std::isfinite(e2) && e2 > 0.0, "coupling e^2 must be positive");
  const double r = depth / t_z;
  return e2 * double(grooves) * (kPi * kPi / 3.0) * r * r;
}

double eta_alternating_sum(int grooves, double depth, double t_z, double e2) {
  require(grooves >= 1, "groove count must be at least 1");
  require(std::isfinite(depth) && depth >= 0.0, "depth must be non-negative");
  require(std::isfinite(t_z) && t_z > 0.0, "tooth spacing time must be positive");
  require(std::isfinite(e2) && e2 > 0.0, "coupling e^2 must be positive");
  const double r = depth / t_z;
  double sum = 0.0;  // ascending in term size: k runs from the smallest terms
  for (int k = 2 * grooves - 1; k >= 1; --k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    sum += sign * 2.0 * double(2 * grooves - k) / (double(k) * double(k));
  }
  return -e2 * r * r * sum;
}

namespace {

// 16-point Gauss-Legendre rule on [-1, 1] (positive half; mirror for the rest)
constexpr double kGlNode[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr double kGlWeight[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

struct Piece {
  double t0, h, v0, slope;
};

double piece_velocity(const Piece& p, double t) { return p.v0 + p.slope * (t - p.t0); }

// int over [a0, a0+ha] x [b0, b0+hb] of va(t) vb(t') / (t - t' + delta)^2
double cross_cell(const Piece& a, double a0, double ha, const Piece& b, double b0,
                  double hb, double delta) {
  const double ca = a0 + 0.5 * ha, sa = 0.5 * ha;
  const double cb = b0 + 0.5 * hb, sb = 0.5 * hb;
  double total = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double xi = i < 8 ? -kGlNode[i] : kGlNode[i - 8];
    const double wi = i < 8 ? kGlWeight[i] : kGlWeight[i - 8];
    const double t = ca + sa * xi;
    const double va = piece_velocity(a, t);
    double row = 0.0;
    for (int j = 0; j < 16; ++j) {
      const double xj = j < 8 ? -kGlNode[j] : kGlNode[j - 8];
      const double wj = j < 8 ? kGlWeight[j] : kGlWeight[j - 8];
      const double d = t - (cb + sb * xj) + delta;
      row += wj * piece_velocity(b, cb + sb * xj) / (d * d);
    }
    total += wi * va * row;
  }
  return total * sa * sb;
}

// I(delta) = int int u'(t) u'(t') / (t - t' + delta)^2 over the profile square.
// The integrand is analytic here (|t - t'| <= tau < delta); per-cell Gauss
// converges geometrically in delta/tau, so subdivide only when delta is close
// to tau.
double cross_integral(const std::vector<Piece>& pieces, double tau, double delta) {
  const double margin = delta / tau - 1.0;
  int m = 1;
  if (margin < 4.0) m = std::min(32, (int)std::ceil(4.0 / margin));
  double total = 0.0;
  for (const auto& a : pieces)
    for (const auto& b : pieces) {
      const double ha = a.h / m, hb = b.h / m;
      for (int ia = 0; ia < m; ++ia)
        for (int ib = 0; ib < m; ++ib)
          total += cross_cell(a, a.t0 + ia * ha, ha, b, b.t0 + ib * hb, hb, delta);
    }
  return total;
}

} // namespace

double eta_timedomain(const VelocityProfile& profile, int grooves, double t_z, double e2) {
  require(grooves >= 1, "groove count must be at least 1");
  require(std::isfinite(e2) && e2 > 0.0, "coupling e^2 must be positive");
  require(std::isfinite(t_z) && t_z > profile.duration(),
          "tooth spacing time T_z must exceed the profile duration tau_z");
  if (profile.is_zero()) return 0.0;

  const auto pts = profile.breakpoints();
  std::vector<Piece> pieces;
  pieces.reserve(pts.size() - 1);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double h = pts[i].time - pts[i - 1].time;
    pieces.push_back({pts[i - 1].time, h, pts[i - 1].velocity,
                      (pts[i].velocity - pts[i - 1].velocity) / h});
  }

  const double tau = profile.duration();
  double sum = 0.0;  // smallest lattice distances contribute last
  for (int k = 2 * grooves - 1; k >= 1; --k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    sum += sign * 2.0 * double(2 * grooves - k) *
           cross_integral(pieces, tau, double(k) * t_z);
  }
  return -e2 * sum;
}

double visibility(double w) { return std::exp(-w); }

DecoherenceBreakdown w_sp(const GratingGeometry& grating, const BeamConfig& beam,
                          double w_plane, SpMode mode, bool attenuate,
                          const QuadratureSpec& quad, double proximity_warn_ratio) {
  require(std::isfinite(w_plane) && w_plane >= 0.0, "w_plane must be non-negative");

  const auto traversal = profile_from_grating(grating, beam, proximity_warn_ratio);
  const SpectralTransform transform(traversal.profile);

  DecoherenceBreakdown out;
  out.grooves = grating.grooves;
  out.epsilon = beam.epsilon;
  out.e2 = beam.e2;
  out.v_z = traversal.v_z;
  out.tau_z = traversal.tau_z;
  out.t_z = traversal.t_z;
  out.w_plane = w_plane;

  out.flags.proximity_height_ok = traversal.proximity.height_ok();
  out.flags.proximity_depth_ok = traversal.proximity.depth_ok();
  out.flags.subluminal_ok = traversal.profile.subluminal();
  out.flags.v_y_small_ok = beam.v_y <= 0.2;
  out.flags.separation_height_ok =
      beam.epsilon == 1 || beam.height <= proximity_warn_ratio * beam.separation;
  out.flags.separation_window_ok =
      beam.epsilon == 0 || 2.0 * beam.separation < out.t_z * (1.0 - beam.v_y);

  const auto wh = w_half_zz(transform, beam.separation, beam.epsilon, beam.e2, quad);
  out.w_half_zz = wh.value;
  out.w_half_quadrature = wh.quadrature;

  out.eta_closed = spdecohere::eta_closed(grating.grooves, grating.depth, out.t_z, beam.e2);
  out.eta_over_2n_whalf =
      wh.value > 0.0 ? out.eta_closed / (2.0 * double(grating.grooves) * wh.value) : 0.0;

  double att = 1.0;
  if (attenuate) {
    att = std::exp(-4.0 * kPi * beam.height / grating.half_period);
    out.attenuation = att;
  }

  double grating_part = 0.0;
  if (mode == SpMode::full) {
    const auto wbb = w_bb_zz_full(transform, beam.separation, beam.epsilon, grating.grooves,
                                  out.t_z, beam.e2, quad, beam.v_y);
    out.w_bb_zz = wbb.value;
    out.w_bb_quadrature = wbb.quadrature;
    out.eta_timedomain =
        spdecohere::eta_timedomain(traversal.profile, grating.grooves, out.t_z, beam.e2);
    grating_part = wbb.value * att;
  } else {
    grating_part = 2.0 * double(grating.grooves) * wh.value * att;
  }

  out.delta_w = grating_part;
  out.w_sp = w_plane + grating_part;
  out.visibility = visibility(out.w_sp);

  QuadratureSpec coarse;
  coarse.rel_tol = 1e-3;
  out.dropped_shift_scale = beam.v_y * spectral_mean_omega(transform, coarse);

  return out;
}

} // namespace spdecohere
