#pragma once

// Physical decoherence quantities built on the spectral kernels: the single
// half-oscillation exponent, the full groove-resolved exponent, the
// cross-steep correction eta, and their assembly into the total exponent and
// fringe visibility for a grating scenario.

#include <optional>

#include "spdecohere/profiles.hpp"
#include "spdecohere/quadrature.hpp"

namespace spdecohere {

// A decoherence exponent contribution together with its quadrature
// diagnostics; both value and the diagnostic magnitudes carry the physical
// prefactor e^2/(2 pi)^3.
struct WResult {
  double value = 0.0;
  SpectralIntegral quadrature;
  // For the groove-resolved integral with epsilon != 0: whether the
  // separation stays inside the window 2R < T_z (1 - v_y) required for the
  // cross-steep phase never to vanish. Always true otherwise.
  bool separation_window_ok = true;
};

// Exponent of a single half-oscillation (one steep):
//   e^2/(2 pi)^3 * int_0^inf dw w |F(w)|^2 G_eps(w R)
// with G_0 = 2 pi/3 and G_{+-1}(x) = 4 pi/3 -+ A(2x)/2.
WResult w_half_zz(const SpectralTransform& transform, double separation, int epsilon,
                  double e2, const QuadratureSpec& spec = {});

// Full groove-resolved exponent: the integrand above times the groove sum
// S(w T_z, N). v_y enters only the separation-window validity flag.
WResult w_bb_zz_full(const SpectralTransform& transform, double separation, int epsilon,
                     int grooves, double t_z, double e2, const QuadratureSpec& spec = {},
                     double v_y = 0.0);

// Cross-steep correction, leading order in tau_z/T_z and large N:
//   eta = e^2 N (pi^2 / 3) (xi / T_z)^2.
double eta_closed(int grooves, double depth, double t_z, double e2);

// Exact finite-N form of the same alternating lattice sum,
//   -e^2 (xi/T_z)^2 sum_{k=1}^{2N-1} 2 (2N - k) (-1)^k / k^2,
// which eta_closed approximates as N -> infinity.
double eta_alternating_sum(int grooves, double depth, double t_z, double e2);

// Cross-steep correction from the double time integral over the actual
// profile, -e^2 sum_{k != 0} (2N - |k|) (-1)^k I(k T_z) with
// I(D) = int int u'(t) u'(t') / (t - t' + D)^2 dt dt'. Requires T_z > tau_z.
double eta_timedomain(const VelocityProfile& profile, int grooves, double t_z, double e2);

// Fringe visibility exp(-W).
double visibility(double w);

enum class SpMode { approximate, full };

struct ValidityFlags {
  bool proximity_height_ok = true;   // z0 / d below the warn ratio
  bool proximity_depth_ok = true;    // xi / d below the warn ratio
  bool separation_height_ok = true;  // z0 / R below the warn ratio (eps = 0, -1)
  bool separation_window_ok = true;  // 2R < T_z (1 - v_y) (eps != 0)
  bool subluminal_ok = true;         // profile peak speed < 1
  bool v_y_small_ok = true;          // v_y <= 0.2, the small-speed regime
};

struct DecoherenceBreakdown {
  // scenario echo
  int grooves = 0;
  int epsilon = 0;
  double e2 = 0.0;
  double v_z = 0.0;
  double tau_z = 0.0;
  double t_z = 0.0;

  // contributions (all carry e^2)
  double w_half_zz = 0.0;
  std::optional<double> w_bb_zz{};          // full mode
  double eta_closed = 0.0;
  std::optional<double> eta_timedomain{};   // full mode
  double w_plane = 0.0;                     // caller input
  std::optional<double> attenuation{};      // exp(-4 pi z0 / d) when enabled

  // assembly
  double delta_w = 0.0;  // grating-induced part of w_sp
  double w_sp = 0.0;
  double visibility = 1.0;

  // diagnostics
  double eta_over_2n_whalf = 0.0;      // hierarchy of the cross-steep correction
  double dropped_shift_scale = 0.0;    // v_y <w>, the neglected phase-shift rate
  ValidityFlags flags;
  SpectralIntegral w_half_quadrature;
  std::optional<SpectralIntegral> w_bb_quadrature{};
};

// Total decoherence exponent for a grating scenario.
//   approximate: w_sp = w_plane + 2N * w_half_zz * attenuation
//   full:        w_sp = w_plane + w_bb_zz * attenuation
// (attenuation = 1 unless the attenuate flag is set). Full mode also
// evaluates eta_timedomain; approximate mode reports only eta_closed.
DecoherenceBreakdown w_sp(const GratingGeometry& grating, const BeamConfig& beam,
                          double w_plane = 0.0, SpMode mode = SpMode::approximate,
                          bool attenuate = false, const QuadratureSpec& quad = {},
                          double proximity_warn_ratio = 0.2);

} // namespace spdecohere
