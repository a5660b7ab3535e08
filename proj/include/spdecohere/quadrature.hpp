#pragma once

// Semi-infinite spectral quadrature and the two special kernels that appear
// under it: the solid-angle interference kernel A(a) and the groove phase sum
// S(kappa, N).
//
// The integrator is a streaming adaptive Gauss-Kronrod 7/15 scheme: the head
// interval is cut at caller-supplied resonance boundaries and at a seed width
// matching the fastest known oscillation, each seed panel is refined by local
// bisection, and the tail is walked in doubling blocks until either a rigorous
// decay bound or an empirical block-decay rule certifies the remainder.

#include <functional>
#include <optional>
#include <stdexcept>

#include "spdecohere/profiles.hpp"

namespace spdecohere {

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;                  // absolute floor for the target error
  long long max_subdivisions = 20'000'000;  // total panel budget
  std::optional<double> omega_max{};     // hard cutoff override, echoed in results
  double near_pole_exclusion_halfwidth = 1e-8;  // groove_sum limiting form window
};

struct SpectralIntegral {
  double value = 0.0;
  double error_estimate = 0.0;  // quadrature error + accounted tail remainder
  bool tolerance_met = true;
  long long panels = 0;
  double omega_cutoff = 0.0;    // where integration stopped
  double tail_bound = 0.0;      // remainder bound beyond omega_cutoff (in error_estimate)
};

// Structure hints for integrate_spectral. All optional; zeros mean "unknown".
struct IntegrandHints {
  // |f(w)| <= tail_c / w^tail_power for w >= omega_break enables rigorous
  // truncation accounting. tail_power must be 2 or 3 when tail_c > 0.
  double omega_break = 0.0;
  double tail_c = 0.0;
  int tail_power = 3;
  // Known singular/resonant abscissae at resonance_first + k * resonance_spacing
  // become panel boundaries (groove-sum poles).
  double resonance_first = 0.0;
  double resonance_spacing = 0.0;
  // Target width of initial panels (half the fastest oscillation works well).
  double oscillation_scale = 0.0;
};

// Thrown when the tail blocks stop decaying (divergent or conditionally
// convergent input) or a required quantity cannot be computed.
class NonConvergentError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Interference kernel A(a) = int dOmega (1 - kz^2) cos(a kx) over the unit
// sphere of directions: 4 pi [sin a/a + cos a/a^2 - sin a/a^3], with the
// series used below |a| = 1/2. A(0) = 8 pi/3 and |A| <= 8 pi/3.
double angular_kernel(double a);

// Groove phase sum S(kappa, N) = |sum_{n=0}^{2N-1} (-1)^n e^{i kappa n}|^2
//   = (1 - cos 2 N kappa) / (1 + cos kappa)
// with removable poles at odd multiples of pi where S -> 4 N^2. The quadratic
// limiting form is used within pole_halfwidth of each pole.
double groove_sum(double kappa, int grooves, double pole_halfwidth = 1e-8);

// int_0^inf f(w) dw for integrands that decay at infinity.
//
// Throws NonConvergentError when tail blocks fail to decay; returns the best
// estimate with tolerance_met = false when the panel budget runs out first.
SpectralIntegral integrate_spectral(const std::function<double(double)>& f,
                                    const QuadratureSpec& spec,
                                    const IntegrandHints& hints = {});

// int_0^inf w |F(w)|^2 dw. Converges only for zero endpoint velocities;
// otherwise throws NonConvergentError unless the caller clips with omega_max.
SpectralIntegral spectral_moment(const SpectralTransform& transform,
                                 const QuadratureSpec& spec = {});

// Moment-weighted mean frequency <w> = int w^2 |F|^2 / int w |F|^2, used for
// the neglected-phase-shift diagnostic v_y <w>. Zero for the zero profile.
double spectral_mean_omega(const SpectralTransform& transform,
                           const QuadratureSpec& spec = {});

} // namespace spdecohere
