#pragma once

// Image-trajectory velocity profiles and their Fourier transforms.
//
// A charge moving at constant height above a sawtooth conductor has an image
// charge whose vertical velocity is a piecewise-linear function of time: zero
// while crossing a flat valley floor, ramping while climbing a tooth face.
// Everything downstream (decoherence integrals, oracles) consumes either the
// profile itself or its spectral transform F(w) = int_0^tau  udot(t) e^{iwt} dt.
//
// Units: c = 1, so times and lengths share one unit (micrometres in the CLI)
// and velocities are dimensionless fractions of c.

#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace spdecohere {

// Coupling conventions for e^2 in natural units (hbar = c = 1).
inline constexpr double kFineStructure = 1.0 / 137.036;
inline constexpr double kGaussianCoupling = kFineStructure;              // e^2 = alpha
inline constexpr double kHeavisideLorentzCoupling =
    4.0 * std::numbers::pi * kFineStructure;                             // e^2 = 4 pi alpha

struct ProfileBreakpoint {
  double time;
  double velocity;
};

// Piecewise-linear velocity profile on [0, tau_z] with zero endpoint velocities.
//
// Endpoint velocities must vanish exactly: that is what guarantees the
// |F(w)|^2 = O(w^-4) falloff the quadrature tail accounting relies on.
// Super-luminal peak speeds are recorded as a validity flag rather than
// rejected, because unit-normalised profiles (v_z = 1) are useful for
// checking scale-invariant quantities.
class VelocityProfile {
public:
  // Breakpoint times must be strictly increasing, start at 0, and all values
  // must be finite. Throws std::invalid_argument otherwise.
  static VelocityProfile from_breakpoints(std::vector<ProfileBreakpoint> points);

  double duration() const { return points_.back().time; }   // tau_z
  double displacement() const;                                // exact trapezoid, equals F(0)
  double peak_speed() const { return peak_speed_; }
  bool subluminal() const { return peak_speed_ < 1.0; }
  bool is_zero() const;

  double velocity_at(double t) const;   // 0 outside [0, tau_z]

  std::span<const ProfileBreakpoint> breakpoints() const { return points_; }

private:
  VelocityProfile() = default;
  std::vector<ProfileBreakpoint> points_;
  double peak_speed_ = 0.0;
};

// Symmetric triangular ramp: udot(t) = 4 v_z t / tau_z on (0, tau_z/2),
// 4 v_z (1 - t/tau_z) on (tau_z/2, tau_z). Displacement is v_z * tau_z and the
// peak speed is 2 v_z. With strict_subluminal the call rejects v_z >= 0.5.
VelocityProfile triangular_profile(double v_z, double tau_z,
                                   bool strict_subluminal = false);

// Triangle with the peak moved to peak_fraction * tau_z (same displacement and
// peak speed as the symmetric ramp); peak_fraction must lie in (0, 1).
VelocityProfile asymmetric_triangular_profile(double v_z, double tau_z,
                                              double peak_fraction,
                                              bool strict_subluminal = false);

// Sawtooth conductor traversed by the beam: N teeth, half period d (valley
// floor length = steep-to-steep distance), tooth depth xi, face slope angle
// theta. theta = 0 is the degenerate flat-conductor limit (the image never
// moves vertically); theta = pi/2 is excluded.
struct GratingGeometry {
  int grooves;         // N >= 1
  double half_period;  // d > 0
  double depth;        // xi > 0
  double slope_angle;  // theta in [0, pi/2)

  GratingGeometry(int grooves, double half_period, double depth, double slope_angle);

  // Proximity modelling assumes xi << d; callers surface this as a warning.
  bool depth_exceeds_half_period() const { return depth >= half_period; }
};

// The interfering charge: forward speed, path separation 2R along the grating
// axis x, height z0 above the surface, and the groove-phase correlation
// epsilon in {-1, 0, +1} (anticorrelated / uncorrelated / correlated paths).
struct BeamConfig {
  double v_y;         // (0, 1)
  double separation;  // R >= 0
  double height;      // z0 > 0
  int epsilon;        // -1, 0, +1
  double e2;          // coupling, > 0

  BeamConfig(double v_y, double separation, double height, int epsilon, double e2);
};

struct ProximityCheck {
  double height_ratio;  // z0 / d
  double depth_ratio;   // xi / d
  double threshold;     // warn above this (default 0.2)
  bool height_ok() const { return height_ratio <= threshold; }
  bool depth_ok() const { return depth_ratio <= threshold; }
};

struct GratingTraversal {
  VelocityProfile profile;  // image vertical velocity over one tooth climb
  double t_z;               // steep-to-steep travel time d / v_y
  double tau_z;             // climb duration xi / v_z (t_z/2 when theta = 0)
  double v_z;               // v_y tan(theta)
  ProximityCheck proximity;
};

// Derive the per-tooth image velocity profile from geometry and beam.
// Errors: v_z >= 0.5 (image speed would exceed c) and tau_z >= t_z (climb
// longer than the tooth spacing) throw std::invalid_argument.
GratingTraversal profile_from_grating(const GratingGeometry& grating,
                                      const BeamConfig& beam,
                                      double proximity_warn_ratio = 0.2);

// Closed-form Fourier transform of a piecewise-linear profile.
//
// Each linear segment contributes e^{iwt0} (v0 E1(wh) + b E2(wh)) with
// E1 = int_0^h e^{iws} ds and E2 = int_0^h s e^{iws} ds; both switch to their
// power series for |wh| < 1/2 so small-w evaluation never cancels.
class SpectralTransform {
public:
  explicit SpectralTransform(const VelocityProfile& profile);

  std::complex<double> evaluate(double omega) const;  // F(w)
  double power(double omega) const;                   // |F(w)|^2

  double duration() const { return duration_; }       // tau_z of the source profile
  double displacement() const { return displacement_; }  // F(0), bit-identical to profile
  bool zero_endpoints() const { return zero_endpoints_; }
  bool is_zero() const { return l1_norm_ == 0.0; }

  // Envelope constants: |F(w)| <= l1_norm() everywhere and
  // |F(w)| <= decay_constant() / w^2 (the latter needs zero endpoints).
  double l1_norm() const { return l1_norm_; }
  double decay_constant() const { return decay_constant_; }

private:
  struct Segment {
    double t0;     // segment start time
    double h;      // width
    double v0;     // velocity at t0
    double slope;
  };
  std::vector<Segment> segments_;
  double duration_ = 0.0;
  double displacement_ = 0.0;
  double l1_norm_ = 0.0;
  double decay_constant_ = 0.0;
  bool zero_endpoints_ = true;
};

inline SpectralTransform transform(const VelocityProfile& profile) {
  return SpectralTransform(profile);
}

} // namespace spdecohere
