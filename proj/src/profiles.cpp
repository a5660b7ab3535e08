#include "spdecohere/profiles.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spdecohere {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool finite(double x) { return std::isfinite(x); }

} // namespace

VelocityProfile VelocityProfile::from_breakpoints(std::vector<ProfileBreakpoint> points) {
  require(points.size() >= 2, "velocity profile needs at least two breakpoints");
  require(finite(points.front().time) && points.front().time == 0.0,
          "velocity profile must start at t = 0");
  for (const auto& p : points)
    require(finite(p.time) && finite(p.velocity), "velocity profile breakpoints must be finite");
  for (std::size_t i = 1; i < points.size(); ++i)
    require(points[i].time > points[i - 1].time,
            "velocity profile breakpoint times must be strictly increasing");
  require(points.front().velocity == 0.0 && points.back().velocity == 0.0,
          "velocity profile endpoint velocities must vanish");

  VelocityProfile profile;
  profile.points_ = std::move(points);
  for (const auto& p : profile.points_)
    profile.peak_speed_ = std::max(profile.peak_speed_, std::abs(p.velocity));
  return profile;
}

double VelocityProfile::displacement() const {
  // Sum of v0*h + slope*h^2/2 per segment, the same expression the transform
  // evaluates at w = 0, so F(0) == displacement() holds bit-exactly.
  double total = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double h = points_[i].time - points_[i - 1].time;
    const double v0 = points_[i - 1].velocity;
    const double slope = (points_[i].velocity - v0) / h;
    total += v0 * h + slope * (h * h * 0.5);
  }
  return total;
}

bool VelocityProfile::is_zero() const { return peak_speed_ == 0.0; }

double VelocityProfile::velocity_at(double t) const {
  if (t <= points_.front().time || t >= points_.back().time) return 0.0;
  // profiles have a handful of breakpoints; linear scan is fine
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (t <= points_[i].time) {
      const auto& a = points_[i - 1];
      const auto& b = points_[i];
      const double f = (t - a.time) / (b.time - a.time);
      return a.velocity + f * (b.velocity - a.velocity);
    }
  }
  return 0.0;
}

VelocityProfile triangular_profile(double v_z, double tau_z, bool strict_subluminal) {
  require(finite(v_z) && finite(tau_z), "triangular profile parameters must be finite");
  require(tau_z > 0.0, "triangular profile duration must be positive");
  if (strict_subluminal)
    require(std::abs(v_z) < 0.5, "strict mode: |v_z| must be below 0.5 (peak speed 2 v_z)");
  return VelocityProfile::from_breakpoints(
      {{0.0, 0.0}, {0.5 * tau_z, 2.0 * v_z}, {tau_z, 0.0}});
}

VelocityProfile asymmetric_triangular_profile(double v_z, double tau_z, double peak_fraction,
                                              bool strict_subluminal) {
  require(finite(peak_fraction) && peak_fraction > 0.0 && peak_fraction < 1.0,
          "peak_fraction must lie in (0, 1)");
  require(finite(v_z) && finite(tau_z) && tau_z > 0.0,
          "triangular profile parameters must be finite and tau_z > 0");
  if (strict_subluminal)
    require(std::abs(v_z) < 0.5, "strict mode: |v_z| must be below 0.5 (peak speed 2 v_z)");
  return VelocityProfile::from_breakpoints(
      {{0.0, 0.0}, {peak_fraction * tau_z, 2.0 * v_z}, {tau_z, 0.0}});
}

GratingGeometry::GratingGeometry(int grooves_, double half_period_, double depth_,
                                 double slope_angle_)
    : grooves(grooves_), half_period(half_period_), depth(depth_), slope_angle(slope_angle_) {
  require(grooves >= 1, "grating needs at least one groove");
  require(finite(half_period) && half_period > 0.0, "grating half period must be positive");
  require(finite(depth) && depth > 0.0, "grating depth must be positive");
  require(finite(slope_angle) && slope_angle >= 0.0 &&
              slope_angle < 0.5 * std::numbers::pi,
          "grating slope angle must lie in [0, pi/2)");
}

BeamConfig::BeamConfig(double v_y_, double separation_, double height_, int epsilon_, double e2_)
    : v_y(v_y_), separation(separation_), height(height_), epsilon(epsilon_), e2(e2_) {
  require(finite(v_y) && v_y > 0.0 && v_y < 1.0, "beam speed v_y must lie in (0, 1)");
  require(finite(separation) && separation >= 0.0, "path separation R must be non-negative");
  require(finite(height) && height > 0.0, "beam height z0 must be positive");
  require(epsilon == -1 || epsilon == 0 || epsilon == 1, "epsilon must be -1, 0 or +1");
  require(finite(e2) && e2 > 0.0, "coupling e^2 must be positive");
}

GratingTraversal profile_from_grating(const GratingGeometry& grating, const BeamConfig& beam,
                                      double proximity_warn_ratio) {
  require(finite(proximity_warn_ratio) && proximity_warn_ratio > 0.0,
          "proximity warn ratio must be positive");

  const double t_z = grating.half_period / beam.v_y;
  const double v_z = beam.v_y * std::tan(grating.slope_angle);
  const ProximityCheck proximity{beam.height / grating.half_period,
                                 grating.depth / grating.half_period, proximity_warn_ratio};

  if (v_z == 0.0) {
    // flat-conductor limit: the image charge never moves vertically
    return {triangular_profile(0.0, 0.5 * t_z), t_z, 0.5 * t_z, 0.0, proximity};
  }

  require(v_z < 0.5, "derived image speed v_z = v_y tan(theta) must stay below 0.5");
  const double tau_z = grating.depth / v_z;
  require(tau_z < t_z, "climb time tau_z must be shorter than the tooth spacing time T_z");

  return {triangular_profile(v_z, tau_z), t_z, tau_z, v_z, proximity};
}

SpectralTransform::SpectralTransform(const VelocityProfile& profile) {
  const auto pts = profile.breakpoints();
  duration_ = profile.duration();
  zero_endpoints_ = pts.front().velocity == 0.0 && pts.back().velocity == 0.0;

  segments_.reserve(pts.size() - 1);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double h = pts[i].time - pts[i - 1].time;
    const double v0 = pts[i - 1].velocity;
    const double v1 = pts[i].velocity;
    const double slope = (v1 - v0) / h;
    segments_.push_back({pts[i - 1].time, h, v0, slope});

    displacement_ += v0 * h + slope * (h * h * 0.5);
    decay_constant_ += 2.0 * std::abs(slope);

    // integral of |v| over the segment, splitting at a sign change
    if (v0 * v1 < 0.0) {
      const double tc = -v0 / slope;  // offset of the zero crossing
      l1_norm_ += 0.5 * (std::abs(v0) * tc + std::abs(v1) * (h - tc));
    } else {
      l1_norm_ += 0.5 * (std::abs(v0) + std::abs(v1)) * h;
    }
  }
}

namespace {

// E1 = int_0^h e^{iws} ds and E2 = int_0^h s e^{iws} ds.
// Below |wh| = 1/2 the closed forms cancel catastrophically, so switch to
// series: E1 = h sum x^n/(n+1)!, E2 = h^2 sum x^n/(n! (n+2)), x = iwh.
void segment_kernels(double omega, double h, std::complex<double>& e1,
                     std::complex<double>& e2) {
  const double x = omega * h;
  if (std::abs(x) < 0.5) {
    const std::complex<double> ix(0.0, x);
    std::complex<double> p(1.0, 0.0);  // x^n / n!
    e1 = 0.0;
    e2 = 0.0;
    for (int n = 0; n <= 16; ++n) {
      e1 += p / double(n + 1);
      e2 += p / double(n + 2);
      p *= ix / double(n + 1);
    }
    e1 *= h;
    e2 *= h * h;
    return;
  }
  const std::complex<double> iw(0.0, omega);
  const std::complex<double> eix(std::cos(x), std::sin(x));
  e1 = (eix - 1.0) / iw;
  e2 = h * eix / iw - (eix - 1.0) / (iw * iw);
}

} // namespace

std::complex<double> SpectralTransform::evaluate(double omega) const {
  if (omega == 0.0) return {displacement_, 0.0};
  std::complex<double> total(0.0, 0.0);
  for (const auto& s : segments_) {
    std::complex<double> e1, e2;
    segment_kernels(omega, s.h, e1, e2);
    const double phase = omega * s.t0;
    const std::complex<double> rot(std::cos(phase), std::sin(phase));
    total += rot * (s.v0 * e1 + s.slope * e2);
  }
  return total;
}

double SpectralTransform::power(double omega) const { return std::norm(evaluate(omega)); }

} // namespace spdecohere
