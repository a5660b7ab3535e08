#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "spdecohere/profiles.hpp"

using namespace spdecohere;

namespace {

constexpr double kPi = std::numbers::pi;

// Slow reference Fourier transform of the profile: composite Simpson per
// breakpoint interval (so no slope kink falls inside a panel), driven purely
// by velocity_at. Shares nothing with the closed-form segment kernels.
std::complex<double> slow_transform(const VelocityProfile& p, double omega) {
  std::complex<double> total(0.0, 0.0);
  const auto pts = p.breakpoints();
  for (std::size_t s = 1; s < pts.size(); ++s) {
    const double a = pts[s - 1].time, b = pts[s].time;
    const int panels = 200 + int(std::abs(omega) * (b - a) * 8.0);
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
      const double x0 = a + k * h, x1 = x0 + h, xm = x0 + 0.5 * h;
      auto f = [&](double t) {
        return p.velocity_at(t) * std::complex<double>(std::cos(omega * t), std::sin(omega * t));
      };
      total += (h / 6.0) * (f(x0) + 4.0 * f(xm) + f(x1));
    }
  }
  return total;
}

VelocityProfile kinked_profile() {
  return VelocityProfile::from_breakpoints(
      {{0.0, 0.0}, {0.2, 0.12}, {0.5, -0.05}, {0.8, 0.3}, {1.3, 0.0}});
}

} // namespace

TEST_CASE("triangular profile geometry") {
  const auto p = triangular_profile(0.3, 1.7);
  const auto pts = p.breakpoints();
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].time == 0.0);
  CHECK(pts[1].time == doctest::Approx(0.85).epsilon(1e-15));
  CHECK(pts[2].time == doctest::Approx(1.7).epsilon(1e-15));
  CHECK(p.duration() == doctest::Approx(1.7));
  CHECK(p.peak_speed() == doctest::Approx(0.6));  // 2 v_z at the apex
  CHECK(p.displacement() == doctest::Approx(0.3 * 1.7).epsilon(1e-15));
  CHECK(p.velocity_at(0.425) == doctest::Approx(0.3));
  CHECK(p.velocity_at(-1.0) == 0.0);
  CHECK(p.velocity_at(2.0) == 0.0);
  CHECK(p.subluminal());
  CHECK_FALSE(p.is_zero());
  CHECK(triangular_profile(0.0, 1.0).is_zero());
}

TEST_CASE("asymmetric profile keeps displacement and peak speed") {
  const auto p = asymmetric_triangular_profile(0.25, 0.9, 0.3);
  CHECK(p.displacement() == doctest::Approx(0.25 * 0.9).epsilon(1e-15));
  CHECK(p.peak_speed() == doctest::Approx(0.5));
  CHECK(p.breakpoints()[1].time == doctest::Approx(0.27));
  CHECK_THROWS_AS(asymmetric_triangular_profile(0.25, 0.9, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(asymmetric_triangular_profile(0.25, 0.9, 1.0), std::invalid_argument);
}

TEST_CASE("breakpoint validation") {
  CHECK_THROWS_AS(VelocityProfile::from_breakpoints({{0.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(VelocityProfile::from_breakpoints({{0.1, 0.0}, {1.0, 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(VelocityProfile::from_breakpoints({{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(VelocityProfile::from_breakpoints({{0.0, 0.1}, {1.0, 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(VelocityProfile::from_breakpoints({{0.0, 0.0}, {1.0, 0.2}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(triangular_profile(0.5, 1.0, /*strict_subluminal=*/true),
                  std::invalid_argument);
  CHECK(triangular_profile(0.6, 1.0).subluminal() == false);  // peak 1.2 > 1, soft flag
}

TEST_CASE("grating traversal kinematics") {
  const GratingGeometry grating(100, 20.0, 1.0, std::atan(std::sqrt(10.0)));
  const BeamConfig beam(0.1, 20.0, 3.0, 0, kHeavisideLorentzCoupling);
  const auto tr = profile_from_grating(grating, beam);
  CHECK(tr.v_z == doctest::Approx(0.1 * std::sqrt(10.0)).epsilon(1e-14));
  CHECK(tr.tau_z == doctest::Approx(1.0 / (0.1 * std::sqrt(10.0))).epsilon(1e-14));
  CHECK(tr.t_z == doctest::Approx(200.0).epsilon(1e-15));
  CHECK(tr.profile.duration() == doctest::Approx(tr.tau_z));
  CHECK(tr.profile.displacement() == doctest::Approx(1.0).epsilon(1e-12));  // climbs xi
  CHECK(tr.proximity.height_ratio == doctest::Approx(0.15));
  CHECK(tr.proximity.depth_ratio == doctest::Approx(0.05));
  CHECK(tr.proximity.height_ok());
  CHECK(tr.proximity.depth_ok());

  SUBCASE("flat grating degenerates to a zero profile") {
    const GratingGeometry flat(100, 20.0, 1.0, 0.0);
    const auto tz = profile_from_grating(flat, beam);
    CHECK(tz.v_z == 0.0);
    CHECK(tz.profile.is_zero());
    CHECK(tz.tau_z == doctest::Approx(100.0));  // placeholder half spacing
  }
  SUBCASE("image speed at or beyond c/2 is rejected") {
    const BeamConfig fast(0.9, 20.0, 3.0, 0, 1.0);
    const GratingGeometry steep(100, 20.0, 1.0, std::atan(2.0));
    CHECK_THROWS_AS(profile_from_grating(steep, fast), std::invalid_argument);
  }
  SUBCASE("climb longer than tooth spacing is rejected") {
    // tau_z = xi/v_z = 31.6 > t_z = 10
    const GratingGeometry stubby(100, 1.0, 10.0, std::atan(std::sqrt(10.0)));
    CHECK_THROWS_AS(profile_from_grating(stubby, beam), std::invalid_argument);
  }
  SUBCASE("geometry validation") {
    CHECK_THROWS_AS(GratingGeometry(0, 20.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(GratingGeometry(10, -1.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(GratingGeometry(10, 20.0, 1.0, kPi / 2.0), std::invalid_argument);
    CHECK_THROWS_AS(BeamConfig(0.0, 20.0, 3.0, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BeamConfig(0.1, -1.0, 3.0, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BeamConfig(0.1, 20.0, 3.0, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BeamConfig(0.1, 20.0, 3.0, 0, 0.0), std::invalid_argument);
  }
}

TEST_CASE("spectral transform matches the slow Fourier oracle") {
  const std::vector<VelocityProfile> profiles = {
      triangular_profile(0.3, 1.7), asymmetric_triangular_profile(0.25, 0.9, 0.3),
      kinked_profile()};
  for (const auto& p : profiles) {
    const SpectralTransform transform(p);
    const double scale = p.duration() * 0.5;  // crude |F| scale for tolerances
    for (const double omega :
         {0.0, 1e-3, 0.05, 0.3, 1.0, 3.0, 7.7, 20.0, 55.0, 130.0, 400.0}) {
      const auto fast = transform.evaluate(omega);
      const auto slow = slow_transform(p, omega);
      CHECK(std::abs(fast - slow) <= 1e-7 * scale + 1e-10);
      CHECK(transform.power(omega) == doctest::Approx(std::norm(fast)).epsilon(1e-14));
    }
  }
}

TEST_CASE("transform basics and bounds") {
  const auto p = kinked_profile();
  const SpectralTransform transform(p);

  SUBCASE("F(0) is the displacement, bit for bit") {
    CHECK(transform.evaluate(0.0).real() == p.displacement());
    CHECK(transform.evaluate(0.0).imag() == 0.0);
    CHECK(transform.displacement() == p.displacement());
  }
  SUBCASE("series and closed kernel branches agree at the switchover") {
    // the branch switches at |omega h| = 1/2; probe just either side
    const double h = 0.2;  // first segment width
    const double seam = 0.5 / h;
    const auto lo = transform.evaluate(seam * (1.0 - 1e-10));
    const auto hi = transform.evaluate(seam * (1.0 + 1e-10));
    // allow for the true variation |F'| * d(omega) between the probes
    CHECK(std::abs(lo - hi) <= 1e-9);
  }
  SUBCASE("decay bound |F| <= C/omega^2") {
    const double c = transform.decay_constant();
    for (const double omega : {20.0, 80.0, 300.0, 2000.0})
      CHECK(std::abs(transform.evaluate(omega)) <= c / (omega * omega) * (1.0 + 1e-12));
  }
  SUBCASE("L1 bound |F| <= int |udot|") {
    const double l1 = transform.l1_norm();
    CHECK(l1 > std::abs(p.displacement()));  // sign changes make it strict
    for (const double omega : {0.0, 0.7, 2.0, 11.0})
      CHECK(std::abs(transform.evaluate(omega)) <= l1 * (1.0 + 1e-12));
  }
  SUBCASE("zero profile transforms to zero") {
    const SpectralTransform z(triangular_profile(0.0, 2.0));
    CHECK(z.is_zero());
    CHECK(z.evaluate(3.0) == std::complex<double>(0.0, 0.0));
  }
}

TEST_CASE("triangular transform closed form") {
  // |F|^2 = v^2 tau^2 sinc^4(omega tau / 4) for the symmetric ramp
  const double v = 0.3, tau = 1.7;
  const SpectralTransform transform(triangular_profile(v, tau));
  for (const double omega : {0.3, 1.0, 2.5, 8.0, 19.0}) {
    const double u = omega * tau / 4.0;
    const double sinc = std::sin(u) / u;
    const double expected = v * v * tau * tau * std::pow(sinc, 4);
    CHECK(transform.power(omega) == doctest::Approx(expected).epsilon(1e-12));
  }
}
