#pragma once

// Brute-force validation of the k-space reductions: a direct 3D Monte Carlo
// estimate of the half-oscillation exponent (no angular reduction), a
// deterministic nested quadrature over (omega, polar, azimuth) that shares no
// numerics with the production path, and the literal groove phasor sum.

#include <array>
#include <cstdint>

#include "spdecohere/profiles.hpp"

namespace spdecohere {

struct OracleResult {
  double estimate = 0.0;
  double std_error = 0.0;  // Monte Carlo standard error, or deterministic error bound
  long long samples_or_panels = 0;
  std::uint64_t seed = 0;
  bool tolerance_met = true;  // deterministic runs: achieved bound within request
};

// One 10-round 4x32 counter-based generator block. Exposed so known-answer
// tests can pin the exact stream the Monte Carlo oracle draws from.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Direct Monte Carlo estimate of the half-oscillation exponent: omega drawn
// from a piecewise power-law envelope of w |F(w)|^2, direction uniform on the
// sphere, full interference factor evaluated per sample. Deterministic given
// the seed and independent of the worker thread count.
OracleResult mc_w1osc(const VelocityProfile& profile, double separation, int epsilon,
                      double e2, long long samples, std::uint64_t seed);

// Deterministic nested quadrature for the same quantity, built on its own
// composite Gauss panels, its own numeric Fourier transform of the profile,
// and a numeric azimuthal average (polar axis along x).
OracleResult nested_w1osc(const VelocityProfile& profile, double separation, int epsilon,
                          double e2, double tol);

// |sum_{n=0}^{2N-1} (-1)^n e^{i kappa n}|^2 by literal accumulation of the
// 2N-term phasor sum (extended precision inside).
double brute_groove_phasor(double kappa, int grooves);

} // namespace spdecohere
