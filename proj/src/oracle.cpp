#include "spdecohere/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

namespace spdecohere {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u, kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u, kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t(kMul0) * counter[0];
    const std::uint64_t p1 = std::uint64_t(kMul1) * counter[2];
    counter = {std::uint32_t(p1 >> 32) ^ counter[1] ^ key[0], std::uint32_t(p1),
               std::uint32_t(p0 >> 32) ^ counter[3] ^ key[1], std::uint32_t(p0)};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

// ------------------------------------------------------------------ MC oracle

namespace {

double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t(hi) << 32) | lo;
  return double(bits >> 11) * 0x1.0p-53;
}

int worker_count(long long chunks) {
  int n = 0;
  if (const char* env = std::getenv("SPDECOHERE_THREADS")) n = std::atoi(env);
  if (n <= 0) n = int(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  return int(std::min<long long>(n, chunks));
}

double interference(int epsilon, double arg) {
  if (epsilon == 0) return 0.25;
  const double s = std::sin(arg);
  return epsilon == 1 ? s * s : 1.0 - s * s;
}

} // namespace

OracleResult mc_w1osc(const VelocityProfile& profile, double separation, int epsilon,
                      double e2, long long samples, std::uint64_t seed) {
  require(samples >= 10'000, "Monte Carlo oracle needs at least 1e4 samples");
  require(epsilon == -1 || epsilon == 0 || epsilon == 1, "epsilon must be -1, 0 or +1");
  require(std::isfinite(separation) && separation >= 0.0, "separation must be non-negative");
  require(std::isfinite(e2) && e2 > 0.0, "coupling e^2 must be positive");

  OracleResult out;
  out.seed = seed;
  out.samples_or_panels = samples;
  if (profile.is_zero()) return out;  // the integrand vanishes identically

  const SpectralTransform transform(profile);
  const double l1 = transform.l1_norm();
  const double cf = transform.decay_constant();
  // Envelope g(w) = w l1^2 below the knee, cf^2/w^3 above; the two branch
  // masses l1 cf / 2 are equal, so the branch choice is one fair bit.
  const double knee = std::sqrt(cf / l1);
  const double mass = l1 * cf;
  const double prefactor = e2 / std::pow(2.0 * kPi, 3) * 4.0 * kPi * mass;
  const std::array<std::uint32_t, 2> key{std::uint32_t(seed), std::uint32_t(seed >> 32)};

  const long long chunk_size = 65536;
  const long long chunks = (samples + chunk_size - 1) / chunk_size;
  struct Partial {
    double sum = 0.0, sumsq = 0.0;
  };
  std::vector<Partial> partial;
  partial.resize(std::size_t(chunks));

  auto run_chunk = [&](long long c) {
    const long long begin = c * chunk_size;
    const long long end = std::min(samples, begin + chunk_size);
    double sum = 0.0, sumsq = 0.0;
    for (long long i = begin; i < end; ++i) {
      const std::uint32_t lo = std::uint32_t(std::uint64_t(i));
      const std::uint32_t hi = std::uint32_t(std::uint64_t(i) >> 32);
      const auto b0 = philox4x32({lo, hi, 0u, 0u}, key);
      const auto b1 = philox4x32({lo, hi, 1u, 0u}, key);
      const double u0 = to_unit(b0[0], b0[1]);
      const double u1 = to_unit(b0[2], b0[3]);
      const double u2 = to_unit(b1[0], b1[1]);

      // importance weight h/g with the w factors cancelled analytically
      double omega, weight;
      if (u0 < 0.5) {
        omega = knee * std::sqrt(2.0 * u0);
        weight = transform.power(omega) / (l1 * l1);
      } else {
        omega = knee / std::sqrt(2.0 - 2.0 * u0);
        const double w2 = omega * omega;
        weight = w2 * w2 * transform.power(omega) / (cf * cf);
      }

      const double kz = 1.0 - 2.0 * u1;
      const double sin2_polar = (1.0 - kz) * (1.0 + kz);
      const double kx = std::sqrt(std::max(0.0, sin2_polar)) * std::cos(2.0 * kPi * u2);
      const double x =
          prefactor * weight * sin2_polar * interference(epsilon, omega * separation * kx);
      sum += x;
      sumsq += x * x;
    }
    partial[std::size_t(c)] = {sum, sumsq};
  };

  const int workers = worker_count(chunks);
  if (workers <= 1) {
    for (long long c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<long long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (long long c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) run_chunk(c);
      });
    for (auto& th : pool) th.join();
  }

  // reduce in chunk order so the result is independent of the thread count
  double sum = 0.0, carry = 0.0, sumsq = 0.0;
  for (const auto& p : partial) {
    const double y = p.sum - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
    sumsq += p.sumsq;
  }

  const double n = double(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean);
  out.estimate = mean;
  out.std_error = samples > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  return out;
}

// -------------------------------------------------------------- nested oracle
//
// Everything below is deliberately self-contained: its own Gauss rule, its own
// adaptive driver, its own Fourier transform of the profile, and a numeric
// azimuthal average, so it validates the production reductions without
// sharing code with them.

namespace {

constexpr double kOrNode[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                               0.9602898564975363};
constexpr double kOrWeight[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};

template <class F>
double gl8(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), s = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 4; ++i)
    acc += kOrWeight[i] * (f(c - s * kOrNode[i]) + f(c + s * kOrNode[i]));
  return acc * s;
}

struct OrAccum {
  double value = 0.0;
  double err = 0.0;
  long long panels = 0;
};

// Bisection driver: accept a panel when the whole-vs-halves discrepancy meets
// the proportional share, with the same width guard against aliased
// oscillations used everywhere in this project.
template <class F>
void gl8_adapt(const F& f, double a, double b, double share_per_width, double width_cap,
               int depth, OrAccum& acc) {
  const double whole = gl8(f, a, b);
  const double mid = 0.5 * (a + b);
  const double refined = gl8(f, a, mid) + gl8(f, mid, b);
  acc.panels += 3;
  const double err = std::abs(whole - refined);
  const double width = b - a;
  const double target = share_per_width * width;
  const bool width_ok = width_cap <= 0.0 || width <= width_cap;
  const bool accept = (err <= target && width_ok) || err <= 0.02 * target;
  if (accept || depth >= 40 || mid <= a || mid >= b) {
    acc.value += refined;
    acc.err += err;
    return;
  }
  gl8_adapt(f, a, mid, share_per_width, width_cap, depth + 1, acc);
  gl8_adapt(f, mid, b, share_per_width, width_cap, depth + 1, acc);
}

struct OrSegment {
  double t0, h, v0, slope;
};

struct OrProfile {
  std::vector<OrSegment> segments;
  double tau = 0.0;
  double decay = 0.0;  // sum of |slope jumps|, so |F(w)| <= decay / w^2
};

OrProfile make_or_profile(const VelocityProfile& profile) {
  OrProfile out;
  const auto pts = profile.breakpoints();
  out.tau = pts.back().time;
  double prev_slope = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double h = pts[i].time - pts[i - 1].time;
    const double slope = (pts[i].velocity - pts[i - 1].velocity) / h;
    out.segments.push_back({pts[i - 1].time, h, pts[i - 1].velocity, slope});
    out.decay += std::abs(slope - prev_slope);
    prev_slope = slope;
  }
  out.decay += std::abs(prev_slope);
  return out;
}

// |int u'(t) e^{iwt} dt|^2 by composite Gauss panels holding the phase span
// per panel below ~2 radians.
double or_power(const OrProfile& p, double omega) {
  std::complex<double> total(0.0, 0.0);
  for (const auto& seg : p.segments) {
    const int panels = 1 + int(std::abs(omega) * seg.h / 2.0);
    const double h = seg.h / panels;
    for (int k = 0; k < panels; ++k) {
      const double c = seg.t0 + (k + 0.5) * h, s = 0.5 * h;
      for (int i = 0; i < 4; ++i)
        for (double t : {c - s * kOrNode[i], c + s * kOrNode[i]}) {
          const double v = seg.v0 + seg.slope * (t - seg.t0);
          total += kOrWeight[i] * s * v *
                   std::complex<double>(std::cos(omega * t), std::sin(omega * t));
        }
    }
  }
  return std::norm(total);
}

struct OrAngular {
  double mean_sin2 = 0.0;  // azimuthal average of sin^2 from a 16-entry table
  double q(double c) const { return 1.0 - (1.0 - c * c) * mean_sin2; }
};

OrAngular make_or_angular() {
  OrAngular out;
  for (int k = 0; k < 16; ++k) {
    const double phi = 2.0 * kPi * (k + 0.5) / 16.0;
    const double s = std::sin(phi);
    out.mean_sin2 += s * s;
  }
  out.mean_sin2 /= 16.0;
  return out;
}

// int_{-1}^{1} Q(c) cos(kfreq c) dc with at most a half oscillation per panel
double osc_angular(const OrAngular& ang, double kfreq, long long& panels) {
  const int n = 1 + int(2.0 * std::abs(kfreq) / kPi);
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = -1.0 + 2.0 * double(k) / n;
    const double b = -1.0 + 2.0 * double(k + 1) / n;
    total += gl8([&](double c) { return ang.q(c) * std::cos(kfreq * c); }, a, b);
  }
  panels += n;
  return total;
}

} // namespace

OracleResult nested_w1osc(const VelocityProfile& profile, double separation, int epsilon,
                          double e2, double tol) {
  require(std::isfinite(tol) && tol >= 1e-7, "nested oracle tolerance must be >= 1e-7");
  require(epsilon == -1 || epsilon == 0 || epsilon == 1, "epsilon must be -1, 0 or +1");
  require(std::isfinite(separation) && separation >= 0.0, "separation must be non-negative");
  require(std::isfinite(e2) && e2 > 0.0, "coupling e^2 must be positive");

  OracleResult out;
  if (profile.is_zero()) return out;

  const auto op = make_or_profile(profile);
  const auto ang = make_or_angular();
  const double c0 = epsilon == 0 ? 0.25 : 0.5;
  const double norm = e2 / std::pow(2.0 * kPi, 3) * 2.0 * kPi;  // azimuth measure
  const double omega0 = 60.0 / op.tau;
  const double decay2 = op.decay * op.decay;

  long long panels = 0;
  double qint = 0.0;  // int_{-1}^{1} Q(c) dc
  qint += gl8([&](double c) { return ang.q(c); }, -1.0, 0.0);
  qint += gl8([&](double c) { return ang.q(c); }, 0.0, 1.0);
  panels += 2;

  const auto moment_f = [&](double w) { return w * or_power(op, w); };
  const auto osc_f = [&](double w) {
    return w * or_power(op, w) * osc_angular(ang, 2.0 * w * separation, panels);
  };

  // coarse magnitude for the first error budget
  double coarse = 0.0;
  for (int k = 0; k < 64; ++k)
    coarse += gl8(moment_f, omega0 * k / 64.0, omega0 * (k + 1) / 64.0);
  panels += 64;
  const double scale_c = norm * c0 * qint;
  const double rough = std::abs(scale_c * coarse) * (epsilon == 0 ? 1.0 : 2.0);

  const double cap_c = 2.0 * kPi / op.tau;
  const double cap_o = separation > 0.0 ? std::min(cap_c, kPi / (2.0 * separation)) : cap_c;

  double estimate = 0.0, bound = 0.0;
  double target = 0.5 * tol * std::max(rough, 1e-300);
  for (int pass = 0; pass < 3; ++pass) {
    estimate = 0.0;
    bound = 0.0;

    // constant interference piece: scale_c * int w |F|^2
    {
      OrAccum acc;
      gl8_adapt(moment_f, 0.0, omega0, 0.4 * target / scale_c / omega0, cap_c, 0, acc);
      double omega = omega0;
      for (int k = 0; k < 60; ++k) {
        const double tail = scale_c * decay2 / (2.0 * omega * omega);
        if (tail <= 0.1 * target) {
          acc.err += tail / scale_c;
          break;
        }
        gl8_adapt(moment_f, omega, 2.0 * omega, 0.1 * target / scale_c / omega, cap_c, 0, acc);
        omega *= 2.0;
      }
      estimate += scale_c * acc.value;
      bound += scale_c * acc.err;
      panels += acc.panels;
    }

    // oscillatory interference piece: -(eps/2) * norm * int w |F|^2 O(w)
    if (epsilon != 0) {
      const double scale_o = 0.5 * norm;  // magnitude; sign applied at the end
      OrAccum acc;
      gl8_adapt(osc_f, 0.0, omega0, 0.4 * target / scale_o / omega0, cap_o, 0, acc);
      double omega = omega0;
      for (int k = 0; k < 60; ++k) {
        // |O(w)| <= min(qint, 1/(w R)) by integration by parts
        const double oc = separation > 0.0
                              ? std::min(qint, 1.0 / (omega * separation))
                              : qint;
        const double tail = scale_o * oc * decay2 / (2.0 * omega * omega);
        if (tail <= 0.1 * target) {
          acc.err += tail / scale_o;
          break;
        }
        gl8_adapt(osc_f, omega, 2.0 * omega, 0.1 * target / scale_o / omega, cap_o, 0, acc);
        omega *= 2.0;
      }
      estimate += -0.5 * double(epsilon) * norm * acc.value;
      bound += scale_o * acc.err;
      panels += acc.panels;
    }

    if (bound <= tol * std::abs(estimate)) break;
    target = std::max(0.5 * tol * std::abs(estimate), 1e-13 * target);
  }

  out.estimate = estimate;
  out.std_error = bound;
  out.samples_or_panels = panels;
  out.tolerance_met = bound <= tol * std::max(std::abs(estimate), 1e-300);
  return out;
}

// ---------------------------------------------------------------- groove sum

double brute_groove_phasor(double kappa, int grooves) {
  require(grooves >= 1 && grooves <= 100'000, "groove count must lie in [1, 1e5]");
  require(std::isfinite(kappa), "phase must be finite");
  const long double two_pi = 2.0L * 3.141592653589793238462643383279502884L;
  const long double step = remainderl((long double)kappa, two_pi);
  long double theta = 0.0L, re = 0.0L, im = 0.0L;
  for (int n = 0; n < 2 * grooves; ++n) {
    const long double sign = (n % 2 == 0) ? 1.0L : -1.0L;
    re += sign * cosl(theta);
    im += sign * sinl(theta);
    theta = remainderl(theta + step, two_pi);
  }
  return double(re * re + im * im);
}

} // namespace spdecohere
