#pragma once

// Test-side oracles, independent of the library implementation paths they
// check.

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace testutil {

// literal O(N^2) evaluation of v_i = (1/N) #{j : X^j >= X^i}
inline std::vector<double> brute_force_burgers_kernel(std::span<const double> states) {
  const std::size_t n = states.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (states[j] >= states[i]) ++count;
    out[i] = static_cast<double>(count) / static_cast<double>(n);
  }
  return out;
}

struct TwoPassStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

inline TwoPassStats two_pass_stats(std::span<const double> xs) {
  TwoPassStats s;
  long double sum = 0.0L;
  for (double x : xs) sum += x;
  s.mean = static_cast<double>(sum / static_cast<long double>(xs.size()));
  long double m2 = 0.0L;
  for (double x : xs) {
    const long double d = x - static_cast<long double>(s.mean);
    m2 += d * d;
  }
  s.variance = static_cast<double>(m2 / static_cast<long double>(xs.size() - 1));
  return s;
}

// closed-form solution of dx/dt = -sin(x): tan(x_t/2) = tan(x_0/2) e^{-t}
inline double kuramoto_zero_noise_ode(double x0, double t) {
  return 2.0 * std::atan(std::tan(0.5 * x0) * std::exp(-t));
}

struct LongDoublePair {
  long double m1 = 0.0L;
  long double m2 = 0.0L;
};

// extended-precision re-implementation of the polynomial moment recursion
inline LongDoublePair polynomial_recursion_long_double(long steps, long double h,
                                                       long double gamma, long double x0) {
  long double m1 = x0;
  long double m2 = x0 * x0;
  for (long j = 0; j < steps; ++j) {
    const long double a = 1.0L + gamma * h - m2 * h;
    const long double n1 = (1.0L + (gamma + 1.0L) * h - m2 * h) * m1;
    const long double n2 = a * a * m2 + 2.0L * a * h * m1 * m1 + m2 * h + m1 * m1 * h * h;
    m1 = n1;
    m2 = n2;
  }
  return {m1, m2};
}

inline std::mt19937_64 fixed_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// magnitude in [lo_mag, hi_mag] with a random sign; keeps OU parameter draws
// away from the degenerate denominators
inline double signed_uniform_away_from_zero(std::mt19937_64& rng, double lo_mag,
                                            double hi_mag) {
  const double mag = uniform(rng, lo_mag, hi_mag);
  return (rng() & 1) ? mag : -mag;
}

}  // namespace testutil
