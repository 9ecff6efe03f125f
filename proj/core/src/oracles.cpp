#include "mcvlab/oracles.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mcvlab::oracles {

namespace {

constexpr double kLogRoot2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

// ((1 + a h)^{2k} - 1) / (2a + a^2 h), continuously extended to k*h at a = 0.
double geometric_factor(double a, double h, long k) {
  if (a == 0.0) return static_cast<double>(k) * h;
  const double denom = 2.0 * a + a * a * h;
  if (denom == 0.0)
    throw std::domain_error("ou oracle: vanishing denominator 2a + a^2 h at a = " +
                            std::to_string(a));
  return (std::pow(1.0 + a * h, 2.0 * static_cast<double>(k)) - 1.0) / denom;
}

}  // namespace

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double log_std_normal_cdf(double x) {
  if (x > -36.0) return std::log(std_normal_cdf(x));
  // left tail: Phi(x) = phi(x)/(-x) (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...)
  const double inv2 = 1.0 / (x * x);
  const double series = -inv2 * (1.0 - inv2 * (3.0 - 15.0 * inv2));
  return -0.5 * x * x - std::log(-x) - kLogRoot2Pi + std::log1p(series);
}

MomentPair ou_exact_moments(double t, const GeneralizedOu& p) {
  const double a = p.gamma + p.beta;
  const double m1 = p.x0 * std::exp(a * t);
  const double noise_term =
      (p.gamma == 0.0) ? p.v2 * t : p.v2 / (2.0 * p.gamma) * std::expm1(2.0 * p.gamma * t);
  const double m2 = m1 * m1 + noise_term;
  return {m1, m2};
}

double ou_discretized_first_moment(long k, double h, const GeneralizedOu& p) {
  if (k < 0) throw std::invalid_argument("ou_discretized_first_moment: k must be >= 0");
  return std::pow(1.0 + (p.gamma + p.beta) * h, static_cast<double>(k)) * p.x0;
}

double ou_discretized_second_moment(long k, double h, long n_particles,
                                    const GeneralizedOu& p) {
  if (k < 0) throw std::invalid_argument("ou_discretized_second_moment: k must be >= 0");
  if (n_particles < 1)
    throw std::invalid_argument("ou_discretized_second_moment: need n_particles >= 1");
  const double a = p.gamma + p.beta;
  const double n = static_cast<double>(n_particles);
  const double growth = std::pow(1.0 + a * h, 2.0 * static_cast<double>(k));
  return growth * p.x0 * p.x0 +
         (n - 1.0) / n * geometric_factor(p.gamma, h, k) * p.v2 +
         (1.0 / n) * geometric_factor(a, h, k) * p.v2;
}

OuSecondMoments ou_second_moment_recursion(long k, double h, long n_particles,
                                           const GeneralizedOu& p) {
  if (k < 0) throw std::invalid_argument("ou_second_moment_recursion: k must be >= 0");
  if (n_particles < 2)
    throw std::invalid_argument("ou_second_moment_recursion: need n_particles >= 2");
  const double n = static_cast<double>(n_particles);
  const double g1 = 1.0 + p.gamma * h;
  const double coupling = (2.0 * g1 + p.beta * h) * p.beta * h;
  double second = p.x0 * p.x0;
  double cross = p.x0 * p.x0;
  for (long j = 0; j < k; ++j) {
    const double mixed = coupling * (second / n + (n - 1.0) / n * cross);
    const double next_second = g1 * g1 * second + mixed + p.v2 * h;
    const double next_cross = g1 * g1 * cross + mixed;
    second = next_second;
    cross = next_cross;
  }
  return {second, cross};
}

double ou_particle_bias_second_moment(long k, double h, long n_particles,
                                      const GeneralizedOu& p) {
  if (k < 0) throw std::invalid_argument("ou_particle_bias_second_moment: k must be >= 0");
  if (n_particles < 1)
    throw std::invalid_argument("ou_particle_bias_second_moment: need n_particles >= 1");
  const double a = p.gamma + p.beta;
  return (geometric_factor(p.gamma, h, k) - geometric_factor(a, h, k)) * p.v2 /
         static_cast<double>(n_particles);
}

MomentPair polynomial_moment_recursion(long steps, double h, double gamma, double x0) {
  if (steps < 0) throw std::invalid_argument("polynomial_moment_recursion: steps must be >= 0");
  double m1 = x0;
  double m2 = x0 * x0;
  for (long j = 0; j < steps; ++j) {
    const double a = 1.0 + gamma * h - m2 * h;
    const double next_m1 = (1.0 + (gamma + 1.0) * h - m2 * h) * m1;
    const double next_m2 = a * a * m2 + 2.0 * a * h * m1 * m1 + m2 * h + m1 * m1 * h * h;
    m1 = next_m1;
    m2 = next_m2;
  }
  return {m1, m2};
}

double burgers_cole_hopf(double t, double x, double upsilon) {
  if (!(t > 0.0)) throw std::domain_error("burgers_cole_hopf: t must be > 0");
  if (!(upsilon > 0.0)) throw std::domain_error("burgers_cole_hopf: upsilon must be > 0");
  const double scale = upsilon * std::sqrt(t);
  const double log_num = log_std_normal_cdf((t - x) / scale);
  const double log_other = (2.0 * x - t) / (2.0 * upsilon * upsilon) +
                           log_std_normal_cdf(x / scale);
  // F = N(A) / (e^B N(C) + N(A)) = 1 / (1 + exp(log_other - log_num))
  return 1.0 / (1.0 + std::exp(log_other - log_num));
}

}  // namespace mcvlab::oracles
