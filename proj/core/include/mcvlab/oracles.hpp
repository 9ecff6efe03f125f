#pragma once

#include "mcvlab/model.hpp"

namespace mcvlab::oracles {

struct MomentPair {
  double m1 = 0.0;
  double m2 = 0.0;
};

/// Standard normal CDF via the complementary error function.
double std_normal_cdf(double x);

/// log of std_normal_cdf, stable deep into the left tail.
double log_std_normal_cdf(double x);

/// Exact moments of the mean-field OU limit at time t:
///   m1 = x0 e^{(gamma+beta)t},
///   m2 = x0^2 e^{2(gamma+beta)t} + v2/(2 gamma) (e^{2 gamma t} - 1),
/// with the gamma -> 0 limit (v2 * t) substituted where needed.
MomentPair ou_exact_moments(double t, const GeneralizedOu& p);

/// E[X^h_{kh}] = (1 + (gamma+beta) h)^k x0 of the Euler-discretized OU limit;
/// independent of the particle count.
double ou_discretized_first_moment(long k, double h, const GeneralizedOu& p);

/// Closed-form E[(X^{1,N,h}_{kh})^2] of the N-particle discretized OU system.
double ou_discretized_second_moment(long k, double h, long n_particles,
                                    const GeneralizedOu& p);

struct OuSecondMoments {
  double second_moment = 0.0;  // E[(X^1)^2]
  double cross_moment = 0.0;   // E[X^1 X^2]
};

/// Independent route to the same quantity: iterates the coupled pair of
/// linear recursions for E[(X^1)^2] and E[X^1 X^2] from (x0^2, x0^2).
/// Requires n_particles >= 2.
OuSecondMoments ou_second_moment_recursion(long k, double h, long n_particles,
                                           const GeneralizedOu& p);

/// E[(X^h_T)^2] - E[(X^{1,N,h}_T)^2]: the particle bias of the discretized
/// second moment, exactly proportional to 1/N.
double ou_particle_bias_second_moment(long k, double h, long n_particles,
                                      const GeneralizedOu& p);

/// Discretized moments of the polynomial-drift limit SDE, iterating
///   m1' = (1 + (gamma+1) h - m2 h) m1
///   m2' = (1 + gamma h - m2 h)^2 m2 + 2 (1 + gamma h - m2 h) h m1^2 + m2 h + m1^2 h^2
/// from (x0, x0^2) for `steps` steps.
MomentPair polynomial_moment_recursion(long steps, double h, double gamma, double x0);

/// Complementary CDF solution of the viscous Burgers equation started from
/// a unit step at zero (Cole-Hopf form), evaluated in the log domain so that
/// large |x| neither overflows nor loses the tail.
double burgers_cole_hopf(double t, double x, double upsilon);

}  // namespace mcvlab::oracles
