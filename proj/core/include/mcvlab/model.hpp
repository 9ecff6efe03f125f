#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mcvlab {

// ---------------------------------------------------------------------------
// The four scalar mean-field models. Moment-type models see the ensemble
// through the empirical mean of a statistic alpha (dimension statistic_dim);
// the Burgers model interacts through a per-particle rank kernel instead.
// All coefficient functions are pure; defaults are the standard test cases.
// ---------------------------------------------------------------------------

/// dX = (gamma X + beta E[X]) dt + sqrt(v2) dW,  X(0) = x0. alpha(x) = x.
struct GeneralizedOu {
  double gamma = -0.5;
  double beta = 0.8;
  double v2 = 0.5;
  double x0 = 1.0;

  static constexpr std::size_t statistic_dim = 1;
  static constexpr bool kernel_interaction = false;

  std::array<double, 1> statistic(double x) const { return {x}; }
  double drift(double /*t*/, const std::array<double, 1>& y, double x) const {
    return gamma * x + beta * y[0];
  }
  double diffusion(double /*t*/, const std::array<double, 1>& /*y*/, double /*x*/) const {
    return std::sqrt(v2);
  }
  double sample_initial(double /*gaussian*/) const { return x0; }
};

/// Coupled oscillators: dX = (K integral sin(y - X) dP(y) - sin X) dt
/// + sqrt(2 kB T) dW, X(0) ~ N(init_mean, init_var).
/// alpha(x) = (sin x, cos x) expands the integral.
struct PlaneRotator {
  double coupling = 1.0;
  double k_b_t = 0.125;
  double init_mean = 0.78539816339744831;  // pi/4
  double init_var = 2.3561944901923449;    // 3*pi/4 (variance, not std dev)

  static constexpr std::size_t statistic_dim = 2;
  static constexpr bool kernel_interaction = false;

  std::array<double, 2> statistic(double x) const { return {std::sin(x), std::cos(x)}; }
  double drift(double /*t*/, const std::array<double, 2>& y, double x) const {
    return coupling * (std::cos(x) * y[0] - std::sin(x) * y[1]) - std::sin(x);
  }
  double diffusion(double /*t*/, const std::array<double, 2>& /*y*/, double /*x*/) const {
    return std::sqrt(2.0 * k_b_t);
  }
  double sample_initial(double gaussian) const {
    return init_mean + std::sqrt(init_var) * gaussian;
  }
};

/// dX = (gamma X + E[X] - X E[X^2]) dt + X dW,  X(0) = x0. alpha(x) = (x, x^2).
struct PolynomialDrift {
  double gamma = 2.0;
  double x0 = 1.0;

  static constexpr std::size_t statistic_dim = 2;
  static constexpr bool kernel_interaction = false;

  std::array<double, 2> statistic(double x) const { return {x, x * x}; }
  double drift(double /*t*/, const std::array<double, 2>& y, double x) const {
    return gamma * x + y[0] - x * y[1];
  }
  double diffusion(double /*t*/, const std::array<double, 2>& /*y*/, double x) const {
    return x;
  }
  double sample_initial(double /*gaussian*/) const { return x0; }
};

/// dX^i = (1/N) #{j : X^j >= X^i} dt + upsilon dW^i,  X(0) = x0.
/// Kernel interaction: each particle sees its own value of the empirical
/// complementary CDF, not a shared moment vector.
struct ViscousBurgers {
  double upsilon = 0.25;
  double x0 = 0.0;

  static constexpr bool kernel_interaction = true;

  double drift(double /*t*/, const std::array<double, 1>& y, double /*x*/) const { return y[0]; }
  double diffusion(double /*t*/, const std::array<double, 1>& /*y*/, double /*x*/) const {
    return upsilon;
  }
  double sample_initial(double /*gaussian*/) const { return x0; }
};

using ModelSpec = std::variant<GeneralizedOu, PlaneRotator, PolynomialDrift, ViscousBurgers>;

/// Throws ConfigError when a parameter violates its domain
/// (v2 >= 0, k_b_t >= 0, init_var >= 0, upsilon > 0, all finite).
void validate(const ModelSpec& model);

bool is_kernel_model(const ModelSpec& model);

/// Dimension p of the moment statistic; throws for kernel models.
std::size_t statistic_dimension(const ModelSpec& model);

/// alpha(x) for moment-type models; throws std::invalid_argument on Burgers.
std::vector<double> statistic(const ModelSpec& model, double x);

/// Drift b(t, y, x). `y` must have the variant's arity (p for moment models,
/// 1 for the Burgers kernel value).
double drift(const ModelSpec& model, double t, std::span<const double> y, double x);

/// Diffusion sigma(t, y, x), same arity contract as drift().
double diffusion(const ModelSpec& model, double t, std::span<const double> y, double x);

/// Initial state from one standard normal draw (deterministic variants
/// ignore the draw).
double sample_initial(const ModelSpec& model, double gaussian_draw);

std::string model_name(const ModelSpec& model);

}  // namespace mcvlab
