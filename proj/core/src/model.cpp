#include "mcvlab/model.hpp"

#include <cmath>
#include <stdexcept>

#include "mcvlab/errors.hpp"

namespace mcvlab {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ConfigError(std::string("model parameter ") + name + " must be finite");
}

template <std::size_t P>
std::array<double, P> to_array(std::span<const double> y, const char* op) {
  if (y.size() != P)
    throw std::invalid_argument(std::string(op) + ": interaction entry has arity " +
                                std::to_string(y.size()) + ", expected " + std::to_string(P));
  std::array<double, P> out{};
  for (std::size_t i = 0; i < P; ++i) out[i] = y[i];
  return out;
}

}  // namespace

void validate(const ModelSpec& model) {
  std::visit(
      [](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, GeneralizedOu>) {
          require_finite(m.gamma, "gamma");
          require_finite(m.beta, "beta");
          require_finite(m.v2, "v2");
          require_finite(m.x0, "x0");
          if (m.v2 < 0.0) throw ConfigError("generalized-ou: v2 must be >= 0");
        } else if constexpr (std::is_same_v<M, PlaneRotator>) {
          require_finite(m.coupling, "coupling");
          require_finite(m.k_b_t, "kbt");
          require_finite(m.init_mean, "init-mean");
          require_finite(m.init_var, "init-var");
          if (m.k_b_t < 0.0) throw ConfigError("rotator: kbt must be >= 0");
          if (m.init_var < 0.0) throw ConfigError("rotator: init-var must be >= 0");
        } else if constexpr (std::is_same_v<M, PolynomialDrift>) {
          require_finite(m.gamma, "gamma");
          require_finite(m.x0, "x0");
        } else {
          require_finite(m.upsilon, "upsilon");
          require_finite(m.x0, "x0");
          if (!(m.upsilon > 0.0)) throw ConfigError("burgers: upsilon must be > 0");
        }
      },
      model);
}

bool is_kernel_model(const ModelSpec& model) {
  return std::holds_alternative<ViscousBurgers>(model);
}

std::size_t statistic_dimension(const ModelSpec& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using M = std::decay_t<decltype(m)>;
        if constexpr (M::kernel_interaction)
          throw std::invalid_argument("statistic_dimension: kernel model has no moment statistic");
        else
          return M::statistic_dim;
      },
      model);
}

std::vector<double> statistic(const ModelSpec& model, double x) {
  return std::visit(
      [x](const auto& m) -> std::vector<double> {
        using M = std::decay_t<decltype(m)>;
        if constexpr (M::kernel_interaction) {
          throw std::invalid_argument("statistic: the Burgers kernel model has no alpha");
        } else {
          const auto a = m.statistic(x);
          return std::vector<double>(a.begin(), a.end());
        }
      },
      model);
}

double drift(const ModelSpec& model, double t, std::span<const double> y, double x) {
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (M::kernel_interaction)
          return m.drift(t, to_array<1>(y, "drift"), x);
        else
          return m.drift(t, to_array<M::statistic_dim>(y, "drift"), x);
      },
      model);
}

double diffusion(const ModelSpec& model, double t, std::span<const double> y, double x) {
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (M::kernel_interaction)
          return m.diffusion(t, to_array<1>(y, "diffusion"), x);
        else
          return m.diffusion(t, to_array<M::statistic_dim>(y, "diffusion"), x);
      },
      model);
}

double sample_initial(const ModelSpec& model, double gaussian_draw) {
  return std::visit([gaussian_draw](const auto& m) { return m.sample_initial(gaussian_draw); },
                    model);
}

std::string model_name(const ModelSpec& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, GeneralizedOu>) return "generalized-ou";
        else if constexpr (std::is_same_v<M, PlaneRotator>) return "rotator";
        else if constexpr (std::is_same_v<M, PolynomialDrift>) return "polynomial";
        else return "burgers";
      },
      model);
}

}  // namespace mcvlab
