#include "mcvlab/engine.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "mcvlab/errors.hpp"

namespace mcvlab {

namespace {

std::atomic<std::uint64_t> g_interaction_evals{0};

// Compensated (Neumaier) accumulation; summation order is the fixed
// left-to-right particle order, part of the reproducibility contract.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    comp += (std::fabs(sum) >= std::fabs(v)) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

double compensated_mean(std::span<const double> xs) {
  NeumaierSum acc;
  for (double x : xs) acc.add(x);
  return acc.value() / static_cast<double>(xs.size());
}

template <class Model>
std::array<double, Model::statistic_dim> statistic_mean(const Model& m,
                                                        std::span<const double> states) {
  constexpr std::size_t P = Model::statistic_dim;
  std::array<NeumaierSum, P> acc{};
  for (double x : states) {
    const auto a = m.statistic(x);
    for (std::size_t p = 0; p < P; ++p) acc[p].add(a[p]);
  }
  std::array<double, P> out{};
  for (std::size_t p = 0; p < P; ++p)
    out[p] = acc[p].value() / static_cast<double>(states.size());
  return out;
}

template <std::size_t P>
bool all_finite(const std::array<double, P>& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

bool all_finite(std::span<const double> xs) {
  for (double v : xs)
    if (!std::isfinite(v)) return false;
  return true;
}

// Kernel values v_i = (1/N) #{j : X^j >= X^i}; ties counted inclusively, so
// v_i = (N - #{j : X^j < X^i}) / N. Ranks come from sorting an index
// permutation kept across steps: after a warm-up the per-step displacements
// are small, the permutation stays nearly sorted and the tandem insertion
// sort runs in O(N + inversions); cold calls sort outright. The values do
// not depend on the order within tied groups, so any sorting strategy yields
// the same kernel.
// Returns false when a state is non-finite (nothing is sorted in that case).
bool burgers_kernel_values(std::span<const double> states, std::vector<double>& keys,
                           std::vector<int>& order, std::vector<double>& out,
                           bool warm_order) {
  const std::size_t n = states.size();
  double probe = 0.0;
  for (double x : states) probe += x;
  if (!std::isfinite(probe)) return false;

  if (order.size() != n) {
    order.resize(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    warm_order = false;
  }
  keys.resize(n);
  if (!warm_order)
    std::sort(order.begin(), order.end(), [states](int a, int b) {
      return states[static_cast<std::size_t>(a)] < states[static_cast<std::size_t>(b)];
    });
  for (std::size_t r = 0; r < n; ++r) keys[r] = states[static_cast<std::size_t>(order[r])];
  for (std::size_t i = 1; i < n; ++i) {
    const double key = keys[i];
    const int id = order[i];
    std::size_t j = i;
    for (; j > 0 && keys[j - 1] > key; --j) {
      keys[j] = keys[j - 1];
      order[j] = order[j - 1];
    }
    keys[j] = key;
    order[j] = id;
  }

  out.resize(n);
  std::size_t r = 0;
  while (r < n) {
    std::size_t tied_end = r + 1;
    while (tied_end < n && keys[tied_end] == keys[r]) ++tied_end;
    const double v = static_cast<double>(n - r) / static_cast<double>(n);
    for (std::size_t q = r; q < tied_end; ++q)
      out[static_cast<std::size_t>(order[q])] = v;
    r = tied_end;
  }
  return true;
}

template <class Model>
void update_moment_system(const Model& m, double t, double h, std::span<double> states,
                          const double* dw,
                          const std::array<double, Model::statistic_dim>& y) {
  double* x = states.data();
  const std::size_t n = states.size();
  for (std::size_t i = 0; i < n; ++i)
    x[i] += m.drift(t, y, x[i]) * h + m.diffusion(t, y, x[i]) * dw[i];
}

void update_kernel_system(const ViscousBurgers& m, double t, double h,
                          std::span<double> states, const double* dw,
                          const double* kernel) {
  double* x = states.data();
  const std::size_t n = states.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::array<double, 1> y{kernel[i]};
    x[i] += m.drift(t, y, x[i]) * h + m.diffusion(t, y, x[i]) * dw[i];
  }
}

// One system advanced over the full grid. Reports the first step at which a
// non-finite state was detected, or -1.
template <class Model>
class System {
 public:
  System(const Model& m, std::span<const double> initial_draws) : model_(m) {
    states_.resize(initial_draws.size());
    for (std::size_t i = 0; i < states_.size(); ++i)
      states_[i] = m.sample_initial(initial_draws[i]);
  }

  // Interaction of the pre-step ensemble, then the Euler update.
  bool step(double t, double h, const double* dw) {
    ++evals_;
    if constexpr (Model::kernel_interaction) {
      if (!burgers_kernel_values(states_, keys_, order_, kernel_, evals_ > 2))
        return false;
      update_kernel_system(model_, t, h, states_, dw, kernel_.data());
    } else {
      const auto y = statistic_mean(model_, std::span<const double>(states_));
      if (!all_finite(y)) return false;
      update_moment_system(model_, t, h, states_, dw, y);
    }
    return true;
  }

  bool finite() const { return all_finite(std::span<const double>(states_)); }
  std::span<const double> states() const { return states_; }
  std::uint64_t evals() const { return evals_; }

 private:
  const Model& model_;
  std::vector<double> states_;
  std::vector<double> kernel_;
  std::vector<double> keys_;
  std::vector<int> order_;
  std::uint64_t evals_ = 0;
};

double observable_mean(const Observable& obs, std::span<const double> states) {
  NeumaierSum acc;
  switch (obs.kind) {
    case Observable::Kind::first_moment:
      for (double x : states) acc.add(x);
      break;
    case Observable::Kind::second_moment:
      for (double x : states) acc.add(x * x);
      break;
    case Observable::Kind::indicator_above:
      for (double x : states) acc.add(x >= obs.threshold ? 1.0 : 0.0);
      break;
  }
  return acc.value() / static_cast<double>(states.size());
}

template <class Model>
RunOutput run_triple(const Model& model, const TimeGrid& grid, int n_pairs,
                     const DriverBlock& block, std::span<const Observable> observables,
                     const SimulateOptions& options) {
  const int n = n_pairs;
  const int n2 = 2 * n;
  if (block.columns != n2 || block.steps != grid.steps)
    throw std::invalid_argument("simulate_run: driver block shaped (" +
                                std::to_string(block.steps) + "," + std::to_string(block.columns) +
                                "), expected (" + std::to_string(grid.steps) + "," +
                                std::to_string(n2) + ")");

  const std::span<const double> init(block.initial_draws);
  System<Model> big(model, init);
  System<Model> sub_a(model, init.subspan(0, n));
  System<Model> sub_b(model, init.subspan(n, n));

  RunOutput out;
  const bool record = options.record_mean_paths;
  auto record_means = [&] {
    if (!record) return;
    out.mean_path_big.push_back(compensated_mean(big.states()));
    out.mean_path_a.push_back(compensated_mean(sub_a.states()));
    out.mean_path_b.push_back(compensated_mean(sub_b.states()));
  };
  record_means();

  for (int k = 0; k < grid.steps; ++k) {
    const double t = grid.time_at(k);
    const double* dw = block.increments_row(k);
    const bool ok = big.step(t, grid.h, dw) && sub_a.step(t, grid.h, dw) &&
                    sub_b.step(t, grid.h, dw + n);
    if (!ok) {
      out.divergent = true;
      out.divergent_step = k;
      break;
    }
    record_means();
  }
  if (!out.divergent && !(big.finite() && sub_a.finite() && sub_b.finite())) {
    out.divergent = true;
    out.divergent_step = grid.steps;
  }
  g_interaction_evals.fetch_add(big.evals() + sub_a.evals() + sub_b.evals(),
                                std::memory_order_relaxed);
  if (out.divergent) return out;

  out.observables.reserve(observables.size());
  for (const Observable& obs : observables) {
    RunOutput::ObservableMeans m;
    m.mean_big = observable_mean(obs, big.states());
    m.mean_a = observable_mean(obs, sub_a.states());
    m.mean_b = observable_mean(obs, sub_b.states());
    m.antithetic_diff = m.mean_big - 0.5 * (m.mean_a + m.mean_b);
    out.observables.push_back(m);
  }
  return out;
}

template <class Model>
SingleRunOutput run_single(const Model& model, const TimeGrid& grid, int n_particles,
                           const DriverBlock& block,
                           std::span<const Observable> observables) {
  if (block.columns < n_particles || block.steps != grid.steps)
    throw std::invalid_argument("simulate_single_run: driver block too small");

  System<Model> sys(model, std::span<const double>(block.initial_draws).subspan(0, n_particles));
  SingleRunOutput out;
  for (int k = 0; k < grid.steps; ++k) {
    if (!sys.step(grid.time_at(k), grid.h, block.increments_row(k))) {
      out.divergent = true;
      out.divergent_step = k;
      break;
    }
  }
  if (!out.divergent && !sys.finite()) {
    out.divergent = true;
    out.divergent_step = grid.steps;
  }
  g_interaction_evals.fetch_add(sys.evals(), std::memory_order_relaxed);
  if (out.divergent) return out;

  out.means.reserve(observables.size());
  for (const Observable& obs : observables) out.means.push_back(observable_mean(obs, sys.states()));
  return out;
}

}  // namespace

std::string Observable::name() const {
  switch (kind) {
    case Kind::first_moment: return "first-moment";
    case Kind::second_moment: return "second-moment";
    case Kind::indicator_above: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "indicator-above-%g", threshold);
      return buf;
    }
  }
  return "observable";
}

InteractionValue interaction(const ModelSpec& model, const ParticleEnsemble& ensemble) {
  if (ensemble.states.empty())
    throw std::invalid_argument("interaction: ensemble must be nonempty");
  g_interaction_evals.fetch_add(1, std::memory_order_relaxed);
  return std::visit(
      [&](const auto& m) -> InteractionValue {
        using M = std::decay_t<decltype(m)>;
        InteractionValue iv;
        if constexpr (M::kernel_interaction) {
          iv.per_particle = true;
          std::vector<double> keys;
          std::vector<int> order;
          burgers_kernel_values(ensemble.states, keys, order, iv.values, false);
          if (iv.values.empty()) iv.values.assign(ensemble.states.size(),
                                                  std::numeric_limits<double>::quiet_NaN());
        } else {
          iv.per_particle = false;
          const auto y = statistic_mean(m, std::span<const double>(ensemble.states));
          iv.values.assign(y.begin(), y.end());
        }
        return iv;
      },
      model);
}

ParticleEnsemble euler_step(const ModelSpec& model, const TimeGrid& grid,
                            const ParticleEnsemble& ensemble,
                            std::span<const double> increments_row) {
  if (ensemble.grid_index >= grid.steps)
    throw std::invalid_argument("euler_step: ensemble already at the final grid index");
  if (increments_row.size() != ensemble.states.size())
    throw std::invalid_argument("euler_step: increment row size does not match ensemble");

  const InteractionValue iv = interaction(model, ensemble);
  const double t = grid.time_at(ensemble.grid_index);

  ParticleEnsemble next;
  next.states = ensemble.states;
  next.grid_index = ensemble.grid_index + 1;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (M::kernel_interaction) {
          update_kernel_system(m, t, grid.h, next.states, increments_row.data(),
                               iv.values.data());
        } else {
          std::array<double, M::statistic_dim> y{};
          for (std::size_t p = 0; p < M::statistic_dim; ++p) y[p] = iv.values[p];
          update_moment_system(m, t, grid.h, next.states, increments_row.data(), y);
        }
      },
      model);
  return next;
}

RunOutput simulate_run(const ModelSpec& model, const TimeGrid& grid, int n_pairs,
                       const DriverBlock& block, std::span<const Observable> observables,
                       const SimulateOptions& options) {
  if (n_pairs < 1) throw std::invalid_argument("simulate_run: n_pairs must be >= 1");
  return std::visit(
      [&](const auto& m) { return run_triple(m, grid, n_pairs, block, observables, options); },
      model);
}

SingleRunOutput simulate_single_run(const ModelSpec& model, const TimeGrid& grid,
                                    int n_particles, const DriverBlock& block,
                                    std::span<const Observable> observables) {
  if (n_particles < 1)
    throw std::invalid_argument("simulate_single_run: n_particles must be >= 1");
  return std::visit(
      [&](const auto& m) { return run_single(m, grid, n_particles, block, observables); },
      model);
}

std::uint64_t interaction_eval_count() {
  return g_interaction_evals.load(std::memory_order_relaxed);
}

void reset_interaction_eval_count() { g_interaction_evals.store(0, std::memory_order_relaxed); }

}  // namespace mcvlab
