#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mcvlab/model.hpp"
#include "mcvlab/rng.hpp"
#include "mcvlab/time_grid.hpp"

namespace mcvlab {

/// N scalar particle states at grid index k.
struct ParticleEnsemble {
  std::vector<double> states;
  int grid_index = 0;
};

/// Terminal statistic psi evaluated on each particle and averaged.
struct Observable {
  enum class Kind { first_moment, second_moment, indicator_above };

  Kind kind = Kind::first_moment;
  double threshold = 0.0;

  static Observable first_moment() { return {Kind::first_moment, 0.0}; }
  static Observable second_moment() { return {Kind::second_moment, 0.0}; }
  static Observable indicator_above(double c) { return {Kind::indicator_above, c}; }

  double evaluate(double x) const {
    switch (kind) {
      case Kind::first_moment: return x;
      case Kind::second_moment: return x * x;
      case Kind::indicator_above: return x >= threshold ? 1.0 : 0.0;
    }
    return 0.0;
  }
  std::string name() const;
};

/// Mean-field coupling seen by the particles of one ensemble: either the
/// shared statistic vector (1/N) sum alpha(X^j) of a moment model, or the
/// per-particle Burgers kernel values (1/N) #{j : X^j >= X^i}.
struct InteractionValue {
  bool per_particle = false;
  std::vector<double> values;

  std::span<const double> entry(std::size_t particle) const {
    if (per_particle) return {values.data() + particle, 1};
    return {values.data(), values.size()};
  }
};

/// Empirical means at the final time for the antithetic triple, per observable.
struct RunOutput {
  struct ObservableMeans {
    double mean_big = 0.0;        // 2N-particle system
    double mean_a = 0.0;          // first N-particle subsystem
    double mean_b = 0.0;          // second N-particle subsystem
    double antithetic_diff = 0.0; // mean_big - (mean_a + mean_b)/2
  };
  std::vector<ObservableMeans> observables;
  bool divergent = false;
  int divergent_step = -1;

  // first-moment mean at every grid index 0..K, filled on request only
  std::vector<double> mean_path_big, mean_path_a, mean_path_b;
};

/// Result of a standalone N-particle system run (bias mode).
struct SingleRunOutput {
  std::vector<double> means;  // one per observable
  bool divergent = false;
  int divergent_step = -1;
};

struct SimulateOptions {
  bool record_mean_paths = false;
};

/// Interaction statistic of the pre-step ensemble (one evaluation per step).
InteractionValue interaction(const ModelSpec& model, const ParticleEnsemble& ensemble);

/// One explicit Euler step: coefficients frozen at the pre-step state and the
/// pre-step interaction, X_i += b(t_k, y_i, X_i) h + sigma(t_k, y_i, X_i) dW_i.
/// `increments_row` must hold ensemble-size variance-h increments.
ParticleEnsemble euler_step(const ModelSpec& model, const TimeGrid& grid,
                            const ParticleEnsemble& ensemble,
                            std::span<const double> increments_row);

/// Advances the antithetic triple to the horizon: the 2N-particle system on
/// driver columns 0..2N-1 and the two disjoint N-particle subsystems on
/// columns 0..N-1 and N..2N-1, each with its own interaction statistic.
/// `block` must have been filled for 2*n_pairs columns.
RunOutput simulate_run(const ModelSpec& model, const TimeGrid& grid, int n_pairs,
                       const DriverBlock& block, std::span<const Observable> observables,
                       const SimulateOptions& options = {});

/// Advances a single N-particle system on driver columns 0..n_particles-1.
/// With equal stream and grid this reproduces subsystem A of simulate_run
/// bit for bit.
SingleRunOutput simulate_single_run(const ModelSpec& model, const TimeGrid& grid,
                                    int n_particles, const DriverBlock& block,
                                    std::span<const Observable> observables);

/// Instrumentation: interaction statistics evaluated since the last reset
/// (one per system per step).
std::uint64_t interaction_eval_count();
void reset_interaction_eval_count();

}  // namespace mcvlab
