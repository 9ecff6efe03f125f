#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcvlab/engine.hpp"
#include "mcvlab/model.hpp"
#include "mcvlab/stats.hpp"
#include "mcvlab/time_grid.hpp"

namespace mcvlab {

enum class RunMode { bias, antithetic, both };
enum class DivergencePolicy { abort, exclude };

/// Everything that defines one experiment: a model, observables, the grid,
/// the run count, the particle-doubling schedule and the master seed.
struct ExperimentConfig {
  ModelSpec model = GeneralizedOu{};
  std::vector<Observable> observables;  // empty -> model defaults
  double horizon = 1.0;
  int steps = 50;
  long runs = 100000;
  int particles_start = 20;
  int iterations = 5;
  std::uint64_t master_seed = 0;
  RunMode mode = RunMode::bias;
  std::optional<double> reference_value;  // external reference; oracle otherwise
  DivergencePolicy divergence = DivergencePolicy::abort;
  int threads = 0;  // 0 -> hardware concurrency
};

/// Defaults used when `observables` is left empty.
std::vector<Observable> default_observables(const ModelSpec& model);

/// Throws ConfigError on an invalid configuration (also validates that a
/// reference exists for every observable in bias mode).
void validate(const ExperimentConfig& config);

/// {particles_start * 2^i : 0 <= i < iterations}
std::vector<long> particle_schedule(const ExperimentConfig& config);

/// The reference an estimate is compared against: the matching closed-form /
/// recursion oracle. Throws ConfigError when the model/observable pair has
/// none (then an external reference_value is required).
double oracle_reference(const ModelSpec& model, const Observable& observable,
                        const TimeGrid& grid, long n_particles);

/// Monte Carlo reference for the plane rotator first moment at the standard
/// parameters (external value, 2.5e8 runs of a 1000-particle system); never
/// exact, shipped for convenience.
inline constexpr double kRotatorFirstMomentReference = 0.737576;

struct AntitheticRow {
  long n_particles = 0;
  double variance = 0.0;
  double precision = 0.0;
  std::optional<double> ratio_of_decrease;  // variance(N/2) / variance(N)
};

struct ObservableTable {
  Observable observable;
  std::vector<BiasRow> bias_rows;             // empty in antithetic mode
  std::vector<AntitheticRow> antithetic_rows; // empty in bias mode
};

struct ExperimentReport {
  std::string model;
  RunMode mode = RunMode::bias;
  std::vector<long> schedule;
  long runs = 0;
  int steps = 0;
  double horizon = 0.0;
  std::uint64_t master_seed = 0;
  long excluded_runs = 0;  // divergent runs dropped under the exclude policy
  std::vector<ObservableTable> tables;
  double wall_seconds = 0.0;
  std::string version;
};

/// Runs the full doubling schedule: for each N, `runs` independent runs are
/// distributed over a worker pool, samples are recorded per run index and
/// reduced in ascending run order, so the report is identical for any thread
/// count. In bias mode only the N-particle system is simulated; antithetic
/// and combined mode advance the coupled triple once and read both tables
/// from the same pass. Throws DivergenceError under the abort policy.
ExperimentReport run_experiment(const ExperimentConfig& config);

std::string to_string(RunMode mode);

}  // namespace mcvlab
