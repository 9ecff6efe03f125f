#include "mcvlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "mcvlab/errors.hpp"
#include "mcvlab/oracles.hpp"
#include "mcvlab/version.hpp"

namespace mcvlab {

namespace {

int resolved_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Samples of one schedule point, indexed by run so that reductions are
// independent of the thread interleaving.
struct SamplePool {
  // bias sample per observable: empirical mean of the N-particle system
  std::vector<std::vector<double>> bias_samples;
  // antithetic difference D per observable
  std::vector<std::vector<double>> diffs;
  std::vector<std::uint8_t> divergent;

  void init(std::size_t n_observables, std::size_t runs, bool want_bias, bool want_anti) {
    bias_samples.assign(want_bias ? n_observables : 0, std::vector<double>(runs, 0.0));
    diffs.assign(want_anti ? n_observables : 0, std::vector<double>(runs, 0.0));
    divergent.assign(runs, 0);
  }
};

struct DivergenceRecord {
  std::atomic<std::uint64_t> first{UINT64_MAX};
  std::atomic<int> step{-1};

  void note(std::uint64_t run, int at_step) {
    std::uint64_t seen = first.load(std::memory_order_relaxed);
    while (run < seen && !first.compare_exchange_weak(seen, run, std::memory_order_relaxed)) {
    }
    if (run == first.load(std::memory_order_relaxed))
      step.store(at_step, std::memory_order_relaxed);
  }
  bool any() const { return first.load(std::memory_order_relaxed) != UINT64_MAX; }
};

void simulate_schedule_point(const ExperimentConfig& config, const TimeGrid& grid,
                             int n_particles, std::span<const Observable> observables,
                             SamplePool& pool, DivergenceRecord& divergence) {
  const long runs = config.runs;
  const bool want_bias = config.mode != RunMode::antithetic;
  const bool want_anti = config.mode != RunMode::bias;
  const bool triple = config.mode != RunMode::bias;
  pool.init(observables.size(), static_cast<std::size_t>(runs), want_bias, want_anti);

  const int threads = resolved_threads(config.threads);
  std::atomic<long> next_chunk{0};
  const long chunk = 128;
  const long n_chunks = (runs + chunk - 1) / chunk;
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    DriverBlock block;
    try {
      for (;;) {
        if (divergence.any() && config.divergence == DivergencePolicy::abort) return;
        const long c = next_chunk.fetch_add(1, std::memory_order_relaxed);
        if (c >= n_chunks) return;
        const long begin = c * chunk;
        const long end = std::min(runs, begin + chunk);
        for (long r = begin; r < end; ++r) {
          const RunStream stream = derive_stream(config.master_seed,
                                                 static_cast<std::uint64_t>(r));
          if (triple) {
            fill_driver_columns(stream, grid, 2 * n_particles, block);
            const RunOutput out =
                simulate_run(config.model, grid, n_particles, block, observables);
            if (out.divergent) {
              pool.divergent[r] = 1;
              divergence.note(static_cast<std::uint64_t>(r), out.divergent_step);
              continue;
            }
            for (std::size_t o = 0; o < observables.size(); ++o) {
              if (want_bias) pool.bias_samples[o][r] = out.observables[o].mean_a;
              pool.diffs[o][r] = out.observables[o].antithetic_diff;
            }
          } else {
            fill_driver_columns(stream, grid, n_particles, block);
            const SingleRunOutput out =
                simulate_single_run(config.model, grid, n_particles, block, observables);
            if (out.divergent) {
              pool.divergent[r] = 1;
              divergence.note(static_cast<std::uint64_t>(r), out.divergent_step);
              continue;
            }
            for (std::size_t o = 0; o < observables.size(); ++o)
              pool.bias_samples[o][r] = out.means[o];
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool_threads;
    pool_threads.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool_threads.emplace_back(worker);
    for (auto& t : pool_threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

// keeps only the samples of non-divergent runs, in ascending run order
std::vector<double> compact(const std::vector<double>& samples,
                            const std::vector<std::uint8_t>& divergent, long kept) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(kept));
  for (std::size_t r = 0; r < samples.size(); ++r)
    if (!divergent[r]) out.push_back(samples[r]);
  return out;
}

}  // namespace

std::vector<Observable> default_observables(const ModelSpec& model) {
  return std::visit(
      [](const auto& m) -> std::vector<Observable> {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ViscousBurgers>)
          return {Observable::indicator_above(0.5)};
        else if constexpr (std::is_same_v<M, PlaneRotator>)
          return {Observable::first_moment()};
        else
          return {Observable::first_moment(), Observable::second_moment()};
      },
      model);
}

void validate(const ExperimentConfig& config) {
  validate(config.model);
  make_time_grid(config.horizon, config.steps);
  if (config.runs < 2) throw ConfigError("experiment: need at least two runs");
  if (config.particles_start < 2)
    throw ConfigError("experiment: particles-start must be at least 2");
  if (config.iterations < 1) throw ConfigError("experiment: iterations must be at least 1");
  if (config.threads < 0) throw ConfigError("experiment: threads must be >= 0");
  if (config.particles_start > (1L << 24) / (1L << config.iterations))
    throw ConfigError("experiment: particle schedule overflows a sane budget");

  const auto observables =
      config.observables.empty() ? default_observables(config.model) : config.observables;
  if (observables.empty()) throw ConfigError("experiment: no observables requested");
  for (const Observable& obs : observables)
    if (!std::isfinite(obs.threshold)) throw ConfigError("experiment: non-finite threshold");

  if (config.mode != RunMode::antithetic) {
    if (config.reference_value) {
      if (observables.size() != 1)
        throw ConfigError(
            "experiment: an external reference value applies to a single observable; "
            "configure one observable or drop reference-value");
      if (!std::isfinite(*config.reference_value))
        throw ConfigError("experiment: reference-value must be finite");
    } else {
      const TimeGrid grid = make_time_grid(config.horizon, config.steps);
      for (const Observable& obs : observables)
        (void)oracle_reference(config.model, obs, grid, config.particles_start);
    }
  }
}

std::vector<long> particle_schedule(const ExperimentConfig& config) {
  std::vector<long> schedule;
  schedule.reserve(static_cast<std::size_t>(config.iterations));
  long n = config.particles_start;
  for (int i = 0; i < config.iterations; ++i, n *= 2) schedule.push_back(n);
  return schedule;
}

double oracle_reference(const ModelSpec& model, const Observable& observable,
                        const TimeGrid& grid, long n_particles) {
  if (const auto* ou = std::get_if<GeneralizedOu>(&model)) {
    if (observable.kind == Observable::Kind::first_moment)
      return oracles::ou_discretized_first_moment(grid.steps, grid.h, *ou);
    if (observable.kind == Observable::Kind::second_moment)
      return oracles::ou_discretized_second_moment(grid.steps, grid.h, n_particles, *ou);
  } else if (const auto* poly = std::get_if<PolynomialDrift>(&model)) {
    const auto moments =
        oracles::polynomial_moment_recursion(grid.steps, grid.h, poly->gamma, poly->x0);
    if (observable.kind == Observable::Kind::first_moment) return moments.m1;
    if (observable.kind == Observable::Kind::second_moment) return moments.m2;
  } else if (const auto* burgers = std::get_if<ViscousBurgers>(&model)) {
    if (observable.kind == Observable::Kind::indicator_above)
      return oracles::burgers_cole_hopf(grid.horizon, observable.threshold, burgers->upsilon);
  }
  throw ConfigError("no oracle reference for model '" + model_name(model) +
                    "' and observable '" + observable.name() +
                    "'; supply reference-value (rotator first moment at the standard "
                    "parameters: 0.737576, an external Monte Carlo value)");
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate(config);
  const auto t_start = std::chrono::steady_clock::now();

  const TimeGrid grid = make_time_grid(config.horizon, config.steps);
  const std::vector<Observable> observables =
      config.observables.empty() ? default_observables(config.model) : config.observables;
  const std::vector<long> schedule = particle_schedule(config);
  const bool want_bias = config.mode != RunMode::antithetic;
  const bool want_anti = config.mode != RunMode::bias;

  ExperimentReport report;
  report.model = model_name(config.model);
  report.mode = config.mode;
  report.schedule = schedule;
  report.runs = config.runs;
  report.steps = config.steps;
  report.horizon = config.horizon;
  report.master_seed = config.master_seed;
  report.version = kVersion;

  // per observable, per schedule point
  std::vector<std::vector<double>> estimates(observables.size());
  std::vector<std::vector<double>> references(observables.size());
  std::vector<std::vector<double>> precisions(observables.size());
  std::vector<std::vector<AntitheticRow>> anti_rows(observables.size());

  for (std::size_t point = 0; point < schedule.size(); ++point) {
    const int n = static_cast<int>(schedule[point]);
    SamplePool pool;
    DivergenceRecord divergence;
    simulate_schedule_point(config, grid, n, observables, pool, divergence);

    if (divergence.any()) {
      const std::uint64_t run = divergence.first.load();
      if (config.divergence == DivergencePolicy::abort)
        throw DivergenceError("run " + std::to_string(run) + " diverged at grid step " +
                                  std::to_string(divergence.step.load()) + " with N = " +
                                  std::to_string(n) + "; aborting (policy: abort)",
                              n, run, divergence.step.load());
      long excluded = 0;
      for (auto flag : pool.divergent) excluded += flag;
      report.excluded_runs += excluded;
    }
    long kept = config.runs;
    for (auto flag : pool.divergent) kept -= flag;
    if (kept < 2)
      throw DivergenceError("fewer than two non-divergent runs left with N = " +
                                std::to_string(n),
                            n, divergence.first.load(), divergence.step.load());

    for (std::size_t o = 0; o < observables.size(); ++o) {
      if (want_bias) {
        const std::vector<double> samples =
            compact(pool.bias_samples[o], pool.divergent, kept);
        MomentAccumulator acc;
        for (double s : samples) acc.add(s);
        estimates[o].push_back(acc.mean());
        precisions[o].push_back(acc.precision());
        references[o].push_back(config.reference_value
                                    ? *config.reference_value
                                    : oracle_reference(config.model, observables[o], grid, n));
      }
      if (want_anti) {
        const std::vector<double> diffs = compact(pool.diffs[o], pool.divergent, kept);
        const VarianceEstimate est = antithetic_variance(diffs);
        AntitheticRow row;
        row.n_particles = n;
        row.variance = est.variance;
        row.precision = est.precision;
        if (point > 0 && est.variance > 0.0)
          row.ratio_of_decrease = anti_rows[o].back().variance / est.variance;
        anti_rows[o].push_back(row);
      }
    }
  }

  for (std::size_t o = 0; o < observables.size(); ++o) {
    ObservableTable table;
    table.observable = observables[o];
    if (want_bias)
      table.bias_rows = bias_table(schedule, estimates[o], references[o], precisions[o]);
    if (want_anti) table.antithetic_rows = std::move(anti_rows[o]);
    report.tables.push_back(std::move(table));
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::bias: return "bias";
    case RunMode::antithetic: return "antithetic";
    case RunMode::both: return "both";
  }
  return "?";
}

}  // namespace mcvlab
