#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mcvlab {

/// Invalid experiment configuration (bad grid, bad model parameters,
/// missing reference value, unreadable config file, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A particle state became non-finite and the experiment policy is to abort.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long n_particles, std::uint64_t run_index, int grid_step)
      : std::runtime_error(what),
        n_particles(n_particles),
        run_index(run_index),
        grid_step(grid_step) {}

  long n_particles;
  std::uint64_t run_index;
  int grid_step;
};

}  // namespace mcvlab
