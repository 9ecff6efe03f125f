#pragma once

namespace mcvlab {

/// Uniform time grid on [0, horizon] with `steps` Euler steps of size h = horizon/steps.
struct TimeGrid {
  double horizon = 0.0;
  int steps = 0;
  double h = 0.0;

  double time_at(int k) const { return h * k; }
};

/// Throws ConfigError unless horizon > 0 and steps >= 1.
TimeGrid make_time_grid(double horizon, int steps);

}  // namespace mcvlab
