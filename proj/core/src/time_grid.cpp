#include "mcvlab/time_grid.hpp"

#include <cmath>
#include <string>

#include "mcvlab/errors.hpp"

namespace mcvlab {

TimeGrid make_time_grid(double horizon, int steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ConfigError("time grid: horizon must be positive and finite, got " +
                      std::to_string(horizon));
  if (steps < 1)
    throw ConfigError("time grid: need at least one step, got " + std::to_string(steps));
  return TimeGrid{horizon, steps, horizon / steps};
}

}  // namespace mcvlab
