#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mcvlab/time_grid.hpp"

namespace mcvlab {

// ---------------------------------------------------------------------------
// Counter-based randomness.
//
// Every normal variate of a run is a pure function of
// (master_seed, run_index, row, column): the Philox4x64-10 block cipher keyed
// by (master_seed, run_index) is applied to the counter (row, column/4, 0, 0)
// and lane column%4 is mapped through the inverse normal CDF. Row 0 carries
// the initial draws, rows 1..K the Brownian increments. Consequently
//   * any run is reproducible in isolation, independent of thread count,
//   * column i draws are identical whether a block is filled for N or 2N
//     columns, which is what ties the antithetic subsystems to the big system.
// The uniform-to-normal map is fixed: u = (bits >> 11) * 2^-53 + 2^-54 fed
// into the AS241 (PPND16) inverse CDF. Changing it invalidates golden output.
// ---------------------------------------------------------------------------

using Counter4x64 = std::array<std::uint64_t, 4>;

struct PhiloxKey {
  std::uint64_t k0 = 0;
  std::uint64_t k1 = 0;
};

/// One Philox4x64-10 block: 4 uniform 64-bit words from (counter, key).
Counter4x64 philox4x64(Counter4x64 counter, PhiloxKey key);

/// Inverse standard normal CDF, AS241 PPND16 (about 1e-15 relative accuracy).
/// Requires p in (0, 1).
double inverse_normal_cdf(double p);

/// Fixed mapping of one 64-bit word to a standard normal variate.
double standard_normal_from_bits(std::uint64_t bits);

/// Identifies one run's random stream. Distinct (master_seed, run_index)
/// pairs give statistically independent streams.
struct RunStream {
  std::uint64_t master_seed = 0;
  std::uint64_t run_index = 0;

  /// Standard normal variate at (row, column). Row 0: initial draws;
  /// rows 1..K: unscaled increments (multiply by sqrt(h) for variance h).
  double normal_at(std::uint64_t row, std::uint64_t column) const;
};

RunStream derive_stream(std::uint64_t master_seed, std::uint64_t run_index);

/// Gaussian drivers for one run: 2N initial draws plus a K x 2N matrix of
/// Brownian increments, already scaled to variance h. Column i drives
/// particle i; columns 0..N-1 feed subsystem A, N..2N-1 subsystem B and all
/// columns the 2N-particle system.
struct DriverBlock {
  int columns = 0;
  int steps = 0;
  std::vector<double> initial_draws;  // size columns
  std::vector<double> increments;     // size steps*columns, row-major

  const double* increments_row(int k) const {
    return increments.data() + static_cast<std::size_t>(k) * columns;
  }
  double* increments_row(int k) {
    return increments.data() + static_cast<std::size_t>(k) * columns;
  }
};

/// Fills `out` with `columns` driver columns (reuses its buffers).
void fill_driver_columns(const RunStream& stream, const TimeGrid& grid, int columns,
                         DriverBlock& out);

/// Driver block for an antithetic triple with subsystem size n_pairs
/// (2*n_pairs columns).
DriverBlock fill_driver_block(const RunStream& stream, const TimeGrid& grid, int n_pairs);

/// Instrumentation: total normal variates materialized by fill_driver_columns
/// / fill_driver_block since the last reset. Used by tests to check that one
/// simulation pass feeds both the bias and the antithetic tables.
std::uint64_t rng_draw_count();
void reset_rng_draw_count();

}  // namespace mcvlab
