#include "mcvlab/rng.hpp"

#include <atomic>
#include <cmath>

#include "mcvlab/errors.hpp"

namespace mcvlab {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

std::atomic<std::uint64_t> g_draw_count{0};

inline double unit_open(std::uint64_t bits) {
  // 53-bit mantissa, offset so the result is strictly inside (0, 1)
  return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

// AS241 PPND16 without the domain check; p must lie in (0, 1).
inline double ppnd16(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -value : value;
}

inline double normal_from_bits_fast(std::uint64_t bits) { return ppnd16(unit_open(bits)); }

}  // namespace

Counter4x64 philox4x64(Counter4x64 c, PhiloxKey key) {
  std::uint64_t k0 = key.k0;
  std::uint64_t k1 = key.k1;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("inverse_normal_cdf: p must lie in (0,1)");
  return ppnd16(p);
}

double standard_normal_from_bits(std::uint64_t bits) {
  return normal_from_bits_fast(bits);
}

RunStream derive_stream(std::uint64_t master_seed, std::uint64_t run_index) {
  return RunStream{master_seed, run_index};
}

double RunStream::normal_at(std::uint64_t row, std::uint64_t column) const {
  const Counter4x64 block =
      philox4x64({row, column >> 2, 0, 0}, PhiloxKey{master_seed, run_index});
  return standard_normal_from_bits(block[column & 3]);
}

void fill_driver_columns(const RunStream& stream, const TimeGrid& grid, int columns,
                         DriverBlock& out) {
  if (columns < 1) throw ConfigError("fill_driver_columns: need at least one column");
  const int steps = grid.steps;
  out.columns = columns;
  out.steps = steps;
  out.initial_draws.resize(static_cast<std::size_t>(columns));
  out.increments.resize(static_cast<std::size_t>(steps) * columns);

  const PhiloxKey key{stream.master_seed, stream.run_index};
  const double root_h = std::sqrt(grid.h);
  for (int row = 0; row <= steps; ++row) {
    const double scale = (row == 0) ? 1.0 : root_h;
    double* dst = (row == 0) ? out.initial_draws.data() : out.increments_row(row - 1);
    int i = 0;
    for (; i + 4 <= columns; i += 4) {
      const Counter4x64 r = philox4x64(
          {static_cast<std::uint64_t>(row), static_cast<std::uint64_t>(i >> 2), 0, 0}, key);
      dst[i + 0] = scale * normal_from_bits_fast(r[0]);
      dst[i + 1] = scale * normal_from_bits_fast(r[1]);
      dst[i + 2] = scale * normal_from_bits_fast(r[2]);
      dst[i + 3] = scale * normal_from_bits_fast(r[3]);
    }
    if (i < columns) {
      const Counter4x64 r = philox4x64(
          {static_cast<std::uint64_t>(row), static_cast<std::uint64_t>(i >> 2), 0, 0}, key);
      for (int lane = 0; i < columns; ++i, ++lane) dst[i] = scale * normal_from_bits_fast(r[lane]);
    }
  }
  g_draw_count.fetch_add(static_cast<std::uint64_t>(steps + 1) * columns,
                         std::memory_order_relaxed);
}

DriverBlock fill_driver_block(const RunStream& stream, const TimeGrid& grid, int n_pairs) {
  if (n_pairs < 1) throw ConfigError("fill_driver_block: need at least one particle pair");
  DriverBlock block;
  fill_driver_columns(stream, grid, 2 * n_pairs, block);
  return block;
}

std::uint64_t rng_draw_count() { return g_draw_count.load(std::memory_order_relaxed); }

void reset_rng_draw_count() { g_draw_count.store(0, std::memory_order_relaxed); }

}  // namespace mcvlab
