#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mcvlab {

/// Half-width multiplier of the 95% confidence interval.
inline constexpr double kPrecisionZ = 1.96;

/// Streaming count/mean/sum-of-squared-deviations over run samples
/// (Welford update), mergeable across disjoint chunks.
class MomentAccumulator {
 public:
  void add(double sample);
  void merge(const MomentAccumulator& other);

  std::int64_t count() const { return count_; }
  double mean() const;               // throws when empty
  double variance() const;           // unbiased (count-1); throws when count < 2
  double sum_squared_deviations() const { return m2_; }

  /// Half the width of the 95% CI of the mean: 1.96 sqrt(variance/count).
  double precision() const;

 private:
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct VarianceEstimate {
  double variance = 0.0;   // unbiased sample variance of the inputs
  double precision = 0.0;  // 1.96 sqrt(Var[(D - mean)^2] / count)
};

/// Sample variance of the antithetic differences D_r with its own precision,
/// the latter from the spread of the squared deviations (fourth moment).
/// Requires at least two samples.
VarianceEstimate antithetic_variance(std::span<const double> antithetic_diffs);

/// One row of a particle-doubling bias table.
struct BiasRow {
  long n_particles = 0;
  double estimate = 0.0;
  double reference = 0.0;
  double difference = 0.0;  // reference - estimate
  double precision = 0.0;
  std::optional<double> ratio_of_decrease;  // |difference(N/2)| / |difference(N)|
};

/// Assembles bias rows over a doubling particle schedule. Ratios are computed
/// on absolute differences from the second row on and omitted on a zero
/// denominator.
std::vector<BiasRow> bias_table(std::span<const long> particle_schedule,
                                std::span<const double> estimates,
                                std::span<const double> references,
                                std::span<const double> precisions);

}  // namespace mcvlab
