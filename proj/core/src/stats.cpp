#include "mcvlab/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mcvlab/errors.hpp"

namespace mcvlab {

void MomentAccumulator::add(double sample) {
  ++count_;
  const double delta = sample - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (sample - mean_);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double delta = other.mean_ - mean_;
  const double total = na + nb;
  mean_ += delta * (nb / total);
  m2_ += other.m2_ + delta * delta * (na * nb / total);
  count_ += other.count_;
}

double MomentAccumulator::mean() const {
  if (count_ < 1) throw std::logic_error("MomentAccumulator: mean of an empty sample");
  return mean_;
}

double MomentAccumulator::variance() const {
  if (count_ < 2)
    throw std::logic_error("MomentAccumulator: variance needs at least two samples");
  return m2_ / static_cast<double>(count_ - 1);
}

double MomentAccumulator::precision() const {
  return kPrecisionZ * std::sqrt(variance() / static_cast<double>(count_));
}

VarianceEstimate antithetic_variance(std::span<const double> diffs) {
  const std::size_t r = diffs.size();
  if (r < 2) throw std::logic_error("antithetic_variance: need at least two runs");

  // two-pass for accuracy: the differences can sit twenty orders of
  // magnitude below the empirical means they came from
  double sum = 0.0;
  for (double d : diffs) sum += d;
  const double mean = sum / static_cast<double>(r);

  double m2 = 0.0;
  for (double d : diffs) {
    const double c = d - mean;
    m2 += c * c;
  }
  const double variance = m2 / static_cast<double>(r - 1);

  const double mean_sq = m2 / static_cast<double>(r);
  double m2_of_sq = 0.0;
  for (double d : diffs) {
    const double c = (d - mean) * (d - mean) - mean_sq;
    m2_of_sq += c * c;
  }
  const double var_of_sq = m2_of_sq / static_cast<double>(r - 1);
  const double precision = kPrecisionZ * std::sqrt(var_of_sq / static_cast<double>(r));
  return {variance, precision};
}

std::vector<BiasRow> bias_table(std::span<const long> particle_schedule,
                                std::span<const double> estimates,
                                std::span<const double> references,
                                std::span<const double> precisions) {
  const std::size_t rows = particle_schedule.size();
  if (estimates.size() != rows || references.size() != rows || precisions.size() != rows)
    throw std::invalid_argument("bias_table: column lengths disagree");
  for (std::size_t i = 1; i < rows; ++i)
    if (particle_schedule[i] != 2 * particle_schedule[i - 1])
      throw std::invalid_argument("bias_table: particle schedule must double, got " +
                                  std::to_string(particle_schedule[i - 1]) + " -> " +
                                  std::to_string(particle_schedule[i]));

  std::vector<BiasRow> table;
  table.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    BiasRow row;
    row.n_particles = particle_schedule[i];
    row.estimate = estimates[i];
    row.reference = references[i];
    row.difference = references[i] - estimates[i];
    row.precision = precisions[i];
    if (i > 0) {
      const double denom = std::fabs(row.difference);
      if (denom > 0.0)
        row.ratio_of_decrease = std::fabs(table[i - 1].difference) / denom;
    }
    table.push_back(row);
  }
  return table;
}

}  // namespace mcvlab
