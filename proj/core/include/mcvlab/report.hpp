#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mcvlab/experiment.hpp"

namespace mcvlab {

/// 17-significant-digit decimal rendering used by both the CSV and the text
/// output, so the two carry identical numbers.
std::string format_full(double value);

/// Path of the CSV for one observable: the base path itself for single-table
/// reports, otherwise the observable name is spliced in before the extension.
std::string csv_path_for(const std::string& base, const Observable& observable,
                         bool multiple_tables);

/// Writes one CSV per observable table (columns: N, estimate, reference,
/// difference, precision, ratio_of_decrease, antithetic_variance,
/// antithetic_precision, antithetic_ratio; '#' metadata lines on top).
/// Returns the written paths. Output depends only on the report content, not
/// on wall time. Throws ConfigError when a path cannot be opened.
std::vector<std::string> write_csv(const ExperimentReport& report, const std::string& path);

/// Paper-style text tables (particle counts as columns) plus metadata.
void write_text(const ExperimentReport& report, std::ostream& os);

}  // namespace mcvlab
