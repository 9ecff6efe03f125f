#include "mcvlab/report.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "mcvlab/errors.hpp"

namespace mcvlab {

namespace {

std::string join_schedule(const std::vector<long>& schedule) {
  std::string out;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(schedule[i]);
  }
  return out;
}

void write_metadata(std::ostream& os, const ExperimentReport& report,
                    const Observable& observable, const char* comment) {
  os << comment << " mcvlab " << report.version << " " << to_string(report.mode)
     << " table\n";
  os << comment << " model=" << report.model << " observable=" << observable.name() << "\n";
  os << comment << " seed=" << report.master_seed << " runs=" << report.runs
     << " steps=" << report.steps << " horizon=" << format_full(report.horizon)
     << " schedule=" << join_schedule(report.schedule) << "\n";
  if (report.excluded_runs > 0)
    os << comment << " excluded_divergent_runs=" << report.excluded_runs << "\n";
}

struct TableCells {
  // column-per-N cell strings; empty string = absent value
  std::vector<std::string> estimate, reference, difference, precision, bias_ratio;
  std::vector<std::string> anti_variance, anti_precision, anti_ratio;
};

TableCells collect_cells(const ObservableTable& table, std::size_t n_points) {
  TableCells cells;
  auto blank = [n_points] { return std::vector<std::string>(n_points); };
  cells.estimate = blank();
  cells.reference = blank();
  cells.difference = blank();
  cells.precision = blank();
  cells.bias_ratio = blank();
  cells.anti_variance = blank();
  cells.anti_precision = blank();
  cells.anti_ratio = blank();
  for (std::size_t i = 0; i < table.bias_rows.size(); ++i) {
    const BiasRow& row = table.bias_rows[i];
    cells.estimate[i] = format_full(row.estimate);
    cells.reference[i] = format_full(row.reference);
    cells.difference[i] = format_full(row.difference);
    cells.precision[i] = format_full(row.precision);
    if (row.ratio_of_decrease) cells.bias_ratio[i] = format_full(*row.ratio_of_decrease);
  }
  for (std::size_t i = 0; i < table.antithetic_rows.size(); ++i) {
    const AntitheticRow& row = table.antithetic_rows[i];
    cells.anti_variance[i] = format_full(row.variance);
    cells.anti_precision[i] = format_full(row.precision);
    if (row.ratio_of_decrease) cells.anti_ratio[i] = format_full(*row.ratio_of_decrease);
  }
  return cells;
}

}  // namespace

std::string format_full(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string csv_path_for(const std::string& base, const Observable& observable,
                         bool multiple_tables) {
  if (!multiple_tables) return base;
  const std::size_t dot = base.find_last_of('.');
  const std::size_t slash = base.find_last_of('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  if (has_ext)
    return base.substr(0, dot) + "." + observable.name() + base.substr(dot);
  return base + "." + observable.name();
}

std::vector<std::string> write_csv(const ExperimentReport& report, const std::string& path) {
  std::vector<std::string> written;
  const bool multiple = report.tables.size() > 1;
  for (const ObservableTable& table : report.tables) {
    const std::string file = csv_path_for(path, table.observable, multiple);
    std::ofstream os(file);
    if (!os) throw ConfigError("cannot open output file '" + file + "'");
    write_metadata(os, report, table.observable, "#");
    os << "N,estimate,reference,difference,precision,ratio_of_decrease,"
          "antithetic_variance,antithetic_precision,antithetic_ratio\n";
    const TableCells cells = collect_cells(table, report.schedule.size());
    for (std::size_t i = 0; i < report.schedule.size(); ++i) {
      os << report.schedule[i] << ',' << cells.estimate[i] << ',' << cells.reference[i]
         << ',' << cells.difference[i] << ',' << cells.precision[i] << ','
         << cells.bias_ratio[i] << ',' << cells.anti_variance[i] << ','
         << cells.anti_precision[i] << ',' << cells.anti_ratio[i] << '\n';
    }
    if (!os) throw ConfigError("write failed for output file '" + file + "'");
    written.push_back(file);
  }
  return written;
}

void write_text(const ExperimentReport& report, std::ostream& os) {
  os << "mcvlab " << report.version << " | model " << report.model << " | mode "
     << to_string(report.mode) << " | seed " << report.master_seed << " | runs "
     << report.runs << " | steps " << report.steps << " | horizon "
     << format_full(report.horizon) << "\n";
  if (report.excluded_runs > 0)
    os << "excluded divergent runs: " << report.excluded_runs << "\n";

  for (const ObservableTable& table : report.tables) {
    const std::size_t points = report.schedule.size();
    const TableCells cells = collect_cells(table, points);
    const bool second = table.observable.kind == Observable::Kind::second_moment;
    const std::string what = second ? "second moment" : table.observable.kind ==
                                  Observable::Kind::first_moment ? "first moment" : "solution";

    os << "\n[" << table.observable.name() << "]\n";
    auto row = [&](const std::string& label, const std::vector<std::string>& values,
                   bool skip_if_empty) {
      bool any = false;
      for (const auto& v : values) any = any || !v.empty();
      if (!any && skip_if_empty) return;
      os << std::left << std::setw(34) << label;
      for (const auto& v : values) os << ' ' << std::setw(24) << (v.empty() ? "x" : v);
      os << "\n";
    };
    std::vector<std::string> ns;
    ns.reserve(points);
    for (long n : report.schedule) ns.push_back(std::to_string(n));
    row("Nb. particles", ns, false);
    row("Estimated " + what, cells.estimate, true);
    row("Reference " + what, cells.reference, true);
    row("Difference", cells.difference, true);
    row("Ratio of decrease", cells.bias_ratio, true);
    row("Precision", cells.precision, true);
    row("Antithetic variance", cells.anti_variance, true);
    row("Ratio of decrease (variance)", cells.anti_ratio, true);
    row("Precision (variance)", cells.anti_precision, true);
  }
  os << "\nwall time: " << std::fixed << std::setprecision(2) << report.wall_seconds
     << " s\n";
  os.unsetf(std::ios::fixed);
}

}  // namespace mcvlab
