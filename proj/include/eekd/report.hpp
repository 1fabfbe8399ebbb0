#ifndef EEKD_REPORT_HPP
#define EEKD_REPORT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace eekd {

struct ReportRow {
  std::string variant;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
  bool deterministic = true;
};

struct Aggregate {
  std::string variant;
  std::string metric;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 with fewer than two seeds
  bool deterministic = true;
};

/**
 * Long-format experiment results. Rows are kept sorted by (variant, seed) with
 * metrics in insertion order; aggregates follow the same variant order.
 *
 * CSV columns: experiment,variant,seed,metric,value,deterministic
 * Per-seed rows come first, then one "mean" and one "std" row per
 * (variant, metric) with the seed column holding that word.
 */
class Report {
 public:
  explicit Report(std::string experiment) : experiment_(std::move(experiment)) {}

  /// Throws InvariantError when (variant, seed, metric) is already present.
  void add(const std::string& variant, std::uint64_t seed, const std::string& metric, double value,
           bool deterministic = true);

  const std::string& experiment() const { return experiment_; }
  std::vector<ReportRow> rows() const;
  std::vector<Aggregate> aggregates() const;
  std::vector<std::string> variants() const;

  std::string to_csv() const;
  std::string to_json() const;

  /// Writes report.csv and report.json into `dir` (created if missing).
  void write(const std::filesystem::path& dir) const;

 private:
  std::string experiment_;
  std::vector<ReportRow> rows_;
};

/// Shortest round-trip decimal form of a double.
std::string format_number(double value);

/// RFC-4180 field quoting (only when the field needs it).
std::string csv_field(const std::string& field);

}  // namespace eekd

#endif  // EEKD_REPORT_HPP
