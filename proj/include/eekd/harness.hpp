#ifndef EEKD_HARNESS_HPP
#define EEKD_HARNESS_HPP

#include "eekd/distill.hpp"
#include "eekd/report.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eekd {

enum class ExperimentKind {
  kTrainTeacher,
  kDistill,
  kSed,
  kPrinciple1,
  kPrinciple2,
  kPrinciple3,
  kSedCompare,
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view name);

struct DatasetConfig {
  enum class Source { kBlobs, kIdx } source = Source::kBlobs;
  // blobs: one pool of n_train + n_test samples from seed + run seed
  std::uint64_t seed = 0;
  int n_train = 2000;
  int n_test = 1000;
  int num_classes = 4;
  int dim = 20;
  double noise = 1.2;
  // idx
  std::filesystem::path train_images, train_labels, test_images, test_labels;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kDistill;
  DatasetConfig dataset;
  TrainConfig teacher;  // seed is assigned per run
  DistillConfig distill;
  double kd_tau = 4.0;
  std::vector<int> m_values;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir = "eekd_out";
  bool save_checkpoints = false;
};

/// Parses and validates a config document. Relative dataset paths resolve
/// against `base_dir`. Throws ConfigError on any schema violation.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

DataSplit load_dataset(const DatasetConfig& cfg, std::uint64_t run_seed);

using ProgressFn = std::function<void(const std::string&)>;

/// Runs every seed of the configured experiment and returns the assembled report.
/// Checkpoints (when enabled) are written below cfg.output_dir.
Report run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});

// Individual experiments, each covering all seeds of `cfg`.
Report experiment_train_teacher(const ExperimentConfig& cfg, const ProgressFn& progress = {});
Report experiment_distill(const ExperimentConfig& cfg, const ProgressFn& progress = {});
Report experiment_sed(const ExperimentConfig& cfg, const ProgressFn& progress = {});
Report experiment_principle1(const ExperimentConfig& cfg, const ProgressFn& progress = {});
Report experiment_principle2(const ExperimentConfig& cfg, const ProgressFn& progress = {});
Report experiment_principle3(const ExperimentConfig& cfg, const ProgressFn& progress = {});
Report experiment_sed_compare(const ExperimentConfig& cfg, const ProgressFn& progress = {});

struct RunOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::filesystem::path> output_override;  // EEKD_OUT
  bool quiet = false;
};

/// CLI entry: 0 success, 1 config error, 2 runtime error. Nothing is written
/// unless the config loads cleanly.
int run(const RunOptions& options);

}  // namespace eekd

#endif  // EEKD_HARNESS_HPP
