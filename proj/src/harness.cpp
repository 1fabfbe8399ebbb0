#include "eekd/harness.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace eekd {

using nlohmann::json;

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kTrainTeacher:
      return "train-teacher";
    case ExperimentKind::kDistill:
      return "distill";
    case ExperimentKind::kSed:
      return "sed";
    case ExperimentKind::kPrinciple1:
      return "principle1";
    case ExperimentKind::kPrinciple2:
      return "principle2";
    case ExperimentKind::kPrinciple3:
      return "principle3";
    case ExperimentKind::kSedCompare:
      return "sed-compare";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(std::string_view name) {
  for (auto k : {ExperimentKind::kTrainTeacher, ExperimentKind::kDistill, ExperimentKind::kSed,
                 ExperimentKind::kPrinciple1, ExperimentKind::kPrinciple2,
                 ExperimentKind::kPrinciple3, ExperimentKind::kSedCompare})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T field(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

template <typename T>
T required(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + "." + key + " is required");
  return field<T>(obj, key, T{}, where);
}

TrainConfig parse_train(const json& j, TrainConfig base, const std::string& where) {
  check_keys(j, {"hidden", "epochs", "batch_size", "lr", "schedule", "cycle_length", "momentum",
                 "weight_decay"},
             where);
  base.spec.hidden_dims = field(j, "hidden", base.spec.hidden_dims, where);
  base.epochs = field(j, "epochs", base.epochs, where);
  base.batch_size = field(j, "batch_size", base.batch_size, where);
  base.sgd.momentum = field(j, "momentum", base.sgd.momentum, where);
  base.sgd.weight_decay = field(j, "weight_decay", base.sgd.weight_decay, where);
  const double lr = field(j, "lr", base.schedule.eta0, where);
  const auto kind =
      schedule_kind_from_string(field<std::string>(j, "schedule", "cosine", where));
  base.schedule = {kind, lr, base.epochs, field(j, "cycle_length", 0, where)};
  if (kind == ScheduleKind::kCyclicCosine && base.schedule.cycle_length == 0)
    throw ConfigError(where + ": cyclic-cosine schedule needs cycle_length");
  return base;
}

TrainConfig default_train(std::vector<int> hidden, int epochs) {
  TrainConfig c;
  c.spec.hidden_dims = std::move(hidden);
  c.epochs = epochs;
  c.schedule = {ScheduleKind::kCosine, 0.1, epochs, 0};
  return c;
}

void with_dims(TrainConfig& cfg, int input_dim, int num_classes) {
  cfg.spec.input_dim = input_dim;
  cfg.spec.num_classes = num_classes;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  check_keys(doc, {"$schema", "experiment", "seeds", "output_dir", "dataset", "teacher", "student",
                   "distill", "m_values", "save_checkpoints"},
             "config");

  ExperimentConfig cfg;
  cfg.kind = experiment_kind_from_string(required<std::string>(doc, "experiment", "config"));
  cfg.seeds = required<std::vector<std::uint64_t>>(doc, "seeds", "config");
  if (cfg.seeds.empty()) throw ConfigError("config.seeds must be non-empty");
  cfg.output_dir = field<std::string>(doc, "output_dir", "eekd_out", "config");
  cfg.save_checkpoints =
      field(doc, "save_checkpoints", cfg.kind == ExperimentKind::kTrainTeacher, "config");

  // dataset
  if (!doc.contains("dataset")) throw ConfigError("config.dataset is required");
  const json& ds = doc.at("dataset");
  if (!ds.is_object()) throw ConfigError("config.dataset must be a JSON object");
  const auto source = field<std::string>(ds, "kind", "blobs", "dataset");
  int input_dim = 1;
  int num_classes = 2;
  if (source == "blobs") {
    check_keys(ds, {"kind", "seed", "n_train", "n_test", "num_classes", "dim", "noise"}, "dataset");
    auto& d = cfg.dataset;
    d.source = DatasetConfig::Source::kBlobs;
    d.seed = field(ds, "seed", d.seed, "dataset");
    d.n_train = field(ds, "n_train", d.n_train, "dataset");
    d.n_test = field(ds, "n_test", d.n_test, "dataset");
    d.num_classes = field(ds, "num_classes", d.num_classes, "dataset");
    d.dim = field(ds, "dim", d.dim, "dataset");
    d.noise = field(ds, "noise", d.noise, "dataset");
    if (d.n_train <= 0 || d.n_test <= 0 || d.num_classes <= 0 || d.dim <= 0 || d.noise < 0)
      throw ConfigError("dataset: sizes must be positive and noise >= 0");
    if ((d.n_train + d.n_test) % d.num_classes != 0)
      throw ConfigError("dataset: n_train + n_test must be divisible by num_classes");
    input_dim = d.dim;
    num_classes = d.num_classes;
  } else if (source == "idx") {
    check_keys(ds, {"kind", "train_images", "train_labels", "test_images", "test_labels"}, "dataset");
    auto& d = cfg.dataset;
    d.source = DatasetConfig::Source::kIdx;
    auto resolve = [&](const char* key) {
      std::filesystem::path p = required<std::string>(ds, key, "dataset");
      if (p.is_relative()) p = base_dir / p;
      if (!std::filesystem::exists(p)) throw ConfigError("dataset." + std::string(key) + " not found: " + p.string());
      return p;
    };
    d.train_images = resolve("train_images");
    d.train_labels = resolve("train_labels");
    d.test_images = resolve("test_images");
    d.test_labels = resolve("test_labels");
  } else {
    throw ConfigError("dataset.kind must be 'blobs' or 'idx'");
  }

  cfg.teacher = default_train({64, 64}, 60);
  if (doc.contains("teacher")) cfg.teacher = parse_train(doc.at("teacher"), cfg.teacher, "teacher");
  cfg.distill.student = default_train({16}, 40);
  if (doc.contains("student"))
    cfg.distill.student = parse_train(doc.at("student"), cfg.distill.student, "student");

  if (doc.contains("distill")) {
    const json& dj = doc.at("distill");
    check_keys(dj, {"alpha", "tau", "kd_tau", "M", "strategy", "embed_dim", "kl_tau_square",
                    "attn_grad_through_v", "cache_targets"},
               "distill");
    auto& d = cfg.distill;
    d.loss.alpha = field(dj, "alpha", d.loss.alpha, "distill");
    d.loss.tau = field(dj, "tau", d.loss.tau, "distill");
    d.loss.tau_squared = field(dj, "kl_tau_square", d.loss.tau_squared, "distill");
    cfg.kd_tau = field(dj, "kd_tau", cfg.kd_tau, "distill");
    d.num_snapshots = field(dj, "M", d.num_snapshots, "distill");
    d.strategy.kind = weight_kind_from_string(field<std::string>(dj, "strategy", "attention", "distill"));
    d.strategy.embed_dim = field(dj, "embed_dim", d.strategy.embed_dim, "distill");
    d.attn_grad_through_v = field(dj, "attn_grad_through_v", d.attn_grad_through_v, "distill");
    d.cache_targets = field(dj, "cache_targets", d.cache_targets, "distill");
  }
  if (!(cfg.kd_tau > 0.0)) throw ConfigError("distill.kd_tau must be > 0");

  cfg.m_values = field(doc, "m_values", std::vector<int>{}, "config");
  const bool needs_m_list =
      cfg.kind == ExperimentKind::kPrinciple3 || cfg.kind == ExperimentKind::kSedCompare;
  if (needs_m_list && cfg.m_values.empty())
    throw ConfigError("config.m_values is required for " + std::string(to_string(cfg.kind)));
  if (!needs_m_list && cfg.m_values.empty()) cfg.m_values = {cfg.distill.num_snapshots};

  // Validate with the dataset dimensions (placeholders for IDX until loaded).
  TrainConfig t = cfg.teacher;
  with_dims(t, input_dim, num_classes);
  DistillConfig dcheck = cfg.distill;
  with_dims(dcheck.student, input_dim, num_classes);
  t.validate();
  dcheck.validate();
  for (int m : cfg.m_values) {
    if (m < 1 || m > cfg.teacher.epochs)
      throw ConfigError("M=" + std::to_string(m) + " must lie in [1, teacher epochs]");
    if (m > 99) throw ConfigError("M values above 99 are not supported");
  }
  if (cfg.kind == ExperimentKind::kPrinciple1 && cfg.teacher.epochs % cfg.distill.num_snapshots != 0)
    throw ConfigError("principle1: teacher epochs must be divisible by M (cycle = epochs / M)");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

DataSplit load_dataset(const DatasetConfig& cfg, std::uint64_t run_seed) {
  if (cfg.source == DatasetConfig::Source::kBlobs)
    return gen_blobs_split(cfg.seed + run_seed, cfg.n_train, cfg.n_test, cfg.num_classes, cfg.dim,
                           cfg.noise);
  DataSplit split{read_idx(cfg.train_images, cfg.train_labels),
                  read_idx(cfg.test_images, cfg.test_labels)};
  if (split.train.input_dim() != split.test.input_dim())
    throw ConsistencyError("IDX train and test images differ in size");
  const int k = std::max(split.train.num_classes, split.test.num_classes);
  split.train.num_classes = split.test.num_classes = k;
  return split;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

struct RunSetup {
  std::uint64_t seed;
  DataSplit data;
  TrainConfig teacher;
  DistillConfig distill;
};

RunSetup setup_run(const ExperimentConfig& cfg, std::uint64_t seed) {
  RunSetup s{seed, load_dataset(cfg.dataset, seed), cfg.teacher, cfg.distill};
  const int dim = s.data.train.input_dim();
  const int k = s.data.train.num_classes;
  with_dims(s.teacher, dim, k);
  with_dims(s.distill.student, dim, k);
  s.teacher.seed = seed + 1;
  s.distill.student.seed = seed;
  return s;
}

std::string m_label(const char* prefix, int m) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%sM%02d", prefix, m);
  return buf;
}

void add_ledger(Report& r, const std::string& variant, std::uint64_t seed, const CostLedger& l) {
  r.add(variant, seed, "teacher_train_forwards", static_cast<double>(l.teacher_train_forwards));
  r.add(variant, seed, "teacher_train_backwards", static_cast<double>(l.teacher_train_backwards));
  r.add(variant, seed, "distill_teacher_forwards", static_cast<double>(l.distill_teacher_forwards));
  r.add(variant, seed, "distill_student_forwards", static_cast<double>(l.distill_student_forwards));
  r.add(variant, seed, "distill_student_backwards", static_cast<double>(l.distill_student_backwards));
  r.add(variant, seed, "total_forwards", static_cast<double>(l.total_forwards()));
  r.add(variant, seed, "wall_clock_seconds", l.wall_clock_seconds, false);
}

void note(const ProgressFn& progress, const ExperimentConfig& cfg, std::uint64_t seed,
          const std::string& msg) {
  if (progress) progress("[" + std::string(to_string(cfg.kind)) + "] seed " + std::to_string(seed) + ": " + msg);
}

/// Snapshots of `all` (captured every epoch) at snapshot_epochs(E, M).
std::vector<Checkpoint> select_snapshots(const SnapshotSet& all, int total_epochs, int count) {
  std::vector<Checkpoint> out;
  for (int e : snapshot_epochs(total_epochs, count)) out.push_back(all.at(e - 1));
  return out;
}

DistillConfig with_strategy(DistillConfig d, WeightKind kind, int count) {
  d.strategy.kind = kind;
  d.num_snapshots = count;
  if (kind == WeightKind::kAttention) d.cache_targets = false;
  return d;
}

}  // namespace

Report experiment_train_teacher(const ExperimentConfig& cfg, const ProgressFn& progress) {
  Report report(std::string(to_string(cfg.kind)));
  for (auto seed : cfg.seeds) {
    RunSetup s = setup_run(cfg, seed);
    TeacherRun run = train_teacher(s.teacher, s.data, cfg.distill.num_snapshots);
    report.add("teacher", seed, "teacher_acc", run.metrics.final_test_accuracy);
    for (const auto& ck : run.snapshots) {
      char name[48];
      std::snprintf(name, sizeof(name), "snapshot_e%03d_acc", ck.epoch);
      report.add("teacher", seed, name, evaluate(ck.params, ck.spec, s.data.test));
      if (cfg.save_checkpoints) {
        const auto dir = cfg.output_dir / "checkpoints" / ("seed-" + std::to_string(seed));
        std::filesystem::create_directories(dir);
        char file[32];
        std::snprintf(file, sizeof(file), "epoch-%03d.eekd", ck.epoch);
        save_checkpoint(ck, dir / file);
      }
    }
    add_ledger(report, "teacher", seed, run.ledger);
    note(progress, cfg, seed, "teacher acc " + format_number(run.metrics.final_test_accuracy));
  }
  return report;
}

Report experiment_distill(const ExperimentConfig& cfg, const ProgressFn& progress) {
  Report report(std::string(to_string(cfg.kind)));
  const int m = cfg.distill.num_snapshots;
  for (auto seed : cfg.seeds) {
    RunSetup s = setup_run(cfg, seed);
    TeacherRun teacher = train_teacher(s.teacher, s.data, m);

    DistillRun base = train_student_baseline(s.distill.student, s.data);
    report.add("student", seed, "student_acc", base.metrics.final_test_accuracy);
    add_ledger(report, "student", seed, base.ledger);

    DistillConfig kd = s.distill;
    kd.loss.tau = cfg.kd_tau;
    DistillRun kd_run = distill_vanilla_kd(kd, teacher.snapshots.back(), s.data);
    CostLedger kd_ledger = teacher.ledger;
    kd_ledger += kd_run.ledger;
    report.add("kd", seed, "teacher_acc", teacher.metrics.final_test_accuracy);
    report.add("kd", seed, "student_acc", kd_run.metrics.final_test_accuracy);
    add_ledger(report, "kd", seed, kd_ledger);

    DistillRun eekd = distill_student(s.distill, teacher.snapshots, s.data);
    CostLedger eekd_ledger = teacher.ledger;
    eekd_ledger += eekd.ledger;
    const std::string variant = m_label("eekd-", m);
    const Mat w = strategy_weights(s.distill, eekd.student, teacher.snapshots, s.data.test);
    report.add(variant, seed, "teacher_acc", ensemble_accuracy(teacher.snapshots, w, s.data.test));
    report.add(variant, seed, "student_acc", eekd.metrics.final_test_accuracy);
    add_ledger(report, variant, seed, eekd_ledger);
    note(progress, cfg, seed,
         "student " + format_number(base.metrics.final_test_accuracy) + ", kd " +
             format_number(kd_run.metrics.final_test_accuracy) + ", eekd " +
             format_number(eekd.metrics.final_test_accuracy));
  }
  return report;
}

Report experiment_sed(const ExperimentConfig& cfg, const ProgressFn& progress) {
  Report report(std::string(to_string(cfg.kind)));
  const int m = cfg.distill.num_snapshots;
  for (auto seed : cfg.seeds) {
    RunSetup s = setup_run(cfg, seed);
    TrainConfig base = s.teacher;
    base.seed = seed;  // teachers use seed+1 .. seed+M
    SedRun sed = sed_pipeline(base, m, s.distill, s.data);
    const std::string variant = m_label("sed-", m);
    report.add(variant, seed, "teacher_acc",
               ensemble_accuracy(sed.teachers, fixed_weights(WeightKind::kMean, m), s.data.test));
    report.add(variant, seed, "student_acc", sed.distill.metrics.final_test_accuracy);
    add_ledger(report, variant, seed, sed.ledger);
    note(progress, cfg, seed, "sed " + format_number(sed.distill.metrics.final_test_accuracy));
  }
  return report;
}

Report experiment_principle1(const ExperimentConfig& cfg, const ProgressFn& progress) {
  Report report(std::string(to_string(cfg.kind)));
  const int m = cfg.distill.num_snapshots;
  for (auto seed : cfg.seeds) {
    RunSetup s = setup_run(cfg, seed);

    TrainConfig cosine = s.teacher;
    cosine.schedule = ScheduleSpec::cosine(cosine.schedule.eta0, cosine.epochs);
    TrainConfig cyclic = s.teacher;
    cyclic.schedule = ScheduleSpec::cyclic(cyclic.schedule.eta0, cyclic.epochs, cyclic.epochs / m);

    TeacherRun nocycle = train_teacher(cosine, s.data, m);
    TeacherRun cycle = train_teacher(cyclic, s.data, m);
    const Mat mean = fixed_weights(WeightKind::kMean, m);
    const DistillConfig mean_cfg = with_strategy(s.distill, WeightKind::kMean, m);

    DistillConfig kd = s.distill;
    kd.loss.tau = cfg.kd_tau;
    DistillRun single = distill_vanilla_kd(kd, nocycle.snapshots.back(), s.data);
    report.add("single-teacher", seed, "teacher_acc", nocycle.metrics.final_test_accuracy);
    report.add("single-teacher", seed, "student_acc", single.metrics.final_test_accuracy);

    DistillRun nocycle_run = distill_student(mean_cfg, nocycle.snapshots, s.data);
    report.add("nocycle-ensemble", seed, "teacher_acc",
               ensemble_accuracy(nocycle.snapshots, mean, s.data.test));
    report.add("nocycle-ensemble", seed, "student_acc", nocycle_run.metrics.final_test_accuracy);

    DistillRun cycle_run = distill_student(mean_cfg, cycle.snapshots, s.data);
    report.add("cycle-ensemble", seed, "teacher_acc",
               ensemble_accuracy(cycle.snapshots, mean, s.data.test));
    report.add("cycle-ensemble", seed, "student_acc", cycle_run.metrics.final_test_accuracy);
    note(progress, cfg, seed,
         "single " + format_number(single.metrics.final_test_accuracy) + ", nocycle " +
             format_number(nocycle_run.metrics.final_test_accuracy) + ", cycle " +
             format_number(cycle_run.metrics.final_test_accuracy));
  }
  return report;
}

Report experiment_principle2(const ExperimentConfig& cfg, const ProgressFn& progress) {
  Report report(std::string(to_string(cfg.kind)));
  const int m = cfg.distill.num_snapshots;
  for (auto seed : cfg.seeds) {
    RunSetup s = setup_run(cfg, seed);
    TeacherRun teacher = train_teacher(s.teacher, s.data, m);

    std::string summary;
    for (auto kind : {WeightKind::kMean, WeightKind::kLinearIncrease, WeightKind::kLinearDecrease,
                      WeightKind::kAttention}) {
      const DistillConfig d = with_strategy(s.distill, kind, m);
      DistillRun run = distill_student(d, teacher.snapshots, s.data);
      const Mat w = strategy_weights(d, run.student, teacher.snapshots, s.data.test);
      const std::string variant(to_string(kind));
      report.add(variant, seed, "teacher_acc", ensemble_accuracy(teacher.snapshots, w, s.data.test));
      report.add(variant, seed, "student_acc", run.metrics.final_test_accuracy);
      summary += variant + " " + format_number(run.metrics.final_test_accuracy) + " ";
    }
    note(progress, cfg, seed, summary);
  }
  return report;
}

Report experiment_principle3(const ExperimentConfig& cfg, const ProgressFn& progress) {
  Report report(std::string(to_string(cfg.kind)));
  for (auto seed : cfg.seeds) {
    RunSetup s = setup_run(cfg, seed);
    // The trajectory does not depend on M, so one run captured at every epoch serves all M.
    TeacherRun teacher = train_teacher(s.teacher, s.data, s.teacher.epochs);
    std::string summary;
    for (int m : cfg.m_values) {
      const auto snaps = select_snapshots(teacher.snapshots, s.teacher.epochs, m);
      const DistillConfig d = with_strategy(s.distill, s.distill.strategy.kind, m);
      DistillRun run = distill_student(d, snaps, s.data);
      CostLedger ledger = teacher.ledger;
      ledger += run.ledger;
      const std::string variant = m_label("", m);
      report.add(variant, seed, "student_acc", run.metrics.final_test_accuracy);
      add_ledger(report, variant, seed, ledger);
      summary += variant + " " + format_number(run.metrics.final_test_accuracy) + " ";
    }
    note(progress, cfg, seed, summary);
  }
  return report;
}

Report experiment_sed_compare(const ExperimentConfig& cfg, const ProgressFn& progress) {
  Report report(std::string(to_string(cfg.kind)));
  for (auto seed : cfg.seeds) {
    RunSetup s = setup_run(cfg, seed);
    TeacherRun teacher = train_teacher(s.teacher, s.data, s.teacher.epochs);
    std::string summary;
    for (int m : cfg.m_values) {
      const auto snaps = select_snapshots(teacher.snapshots, s.teacher.epochs, m);
      const DistillConfig d = with_strategy(s.distill, s.distill.strategy.kind, m);
      DistillRun eekd = distill_student(d, snaps, s.data);
      CostLedger eekd_ledger = teacher.ledger;
      eekd_ledger += eekd.ledger;
      report.add(m_label("eekd-", m), seed, "student_acc", eekd.metrics.final_test_accuracy);
      add_ledger(report, m_label("eekd-", m), seed, eekd_ledger);

      TrainConfig base = s.teacher;
      base.seed = seed;  // SED teacher 1 shares the EEKD teacher's seed
      SedRun sed = sed_pipeline(base, m, s.distill, s.data);
      report.add(m_label("sed-", m), seed, "student_acc", sed.distill.metrics.final_test_accuracy);
      add_ledger(report, m_label("sed-", m), seed, sed.ledger);
      summary += "M=" + std::to_string(m) + " eekd " + format_number(eekd.metrics.final_test_accuracy) +
                 " sed " + format_number(sed.distill.metrics.final_test_accuracy) + "; ";
    }
    note(progress, cfg, seed, summary);
  }
  return report;
}

Report run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  switch (cfg.kind) {
    case ExperimentKind::kTrainTeacher:
      return experiment_train_teacher(cfg, progress);
    case ExperimentKind::kDistill:
      return experiment_distill(cfg, progress);
    case ExperimentKind::kSed:
      return experiment_sed(cfg, progress);
    case ExperimentKind::kPrinciple1:
      return experiment_principle1(cfg, progress);
    case ExperimentKind::kPrinciple2:
      return experiment_principle2(cfg, progress);
    case ExperimentKind::kPrinciple3:
      return experiment_principle3(cfg, progress);
    case ExperimentKind::kSedCompare:
      return experiment_sed_compare(cfg, progress);
  }
  throw ConfigError("unhandled experiment kind");
}

int run(const RunOptions& options) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(options.config);
    if (options.seed_override) cfg.seeds = {*options.seed_override};
    if (options.output_override) cfg.output_dir = *options.output_override;
    // Surface unreadable datasets as configuration problems before training.
    (void)load_dataset(cfg.dataset, cfg.seeds.front());
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "config error (dataset): " << e.what() << "\n";
    return 1;
  }

  try {
    ProgressFn progress;
    if (!options.quiet) progress = [](const std::string& msg) { std::cerr << msg << "\n"; };
    const Report report = run_experiment(cfg, progress);
    report.write(cfg.output_dir);
    if (!options.quiet)
      std::cerr << "wrote " << (cfg.output_dir / "report.csv").string() << " and report.json\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace eekd
