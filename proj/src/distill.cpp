#include "eekd/distill.hpp"

#include "eekd/rng.hpp"

#include <chrono>

namespace eekd {

namespace {

constexpr std::uint64_t kAttentionStream = 0xA77E'0000'0000ULL;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::Index count_correct(const Mat& logits, const Mat& one_hot) {
  Eigen::Index hits = 0;
  for (Eigen::Index n = 0; n < logits.rows(); ++n) {
    Eigen::Index pred = 0;
    logits.row(n).maxCoeff(&pred);
    if (one_hot(n, pred) == 1.0) ++hits;
  }
  return hits;
}

void check_teachers(std::span<const Checkpoint> teachers, const MlpSpec& student) {
  if (teachers.empty()) throw ConfigError("no teacher models supplied");
  for (const auto& t : teachers) {
    check_shapes(t.params, t.spec);
    if (!(t.spec == teachers.front().spec))
      throw DimensionError("teacher models must share one architecture");
  }
  const MlpSpec& spec = teachers.front().spec;
  if (spec.input_dim != student.input_dim)
    throw DimensionError("teacher input_dim " + std::to_string(spec.input_dim) +
                         " differs from student input_dim " + std::to_string(student.input_dim));
  if (spec.num_classes != student.num_classes)
    throw DimensionError("teacher num_classes " + std::to_string(spec.num_classes) +
                         " differs from student num_classes " + std::to_string(student.num_classes));
}

// Runs one epoch of `step` over shuffled batches and records the metrics.
template <typename StepFn>
void run_epoch(const Dataset& train, const Dataset& test, const TrainConfig& cfg, int epoch,
               const StudentState& state, RunMetrics& metrics, StepFn&& step) {
  const double lr = lr_at(cfg.schedule, epoch);
  double loss_sum = 0.0;
  Eigen::Index correct = 0;
  for (const Batch& b : batch_iter(train, cfg.batch_size, derive_seed(cfg.seed, epoch))) {
    const StepResult r = step(b, lr);
    loss_sum += r.loss * static_cast<double>(b.inputs.rows());
    correct += r.correct;
  }
  const double n = static_cast<double>(train.size());
  metrics.train_loss.push_back(loss_sum / n);
  metrics.train_accuracy.push_back(static_cast<double>(correct) / n);
  metrics.test_accuracy.push_back(evaluate(state.params.layers, state.spec, test));
  metrics.final_test_accuracy = metrics.test_accuracy.back();
}

StepResult supervised_step(const Batch& batch, StudentState& state, const SgdOptions& sgd,
                           double lr) {
  const ForwardTrace trace = forward(state.params, state.spec, batch.inputs);
  const LossGrads lg =
      loss_grads(trace, state.spec, state.params.layers, batch.labels, batch.labels, {1.0, 1.0, false});
  sgd_step(state.params, lg.grads, lr, sgd);
  return {lg.loss, count_correct(trace.logits, batch.labels)};
}

}  // namespace

void TrainConfig::validate() const {
  spec.validate();
  schedule.validate();
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (schedule.total_epochs != epochs)
    throw ConfigError("schedule total_epochs (" + std::to_string(schedule.total_epochs) +
                      ") must equal epochs (" + std::to_string(epochs) + ")");
}

void DistillConfig::validate() const {
  loss.validate();
  student.validate();
  if (num_snapshots < 1) throw ConfigError("M must be >= 1");
  if (strategy.kind == WeightKind::kAttention) {
    if (strategy.embed_dim < 1) throw ConfigError("attention embed_dim must be >= 1");
    if (cache_targets) throw ConfigError("cache_targets is only valid for fixed weight strategies");
  }
}

CostLedger& CostLedger::operator+=(const CostLedger& o) {
  teacher_train_forwards += o.teacher_train_forwards;
  teacher_train_backwards += o.teacher_train_backwards;
  distill_teacher_forwards += o.distill_teacher_forwards;
  distill_student_forwards += o.distill_student_forwards;
  distill_student_backwards += o.distill_student_backwards;
  wall_clock_seconds += o.wall_clock_seconds;
  return *this;
}

double accuracy(const Mat& scores, std::span<const int> labels) {
  if (scores.rows() != static_cast<Eigen::Index>(labels.size()))
    throw DimensionError("accuracy: score rows do not match label count");
  if (scores.rows() == 0) return 0.0;
  Eigen::Index hits = 0;
  for (Eigen::Index n = 0; n < scores.rows(); ++n) {
    Eigen::Index pred = 0;
    scores.row(n).maxCoeff(&pred);  // first maximal index
    if (pred == labels[n]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(scores.rows());
}

double evaluate(const DenseStack& params, const MlpSpec& spec, const Dataset& data) {
  return accuracy(forward(params, spec, data.inputs).logits, data.labels);
}

TeacherRun train_teacher(const TrainConfig& cfg, const DataSplit& data, int num_snapshots) {
  cfg.validate();
  data.train.validate();
  const auto capture = snapshot_epochs(cfg.epochs, num_snapshots);
  const auto start = Clock::now();

  StudentState state{cfg.spec, mlp_init(cfg.spec, cfg.seed), std::nullopt};
  TeacherRun run;
  auto next_capture = capture.begin();
  for (int e = 0; e < cfg.epochs; ++e) {
    run_epoch(data.train, data.test, cfg, e, state, run.metrics,
              [&](const Batch& b, double lr) { return supervised_step(b, state, cfg.sgd, lr); });
    run.ledger.teacher_train_forwards += data.train.size();
    run.ledger.teacher_train_backwards += data.train.size();
    if (next_capture != capture.end() && *next_capture == e + 1) {
      run.snapshots.push_back({cfg.spec, state.params.layers, e + 1,
                               std::string(to_string(cfg.schedule.kind)), cfg.seed});
      ++next_capture;
    }
  }
  run.ledger.wall_clock_seconds = seconds_since(start);
  return run;
}

StudentState init_student(const DistillConfig& dcfg, const MlpSpec& teacher_spec) {
  StudentState s{dcfg.student.spec, mlp_init(dcfg.student.spec, dcfg.student.seed), std::nullopt};
  if (dcfg.strategy.kind == WeightKind::kAttention) {
    AttentionState a;
    a.params = attention_init(dcfg.student.spec.feature_dim(), teacher_spec.feature_dim(),
                              dcfg.strategy.embed_dim,
                              derive_seed(dcfg.student.seed, kAttentionStream));
    a.momentum = {Mat::Zero(a.params.w_s.rows(), a.params.w_s.cols()),
                  Mat::Zero(a.params.w_t.rows(), a.params.w_t.cols())};
    s.attention = std::move(a);
  }
  return s;
}

TeacherOutputs teacher_outputs(std::span<const Checkpoint> teachers, const Mat& inputs, double tau) {
  TeacherOutputs out;
  out.features.reserve(teachers.size());
  out.soft.reserve(teachers.size());
  for (const auto& t : teachers) {
    ForwardTrace trace = forward(t.params, t.spec, inputs);
    out.soft.push_back(softmax_tau(trace.logits, tau));
    out.features.push_back(std::move(trace.activations.back()));
  }
  return out;
}

EekdGrads eekd_loss_grads(const Mat& inputs, const Mat& labels, const StudentState& state,
                          const TeacherOutputs& teachers, const DistillConfig& dcfg) {
  const ForwardTrace trace = forward(state.params, state.spec, inputs);
  EekdGrads out;
  const bool attention = dcfg.strategy.kind == WeightKind::kAttention;
  if (attention) {
    if (!state.attention) throw ContractError("attention strategy requires attention parameters");
    out.weights = attention_weights(trace.feature(), teachers.features, state.attention->params);
  } else {
    out.weights = fixed_weights(dcfg.strategy.kind, static_cast<int>(teachers.soft.size()));
  }
  out.target = ensemble_target(teachers.soft, out.weights);

  std::optional<AttentionGrads> ag;
  const double kl_scale = dcfg.loss.kl_scale();
  if (attention) {
    if (kl_scale != 0.0) {
      const Mat student_soft = softmax_tau(trace.logits, dcfg.loss.tau);
      const Mat upstream = kl_target_upstream(out.target, student_soft, kl_scale);
      ag = attention_grads(upstream, teachers.soft, trace.feature(), teachers.features,
                           state.attention->params);
    } else {
      const auto& p = state.attention->params;
      ag = AttentionGrads{Mat::Zero(p.w_s.rows(), p.w_s.cols()), Mat::Zero(p.w_t.rows(), p.w_t.cols()),
                          Mat::Zero(trace.feature().rows(), trace.feature().cols())};
    }
  }

  const Mat* feature_grad = (ag && dcfg.attn_grad_through_v) ? &ag->student_features : nullptr;
  LossGrads lg = loss_grads(trace, state.spec, state.params.layers, labels, out.target, dcfg.loss,
                            feature_grad);
  out.loss = lg.loss;
  out.ce = lg.ce;
  out.kl = lg.kl;
  out.student = std::move(lg.grads);
  out.student_logits = trace.logits;
  if (ag) out.attention = AttentionParams{std::move(ag->w_s), std::move(ag->w_t)};
  return out;
}

namespace {

StepResult apply_eekd(const Batch& batch, StudentState& state, const TeacherOutputs& outputs,
                      const DistillConfig& dcfg, double lr, CostLedger& ledger) {
  EekdGrads g = eekd_loss_grads(batch.inputs, batch.labels, state, outputs, dcfg);
  sgd_step(state.params, g.student, lr, dcfg.student.sgd);
  if (g.attention) {
    auto& a = *state.attention;
    sgd_update(a.params.w_s, a.momentum.w_s, g.attention->w_s, lr, dcfg.student.sgd);
    sgd_update(a.params.w_t, a.momentum.w_t, g.attention->w_t, lr, dcfg.student.sgd);
  }
  ledger.distill_student_forwards += batch.inputs.rows();
  ledger.distill_student_backwards += batch.inputs.rows();
  return {g.loss, count_correct(g.student_logits, batch.labels)};
}

TeacherOutputs gather_rows(const TeacherOutputs& all, const std::vector<Eigen::Index>& rows) {
  TeacherOutputs out;
  for (const auto& soft : all.soft) out.soft.push_back(soft(rows, Eigen::all));
  return out;
}

}  // namespace

StepResult eekd_step(const Batch& batch, StudentState& state, std::span<const Checkpoint> teachers,
                     const DistillConfig& dcfg, double lr, CostLedger& ledger) {
  if (static_cast<int>(teachers.size()) != dcfg.num_snapshots)
    throw DimensionError("eekd_step: " + std::to_string(teachers.size()) +
                         " teachers supplied, config expects M=" + std::to_string(dcfg.num_snapshots));
  check_teachers(teachers, state.spec);
  const TeacherOutputs outputs = teacher_outputs(teachers, batch.inputs, dcfg.loss.tau);
  ledger.distill_teacher_forwards +=
      static_cast<std::int64_t>(teachers.size()) * batch.inputs.rows();
  return apply_eekd(batch, state, outputs, dcfg, lr, ledger);
}

StepResult kd_step(const Batch& batch, StudentState& state, const Checkpoint& teacher,
                   const DistillConfig& dcfg, double lr, CostLedger& ledger) {
  const Mat target = softmax_tau(forward(teacher.params, teacher.spec, batch.inputs).logits,
                                 dcfg.loss.tau);
  ledger.distill_teacher_forwards += batch.inputs.rows();
  const ForwardTrace trace = forward(state.params, state.spec, batch.inputs);
  const LossGrads lg = loss_grads(trace, state.spec, state.params.layers, batch.labels, target, dcfg.loss);
  sgd_step(state.params, lg.grads, lr, dcfg.student.sgd);
  ledger.distill_student_forwards += batch.inputs.rows();
  ledger.distill_student_backwards += batch.inputs.rows();
  return {lg.loss, count_correct(trace.logits, batch.labels)};
}

DistillRun distill_student(const DistillConfig& dcfg, std::span<const Checkpoint> teachers,
                           const DataSplit& data) {
  dcfg.validate();
  data.train.validate();
  if (static_cast<int>(teachers.size()) != dcfg.num_snapshots)
    throw DimensionError("distill_student: " + std::to_string(teachers.size()) +
                         " teachers supplied, config expects M=" + std::to_string(dcfg.num_snapshots));
  check_teachers(teachers, dcfg.student.spec);
  const auto start = Clock::now();

  DistillRun run{init_student(dcfg, teachers.front().spec), {}, {}};
  std::optional<TeacherOutputs> cached;
  if (dcfg.cache_targets) {
    cached = teacher_outputs(teachers, data.train.inputs, dcfg.loss.tau);
    run.ledger.distill_teacher_forwards += static_cast<std::int64_t>(teachers.size()) * data.train.size();
  }
  for (int e = 0; e < dcfg.student.epochs; ++e) {
    run_epoch(data.train, data.test, dcfg.student, e, run.student, run.metrics,
              [&](const Batch& b, double lr) {
                if (cached)
                  return apply_eekd(b, run.student, gather_rows(*cached, b.indices), dcfg, lr, run.ledger);
                return eekd_step(b, run.student, teachers, dcfg, lr, run.ledger);
              });
  }
  run.ledger.wall_clock_seconds = seconds_since(start);
  return run;
}

DistillRun distill_vanilla_kd(const DistillConfig& dcfg, const Checkpoint& teacher,
                              const DataSplit& data) {
  dcfg.loss.validate();
  dcfg.student.validate();
  data.train.validate();
  check_teachers(std::span(&teacher, 1), dcfg.student.spec);
  const auto start = Clock::now();

  DistillRun run{{dcfg.student.spec, mlp_init(dcfg.student.spec, dcfg.student.seed), std::nullopt}, {}, {}};
  for (int e = 0; e < dcfg.student.epochs; ++e) {
    run_epoch(data.train, data.test, dcfg.student, e, run.student, run.metrics,
              [&](const Batch& b, double lr) { return kd_step(b, run.student, teacher, dcfg, lr, run.ledger); });
  }
  run.ledger.wall_clock_seconds = seconds_since(start);
  return run;
}

DistillRun train_student_baseline(const TrainConfig& cfg, const DataSplit& data) {
  cfg.validate();
  data.train.validate();
  const auto start = Clock::now();
  DistillRun run{{cfg.spec, mlp_init(cfg.spec, cfg.seed), std::nullopt}, {}, {}};
  for (int e = 0; e < cfg.epochs; ++e) {
    run_epoch(data.train, data.test, cfg, e, run.student, run.metrics, [&](const Batch& b, double lr) {
      return supervised_step(b, run.student, cfg.sgd, lr);
    });
    run.ledger.distill_student_forwards += data.train.size();
    run.ledger.distill_student_backwards += data.train.size();
  }
  run.ledger.wall_clock_seconds = seconds_since(start);
  return run;
}

SedRun sed_pipeline(const TrainConfig& teacher_cfg, int num_teachers, const DistillConfig& dcfg,
                    const DataSplit& data) {
  if (num_teachers < 1) throw ConfigError("SED needs at least one teacher");
  SedRun sed;
  for (int i = 1; i <= num_teachers; ++i) {
    TrainConfig cfg = teacher_cfg;
    cfg.seed = teacher_cfg.seed + static_cast<std::uint64_t>(i);
    TeacherRun t = train_teacher(cfg, data, 1);
    sed.teachers.push_back(std::move(t.snapshots.back()));
    sed.ledger += t.ledger;
  }
  DistillConfig mean_cfg = dcfg;
  mean_cfg.num_snapshots = num_teachers;
  mean_cfg.strategy.kind = WeightKind::kMean;
  sed.distill = distill_student(mean_cfg, sed.teachers, data);
  sed.ledger += sed.distill.ledger;
  return sed;
}

double ensemble_accuracy(std::span<const Checkpoint> teachers, const Mat& weights,
                         const Dataset& data) {
  const TeacherOutputs out = teacher_outputs(teachers, data.inputs, 1.0);
  return accuracy(ensemble_target(out.soft, weights), data.labels);
}

Mat strategy_weights(const DistillConfig& dcfg, const StudentState& student,
                     std::span<const Checkpoint> teachers, const Dataset& data) {
  if (dcfg.strategy.kind != WeightKind::kAttention)
    return fixed_weights(dcfg.strategy.kind, static_cast<int>(teachers.size()));
  if (!student.attention) throw ContractError("attention strategy requires attention parameters");
  const ForwardTrace trace = forward(student.params, student.spec, data.inputs);
  const TeacherOutputs out = teacher_outputs(teachers, data.inputs, 1.0);
  return attention_weights(trace.feature(), out.features, student.attention->params);
}

}  // namespace eekd
