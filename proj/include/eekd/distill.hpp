#ifndef EEKD_DISTILL_HPP
#define EEKD_DISTILL_HPP

#include "eekd/data.hpp"
#include "eekd/ensemble.hpp"
#include "eekd/losses.hpp"
#include "eekd/mlp.hpp"
#include "eekd/optim.hpp"
#include "eekd/schedules.hpp"
#include "eekd/snapshots.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace eekd {

struct TrainConfig {
  MlpSpec spec;
  int epochs = 1;
  int batch_size = 64;
  ScheduleSpec schedule;
  SgdOptions sgd;
  std::uint64_t seed = 0;

  void validate() const;
};

struct DistillConfig {
  KdLoss loss;  // alpha 0.5, tau 5
  int num_snapshots = 5;
  WeightStrategy strategy;
  TrainConfig student;
  /// Route attention gradients into the student's features as well.
  bool attn_grad_through_v = false;
  /// Precompute teacher soft targets once (fixed strategies only).
  bool cache_targets = false;

  void validate() const;
};

/// Per-sample pass counts. Every forward or backward of one sample through one
/// network counts once.
struct CostLedger {
  std::int64_t teacher_train_forwards = 0;
  std::int64_t teacher_train_backwards = 0;
  std::int64_t distill_teacher_forwards = 0;
  std::int64_t distill_student_forwards = 0;
  std::int64_t distill_student_backwards = 0;
  double wall_clock_seconds = 0.0;

  CostLedger& operator+=(const CostLedger& other);
  std::int64_t total_forwards() const {
    return teacher_train_forwards + distill_teacher_forwards + distill_student_forwards;
  }
};

struct RunMetrics {
  std::vector<double> train_loss;
  std::vector<double> train_accuracy;
  std::vector<double> test_accuracy;
  double final_test_accuracy = 0.0;

  bool operator==(const RunMetrics&) const = default;
};

/// Top-1 accuracy; argmax ties resolve to the lowest class index.
double evaluate(const DenseStack& params, const MlpSpec& spec, const Dataset& data);
double accuracy(const Mat& scores, std::span<const int> labels);

// ---------------------------------------------------------------------------
// Teacher training

struct TeacherRun {
  SnapshotSet snapshots;
  CostLedger ledger;
  RunMetrics metrics;
};

/// Cross-entropy training with snapshots captured after each epoch in
/// snapshot_epochs(cfg.epochs, num_snapshots).
TeacherRun train_teacher(const TrainConfig& cfg, const DataSplit& data, int num_snapshots);

// ---------------------------------------------------------------------------
// Distillation

struct AttentionState {
  AttentionParams params;
  AttentionParams momentum;
};

struct StudentState {
  MlpSpec spec;
  ParamSet params;
  std::optional<AttentionState> attention;
};

/// Student (and attention, when the strategy needs it) initialized from dcfg.student.seed.
StudentState init_student(const DistillConfig& dcfg, const MlpSpec& teacher_spec);

/// Features u_i and soft targets f^tau of every teacher on one batch.
struct TeacherOutputs {
  std::vector<Mat> features;
  std::vector<Mat> soft;
};

TeacherOutputs teacher_outputs(std::span<const Checkpoint> teachers, const Mat& inputs, double tau);

struct EekdGrads {
  double loss = 0.0;
  double ce = 0.0;
  double kl = 0.0;
  Mat weights;  // 1 x M (fixed) or batch x M (attention)
  Mat target;
  Mat student_logits;
  DenseStack student;
  std::optional<AttentionParams> attention;
};

/// Loss and gradients of the weighted-ensemble objective for one batch.
EekdGrads eekd_loss_grads(const Mat& inputs, const Mat& labels, const StudentState& state,
                          const TeacherOutputs& teachers, const DistillConfig& dcfg);

struct StepResult {
  double loss = 0.0;
  Eigen::Index correct = 0;
};

/// Teacher forwards, loss/gradients and one SGD step for the student (and attention).
StepResult eekd_step(const Batch& batch, StudentState& state, std::span<const Checkpoint> teachers,
                     const DistillConfig& dcfg, double lr, CostLedger& ledger);

/// Classic single-teacher distillation step against softmax_tau(teacher logits).
StepResult kd_step(const Batch& batch, StudentState& state, const Checkpoint& teacher,
                   const DistillConfig& dcfg, double lr, CostLedger& ledger);

struct DistillRun {
  StudentState student;
  RunMetrics metrics;
  CostLedger ledger;
};

/// Full epoch loop of eekd_step. `teachers` must hold dcfg.num_snapshots models.
DistillRun distill_student(const DistillConfig& dcfg, std::span<const Checkpoint> teachers,
                           const DataSplit& data);

/// Full epoch loop of kd_step against one teacher.
DistillRun distill_vanilla_kd(const DistillConfig& dcfg, const Checkpoint& teacher,
                              const DataSplit& data);

/// Cross-entropy training of the student architecture with no teacher.
DistillRun train_student_baseline(const TrainConfig& cfg, const DataSplit& data);

struct SedRun {
  std::vector<Checkpoint> teachers;
  DistillRun distill;
  CostLedger ledger;  // teacher training + distillation
};

/// Standard ensemble distillation: M independent teachers (seeds seed+1 .. seed+M),
/// mean weights over their final models, then distill_student.
SedRun sed_pipeline(const TrainConfig& teacher_cfg, int num_teachers, const DistillConfig& dcfg,
                    const DataSplit& data);

/// Accuracy of the weighted probability ensemble (tau = 1). `weights` is 1 x M or n x M.
double ensemble_accuracy(std::span<const Checkpoint> teachers, const Mat& weights,
                         const Dataset& data);

/// Weights the trained strategy assigns on `data`: fixed rows, or per-sample attention.
Mat strategy_weights(const DistillConfig& dcfg, const StudentState& student,
                     std::span<const Checkpoint> teachers, const Dataset& data);

}  // namespace eekd

#endif  // EEKD_DISTILL_HPP
