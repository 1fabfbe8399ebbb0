// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include "eekd/distill.hpp"
#include "eekd/gradcheck.hpp"
#include "eekd/harness.hpp"
#include "eekd/rng.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace eekd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Mat random_mat(Rng& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.uniform(-1.0, 1.0);
  return m;
}

Mat random_simplex_rows(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = 0.01 + rng.uniform();
  for (Eigen::Index i = 0; i < r; ++i) m.row(i) /= m.row(i).sum();
  return m;
}

Mat random_one_hot(Rng& rng, Eigen::Index rows, int k) {
  Mat y = Mat::Zero(rows, k);
  for (Eigen::Index n = 0; n < rows; ++n) y(n, static_cast<Eigen::Index>(rng.next() % k)) = 1.0;
  return y;
}

void randomize_biases(DenseStack& layers, Rng& rng) {
  for (auto& d : layers)
    for (Eigen::Index i = 0; i < d.bias.size(); ++i) d.bias[i] = 0.2 * rng.uniform(-1.0, 1.0);
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

// ---------------------------------------------------------------------------
// 1. gradient oracle

Outcome criterion_gradients() {
  constexpr double kRelTol = 1e-4;
  constexpr double kAbsTol = 1e-8;
  constexpr double kStep = 1e-5;
  constexpr int kInstances = 10;
  constexpr int kTeachers = 3;
  GradCheckResult total;
  for (int inst = 0; inst < kInstances; ++inst) {
    Rng rng(1000 + inst);
    const int in = 3 + static_cast<int>(rng.next() % 3);
    const int k = 3 + static_cast<int>(rng.next() % 2);
    std::vector<int> hidden{2 + static_cast<int>(rng.next() % 7)};
    if (inst % 2 == 1) hidden.push_back(2 + static_cast<int>(rng.next() % 7));
    const Eigen::Index batch = 6;

    DistillConfig dcfg;
    dcfg.loss = {0.5, 5.0, false};
    dcfg.num_snapshots = kTeachers;
    dcfg.strategy = {WeightKind::kAttention, 4};
    dcfg.student.spec = MlpSpec(in, hidden, k);
    dcfg.student.schedule = ScheduleSpec::cosine(0.1, 1);
    dcfg.student.seed = 50 + inst;

    const MlpSpec teacher_spec(in, {6, 5}, k);
    std::vector<Checkpoint> teachers;
    for (int i = 0; i < kTeachers; ++i) {
      Checkpoint c{teacher_spec, mlp_init(teacher_spec, 7 * inst + i).layers, i + 1, "cosine", 0};
      randomize_biases(c.params, rng);
      for (auto& d : c.params) d.weight *= 2.0;
      teachers.push_back(std::move(c));
    }

    StudentState state = init_student(dcfg, teacher_spec);
    randomize_biases(state.params.layers, rng);
    for (auto& d : state.params.layers) d.weight *= 1.5;
    state.attention->params.w_s *= 2.0;
    state.attention->params.w_t *= 2.0;
    const Mat x = random_mat(rng, batch, in, 2.0);
    const Mat y = random_one_hot(rng, batch, k);
    const TeacherOutputs outs = teacher_outputs(teachers, x, dcfg.loss.tau);

    auto full_loss = [&](const StudentState& s) { return eekd_loss_grads(x, y, s, outs, dcfg).loss; };

    // Default routing: attention gradients stop at the student features, so the
    // student sees the ensemble target as a constant.
    const EekdGrads g = eekd_loss_grads(x, y, state, outs, dcfg);
    const Mat frozen_target = g.target;
    auto student_loss = [&](const DenseStack& p) {
      const ForwardTrace t = forward(p, state.spec, x);
      return loss_grads(t, state.spec, p, y, frozen_target, dcfg.loss).loss;
    };
    merge(total, compare_grads(g.student, finite_diff_grad(student_loss, state.params.layers, kStep),
                               kRelTol, kAbsTol));
    merge(total, compare_grads(g.attention->w_s,
                               finite_diff_grad(
                                   [&](const Mat& w) {
                                     StudentState s = state;
                                     s.attention->params.w_s = w;
                                     return full_loss(s);
                                   },
                                   state.attention->params.w_s, kStep),
                               kRelTol, kAbsTol));
    merge(total, compare_grads(g.attention->w_t,
                               finite_diff_grad(
                                   [&](const Mat& w) {
                                     StudentState s = state;
                                     s.attention->params.w_t = w;
                                     return full_loss(s);
                                   },
                                   state.attention->params.w_t, kStep),
                               kRelTol, kAbsTol));

    // Fully coupled routing: student gradients include the path through the weights.
    DistillConfig coupled = dcfg;
    coupled.attn_grad_through_v = true;
    const EekdGrads gc = eekd_loss_grads(x, y, state, outs, coupled);
    merge(total, compare_grads(gc.student,
                               finite_diff_grad(
                                   [&](const DenseStack& p) {
                                     StudentState s = state;
                                     s.params.layers = p;
                                     return eekd_loss_grads(x, y, s, outs, coupled).loss;
                                   },
                                   state.params.layers, kStep),
                               kRelTol, kAbsTol));
  }
  return {total.failures == 0,
          std::to_string(total.checked) + " entries, " + std::to_string(total.failures) +
              " failures (rel >= 1e-4 and abs >= 1e-8), max rel " + fmt(total.max_rel_error) +
              ", max abs " + fmt(total.max_abs_error)};
}

// ---------------------------------------------------------------------------
// 2. M = 1 reduces to vanilla KD

Outcome criterion_reduction() {
  constexpr double kLossTol = 1e-12;
  const DataSplit data = gen_blobs_split(21, 400, 200, 4, 20, 1.2);
  TrainConfig tc;
  tc.spec = MlpSpec(20, {64, 64}, 4);
  tc.epochs = 6;
  tc.schedule = ScheduleSpec::cosine(0.1, tc.epochs);
  tc.seed = 3;
  const TeacherRun teacher = train_teacher(tc, data, 1);

  DistillConfig d;
  d.num_snapshots = 1;
  d.strategy = {WeightKind::kAttention, 16};
  d.student.spec = MlpSpec(20, {16}, 4);
  d.student.epochs = 3;
  d.student.schedule = ScheduleSpec::cosine(0.1, 3);
  d.student.seed = 9;
  StudentState eekd = init_student(d, tc.spec);
  StudentState kd = init_student(d, tc.spec);
  CostLedger le, lk;
  double worst = 0.0;
  std::size_t steps = 0, diverged = 0;
  for (int e = 0; e < d.student.epochs; ++e) {
    const double lr = lr_at(d.student.schedule, e);
    for (const Batch& b : batch_iter(data.train, d.student.batch_size, derive_seed(d.student.seed, e))) {
      const double a = eekd_step(b, eekd, teacher.snapshots, d, lr, le).loss;
      const double c = kd_step(b, kd, teacher.snapshots.front(), d, lr, lk).loss;
      worst = std::max(worst, std::abs(a - c));
      ++steps;
      for (std::size_t l = 0; l < eekd.params.layers.size(); ++l)
        if (!(eekd.params.layers[l].weight == kd.params.layers[l].weight) ||
            !(eekd.params.layers[l].bias == kd.params.layers[l].bias)) {
          ++diverged;
          break;
        }
    }
  }
  return {worst <= kLossTol && diverged == 0,
          std::to_string(steps) + " steps, max |dloss| " + fmt(worst) + ", " + std::to_string(diverged) +
              " steps with differing parameters"};
}

// ---------------------------------------------------------------------------
// 3. weights lie on the simplex

Outcome criterion_simplex() {
  constexpr double kSumTol = 1e-12;
  std::size_t vectors = 0, bad = 0;
  auto check_row = [&](const auto& row, int m) {
    ++vectors;
    const bool in_range = (row.array() > 0.0).all() && (row.array() <= 1.0).all();
    const bool interior = m == 1 || (row.array() < 1.0).all();
    if (!in_range || !interior || std::abs(row.sum() - 1.0) > kSumTol) ++bad;
  };
  for (WeightKind kind : {WeightKind::kMean, WeightKind::kLinearIncrease, WeightKind::kLinearDecrease})
    for (int m = 1; m <= 10; ++m) check_row(fixed_weights(kind, m), m);
  Rng rng(303);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + trial % 10;
    const int fs = 4 + static_cast<int>(rng.next() % 13);
    const int ft = 4 + static_cast<int>(rng.next() % 61);
    const AttentionParams attn = attention_init(fs, ft, 16, 900 + trial);
    const Mat v = random_mat(rng, 32, fs).cwiseMax(0.0) * 2.0;
    std::vector<Mat> u;
    for (int i = 0; i < m; ++i) u.push_back(random_mat(rng, 32, ft).cwiseMax(0.0) * 2.0);
    const Mat w = attention_weights(v, u, attn);
    for (Eigen::Index n = 0; n < w.rows(); ++n) check_row(w.row(n), m);
  }
  return {bad == 0, std::to_string(vectors) + " weight vectors, " + std::to_string(bad) + " violations"};
}

// ---------------------------------------------------------------------------
// 4. attention degeneracies

Outcome criterion_degeneracies() {
  Rng rng(404);
  std::size_t failures = 0;
  for (int m = 1; m <= 10; ++m) {
    AttentionParams attn = attention_init(8, 12, 6, m);
    attn.w_s.setZero();
    attn.w_t.setZero();
    const Mat v = random_mat(rng, 10, 8);
    std::vector<Mat> u;
    for (int i = 0; i < m; ++i) u.push_back(random_mat(rng, 10, 12));
    const Mat w = attention_weights(v, u, attn);
    if (!(w.array() == 1.0 / m).all()) ++failures;
  }

  // Identical teachers through the full objective.
  const MlpSpec teacher_spec(6, {10}, 3);
  Checkpoint t{teacher_spec, mlp_init(teacher_spec, 4).layers, 1, "cosine", 0};
  const std::vector<Checkpoint> teachers(4, t);
  DistillConfig d;
  d.num_snapshots = 4;
  d.strategy = {WeightKind::kAttention, 5};
  d.student.spec = MlpSpec(6, {7}, 3);
  d.student.schedule = ScheduleSpec::cosine(0.1, 1);
  d.attn_grad_through_v = true;
  const StudentState s = init_student(d, teacher_spec);
  const Mat x = random_mat(rng, 9, 6, 2.0);
  const EekdGrads g = eekd_loss_grads(x, random_one_hot(rng, 9, 3), s,
                                      teacher_outputs(teachers, x, d.loss.tau), d);
  const bool zero_grads = g.attention->w_s.isZero(0.0) && g.attention->w_t.isZero(0.0);

  // Identical soft targets with distinct teacher features.
  const Mat soft = random_simplex_rows(rng, 9, 3);
  const std::vector<Mat> targets(3, soft);
  std::vector<Mat> u{random_mat(rng, 9, 10), random_mat(rng, 9, 10), random_mat(rng, 9, 10)};
  const AttentionParams attn = attention_init(7, 10, 5, 8);
  const Mat v = random_mat(rng, 9, 7);
  const Mat up = kl_target_upstream(ensemble_target(targets, attention_weights(v, u, attn)),
                                    random_simplex_rows(rng, 9, 3), 0.5);
  const AttentionGrads ag = attention_grads(up, targets, v, u, attn);
  const bool zero_direct = ag.w_s.isZero(0.0) && ag.w_t.isZero(0.0);

  return {failures == 0 && zero_grads && zero_direct,
          "uniform-weight failures " + std::to_string(failures) + ", zero grads (pipeline) " +
              (zero_grads ? "yes" : "no") + ", zero grads (direct) " + (zero_direct ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 5. directional trend at desk scale

Outcome criterion_trend() {
  constexpr double kMarginPct = 0.5;
  constexpr int kSeeds = 5;
  double base_sum = 0.0, kd_sum = 0.0, eekd_sum = 0.0, teacher_sum = 0.0, ensemble_sum = 0.0;
  std::string per_seed;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const DataSplit data = gen_blobs_split(seed, 2000, 1000, 4, 20, 1.2);
    TrainConfig tc;
    tc.spec = MlpSpec(20, {64, 64}, 4);
    tc.epochs = 60;
    tc.schedule = ScheduleSpec::cosine(0.1, 60);
    tc.seed = seed + 1;
    const TeacherRun teacher = train_teacher(tc, data, 5);

    DistillConfig d;
    d.num_snapshots = 5;
    d.strategy = {WeightKind::kAttention, 16};
    d.student.spec = MlpSpec(20, {16}, 4);
    d.student.epochs = 40;
    d.student.schedule = ScheduleSpec::cosine(0.1, 40);
    d.student.seed = seed;

    const DistillRun eekd = distill_student(d, teacher.snapshots, data);
    DistillConfig single = d;
    single.num_snapshots = 1;
    const std::vector<Checkpoint> last{teacher.snapshots.back()};
    const DistillRun kd = distill_student(single, last, data);
    const DistillRun base = train_student_baseline(d.student, data);

    teacher_sum += teacher.metrics.final_test_accuracy;
    ensemble_sum += ensemble_accuracy(teacher.snapshots, fixed_weights(WeightKind::kMean, 5), data.test);
    base_sum += base.metrics.final_test_accuracy;
    kd_sum += kd.metrics.final_test_accuracy;
    eekd_sum += eekd.metrics.final_test_accuracy;
    per_seed += " [" + std::to_string(seed) + ": T " + fmt(100 * teacher.metrics.final_test_accuracy) +
                " S " + fmt(100 * base.metrics.final_test_accuracy) + " KD " +
                fmt(100 * kd.metrics.final_test_accuracy) + " EEKD " +
                fmt(100 * eekd.metrics.final_test_accuracy) + "]";
  }
  const double base = 100.0 * base_sum / kSeeds, kd = 100.0 * kd_sum / kSeeds,
               eekd = 100.0 * eekd_sum / kSeeds;
  return {eekd >= kd + kMarginPct && eekd > base,
          "mean acc % teacher " + fmt(100.0 * teacher_sum / kSeeds) + ", snapshot ensemble " +
              fmt(100.0 * ensemble_sum / kSeeds) + ", student " + fmt(base) + ", KD(M=1) " + fmt(kd) + ", EEKD(M=5) " + fmt(eekd) +
              " (need EEKD - KD >= 0.5, got " + fmt(eekd - kd) + ");" + per_seed};
}

// ---------------------------------------------------------------------------
// 6. cost identities

Outcome criterion_costs() {
  const DataSplit data = gen_blobs_split(61, 240, 80, 4, 8, 1.2);
  TrainConfig tc;
  tc.spec = MlpSpec(8, {16, 16}, 4);
  tc.epochs = 5;
  tc.schedule = ScheduleSpec::cosine(0.1, 5);
  tc.seed = 1;
  const std::int64_t n = data.train.size();
  const int student_epochs = 3;
  const std::int64_t single_teacher_forwards = train_teacher(tc, data, 1).ledger.teacher_train_forwards;

  std::vector<std::string> broken;
  for (int m : {1, 3, 5}) {
    DistillConfig d;
    d.num_snapshots = m;
    d.strategy = {WeightKind::kAttention, 8};
    d.student.spec = MlpSpec(8, {8}, 4);
    d.student.epochs = student_epochs;
    d.student.schedule = ScheduleSpec::cosine(0.1, student_epochs);
    d.student.seed = 2;
    const TeacherRun t = train_teacher(tc, data, m);
    const DistillRun eekd = distill_student(d, t.snapshots, data);
    const SedRun sed = sed_pipeline(tc, m, d, data);
    const std::int64_t sed_teacher_phase = sed.ledger.teacher_train_forwards;
    if (t.ledger.teacher_train_forwards != single_teacher_forwards)
      broken.push_back("EEKD teacher phase M=" + std::to_string(m));
    if (sed_teacher_phase != m * single_teacher_forwards)
      broken.push_back("SED teacher phase M=" + std::to_string(m));
    if (eekd.ledger.distill_teacher_forwards != m * student_epochs * n)
      broken.push_back("EEKD distill forwards M=" + std::to_string(m));
    if (sed.distill.ledger.distill_teacher_forwards != m * student_epochs * n)
      broken.push_back("SED distill forwards M=" + std::to_string(m));
  }
  std::string detail = "single-teacher forwards " + std::to_string(single_teacher_forwards);
  for (const auto& b : broken) detail += "; mismatch: " + b;
  return {broken.empty(), detail};
}

// ---------------------------------------------------------------------------
// 7. checkpoint round trip

Outcome criterion_serialization() {
  const DataSplit data = gen_blobs_split(71, 200, 40, 4, 10, 1.0);
  TrainConfig tc;
  tc.spec = MlpSpec(10, {32, 16}, 4);
  tc.epochs = 3;
  tc.schedule = ScheduleSpec::cosine(0.1, 3);
  const Checkpoint ck = train_teacher(tc, data, 1).snapshots.back();
  const fs::path path = fs::temp_directory_path() / "eekd_acceptance_checkpoint.eekd";
  save_checkpoint(ck, path);
  const Checkpoint back = load_checkpoint(path);
  const Mat probe = data.test.inputs.topRows(32);
  const bool identical = forward(back.params, back.spec, probe).logits == forward(ck.params, ck.spec, probe).logits;

  const std::string good = encode_checkpoint(ck);
  auto raises = [&](std::string bytes, auto tag) {
    try {
      decode_checkpoint(bytes);
    } catch (const decltype(tag)&) {
      return true;
    } catch (...) {
      return false;
    }
    return false;
  };
  std::string magic = good, version = good;
  magic[1] = 'X';
  version[4] = 7;
  const bool m_ok = raises(magic, FormatError(""));
  const bool v_ok = raises(version, VersionError(""));
  const bool l_ok = raises(good.substr(0, good.size() - 3), CorruptionError("")) &&
                    raises(good + "extra", CorruptionError(""));
  return {identical && m_ok && v_ok && l_ok,
          std::string("logits bit-identical ") + (identical ? "yes" : "no") + ", magic->FormatError " +
              (m_ok ? "yes" : "no") + ", version->VersionError " + (v_ok ? "yes" : "no") +
              ", length->CorruptionError " + (l_ok ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 8. oracle equivalence

Outcome criterion_oracles() {
  constexpr double kTol = 1e-12;
  constexpr int kInstances = 50;
  double worst[5] = {0, 0, 0, 0, 0};
  Rng rng(808);
  for (int inst = 0; inst < kInstances; ++inst) {
    const Eigen::Index b = 1 + static_cast<Eigen::Index>(rng.next() % 6);
    const int k = 2 + static_cast<int>(rng.next() % 9);
    const int m = 1 + static_cast<int>(rng.next() % 6);
    const double tau = 0.5 + 9.5 * rng.uniform();

    const Mat z = random_mat(rng, b, k, 8.0);
    worst[0] = std::max(worst[0], oracle::max_abs_diff(oracle::to_rows(softmax_tau(z, tau)),
                                                       oracle::softmax(oracle::to_rows(z), tau)));
    const Mat p = softmax_tau(z, 1.0);
    const Mat y = random_one_hot(rng, b, k);
    worst[1] = std::max(worst[1], std::abs(cross_entropy(p, y) -
                                           oracle::cross_entropy(oracle::to_rows(p), oracle::to_rows(y))));
    const Mat t = random_simplex_rows(rng, b, k);
    worst[2] = std::max(worst[2], std::abs(kl_div(t, p) - oracle::kl(oracle::to_rows(t), oracle::to_rows(p))));

    std::vector<Mat> targets;
    std::vector<oracle::Rows> target_rows;
    for (int i = 0; i < m; ++i) {
      targets.push_back(random_simplex_rows(rng, b, k));
      target_rows.push_back(oracle::to_rows(targets.back()));
    }
    const Mat w = random_simplex_rows(rng, inst % 2 == 0 ? 1 : b, m);
    worst[3] = std::max(worst[3], oracle::max_abs_diff(oracle::to_rows(ensemble_target(targets, w)),
                                                       oracle::ensemble(target_rows, oracle::to_rows(w))));

    const int fs = 2 + static_cast<int>(rng.next() % 6), ft = 2 + static_cast<int>(rng.next() % 8);
    const AttentionParams attn = attention_init(fs, ft, 1 + static_cast<int>(rng.next() % 6), 8000 + inst);
    const Mat v = random_mat(rng, b, fs, 2.0);
    std::vector<Mat> u;
    std::vector<oracle::Rows> u_rows;
    for (int i = 0; i < m; ++i) {
      u.push_back(random_mat(rng, b, ft, 2.0));
      u_rows.push_back(oracle::to_rows(u.back()));
    }
    worst[4] = std::max(worst[4], oracle::max_abs_diff(oracle::to_rows(attention_weights(v, u, attn)),
                                                       oracle::attention(oracle::to_rows(v), u_rows,
                                                                         oracle::to_rows(attn.w_s),
                                                                         oracle::to_rows(attn.w_t))));
  }
  const char* names[5] = {"softmax_tau", "cross_entropy", "kl_div", "ensemble_target", "attention_weights"};
  bool pass = true;
  std::string detail = std::to_string(kInstances) + " instances, max abs diff:";
  for (int i = 0; i < 5; ++i) {
    pass = pass && worst[i] <= kTol;
    detail += std::string(" ") + names[i] + " " + fmt(worst[i]);
  }
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 9. end-to-end determinism

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string deterministic_rows(const std::string& csv) {
  std::string out;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) {
    std::string body = line;
    if (!body.empty() && body.back() == '\r') body.pop_back();
    if (body.size() >= 2 && body.compare(body.size() - 2, 2, ",0") == 0) continue;
    out += line + "\n";
  }
  return out;
}

Outcome criterion_determinism() {
  const fs::path dir = fs::temp_directory_path() / "eekd_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << R"({
  "experiment": "distill",
  "seeds": [0, 1],
  "dataset": {"kind": "blobs", "n_train": 400, "n_test": 200, "num_classes": 4, "dim": 20, "noise": 1.2},
  "teacher": {"hidden": [32, 32], "epochs": 10},
  "student": {"hidden": [16], "epochs": 6},
  "distill": {"M": 5}
})";
  const std::string cli = EEKD_CLI_PATH;
  int rc[2];
  for (int i = 0; i < 2; ++i) {
    const std::string cmd = "EEKD_OUT=" + (dir / ("run" + std::to_string(i))).string() + " " + cli +
                            " run --quiet --config " + cfg.string();
    rc[i] = std::system(cmd.c_str());
  }
  const std::string a = read_file(dir / "run0" / "report.csv");
  const std::string b = read_file(dir / "run1" / "report.csv");
  const std::string da = deterministic_rows(a), db = deterministic_rows(b);
  const bool pass = rc[0] == 0 && rc[1] == 0 && !da.empty() && da == db;
  return {pass, "exit codes " + std::to_string(rc[0]) + "/" + std::to_string(rc[1]) + ", " +
                    std::to_string(da.size()) + " deterministic bytes, identical " +
                    (da == db ? "yes" : "no") + ", raw files identical " + (a == b ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 10. schedule contract

Outcome criterion_schedules() {
  std::size_t failures = 0;
  for (int total : {2, 10, 60, 200}) {
    for (double eta0 : {0.1, 0.05, 1.0}) {
      const ScheduleSpec s = ScheduleSpec::cosine(eta0, total);
      if (lr_at(s, 0) != eta0) ++failures;
      if (lr_at(s, total / 2) != eta0 / 2.0) ++failures;
      for (int e = 1; e < total; ++e)
        if (!(lr_at(s, e) < lr_at(s, e - 1))) ++failures;
    }
  }
  for (auto [total, cycle] : {std::pair{200, 40}, {60, 12}, {60, 20}, {10, 1}}) {
    const ScheduleSpec s = ScheduleSpec::cyclic(0.1, total, cycle);
    for (int e = 0; e < total; e += cycle)
      if (lr_at(s, e) != 0.1) ++failures;
    for (int e = 1; e < total; ++e)
      if (e % cycle != 0 && !(lr_at(s, e) < lr_at(s, e - 1))) ++failures;
  }
  return {failures == 0, std::to_string(failures) + " contract violations"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient oracle", criterion_gradients},
      {"M=1 reduces to vanilla KD", criterion_reduction},
      {"weight simplex", criterion_simplex},
      {"attention degeneracies", criterion_degeneracies},
      {"directional trend", criterion_trend},
      {"cost identities", criterion_costs},
      {"checkpoint round trip", criterion_serialization},
      {"oracle equivalence", criterion_oracles},
      {"determinism", criterion_determinism},
      {"schedule contract", criterion_schedules},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << (i + 1) << " (" << criteria[i].first
              << ") " << fmt(secs) << "s: " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
