#include "eekd/ensemble.hpp"

#include "eekd/losses.hpp"
#include "eekd/mlp.hpp"
#include "eekd/rng.hpp"

#include <cmath>

namespace eekd {

std::string_view to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::kMean:
      return "mean";
    case WeightKind::kLinearIncrease:
      return "linear-increase";
    case WeightKind::kLinearDecrease:
      return "linear-decrease";
    case WeightKind::kAttention:
      return "attention";
  }
  return "unknown";
}

WeightKind weight_kind_from_string(std::string_view name) {
  if (name == "mean") return WeightKind::kMean;
  if (name == "linear-increase") return WeightKind::kLinearIncrease;
  if (name == "linear-decrease") return WeightKind::kLinearDecrease;
  if (name == "attention") return WeightKind::kAttention;
  throw ConfigError("unknown weight strategy '" + std::string(name) + "'");
}

void AttentionParams::validate() const {
  if (w_s.cols() != w_t.cols())
    throw DimensionError("attention: W_s and W_t embed dims differ (" +
                         std::to_string(w_s.cols()) + " vs " + std::to_string(w_t.cols()) + ")");
}

AttentionParams attention_init(int student_feature_dim, int teacher_feature_dim, int embed_dim,
                               std::uint64_t seed) {
  if (student_feature_dim <= 0 || teacher_feature_dim <= 0 || embed_dim <= 0)
    throw ConfigError("attention_init: dimensions must be positive");
  Rng rng(seed);
  AttentionParams a;
  a.w_s = fan_uniform(student_feature_dim, embed_dim, student_feature_dim, embed_dim, rng);
  a.w_t = fan_uniform(teacher_feature_dim, embed_dim, teacher_feature_dim, embed_dim, rng);
  return a;
}

RowVec fixed_weights(WeightKind kind, int count) {
  if (count < 1) throw ConfigError("fixed_weights: M must be >= 1");
  RowVec w(count);
  const double total = count * (count + 1) / 2.0;
  switch (kind) {
    case WeightKind::kMean:
      w.setConstant(1.0 / count);
      break;
    case WeightKind::kLinearIncrease:
      for (int i = 0; i < count; ++i) w[i] = (i + 1) / total;
      break;
    case WeightKind::kLinearDecrease:
      for (int i = 0; i < count; ++i) w[i] = (count - i) / total;
      break;
    case WeightKind::kAttention:
      throw ContractError("fixed_weights: attention weights are per-sample; use attention_weights");
  }
  return w;
}

namespace {

void check_feature_batches(const Mat& v, std::span<const Mat> u, const AttentionParams& attn) {
  attn.validate();
  if (u.empty()) throw DimensionError("attention: no teacher features");
  if (v.cols() != attn.w_s.rows())
    throw DimensionError("attention: student features axis 1 is " + std::to_string(v.cols()) +
                         ", W_s expects " + std::to_string(attn.w_s.rows()));
  for (const auto& ui : u) {
    if (ui.rows() != v.rows())
      throw DimensionError("attention: batch (axis 0) mismatch between student and teacher features");
    if (ui.cols() != attn.w_t.rows())
      throw DimensionError("attention: teacher features axis 1 is " + std::to_string(ui.cols()) +
                           ", W_t expects " + std::to_string(attn.w_t.rows()));
  }
}

}  // namespace

Mat attention_scores(const Mat& v, std::span<const Mat> u, const AttentionParams& attn) {
  check_feature_batches(v, u, attn);
  const Mat es = v * attn.w_s;
  Mat scores(v.rows(), static_cast<Eigen::Index>(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Mat et = u[i] * attn.w_t;
    scores.col(i) = es.cwiseProduct(et).rowwise().sum();
  }
  return scores;
}

Mat attention_weights(const Mat& v, std::span<const Mat> u, const AttentionParams& attn) {
  return softmax_tau(attention_scores(v, u, attn), 1.0);
}

Mat ensemble_target(std::span<const Mat> soft_targets, const Mat& weights) {
  if (soft_targets.empty()) throw DimensionError("ensemble_target: no teacher targets");
  const Mat& first = soft_targets.front();
  for (const auto& t : soft_targets) require_same_shape(first, t, "ensemble_target targets");
  if (weights.cols() != static_cast<Eigen::Index>(soft_targets.size()))
    throw DimensionError("ensemble_target: weights axis 1 has " + std::to_string(weights.cols()) +
                         " columns for " + std::to_string(soft_targets.size()) + " teachers");
  if (weights.rows() != 1 && weights.rows() != first.rows())
    throw DimensionError("ensemble_target: weights need 1 or batch rows");
  for (Eigen::Index r = 0; r < weights.rows(); ++r) {
    if (std::abs(weights.row(r).sum() - 1.0) > 1e-9 || (weights.row(r).array() < 0.0).any())
      throw InvariantError("ensemble_target: weight row " + std::to_string(r) +
                           " is off the simplex");
  }

  Mat out = Mat::Zero(first.rows(), first.cols());
  for (std::size_t i = 0; i < soft_targets.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    if (weights.rows() == 1) {
      out += weights(0, col) * soft_targets[i];
    } else {
      out += (soft_targets[i].array().colwise() * weights.col(col).array()).matrix();
    }
  }
  return out;
}

Mat kl_target_upstream(const Mat& target, const Mat& student_soft, double scale) {
  require_same_shape(target, student_soft, "kl_target_upstream");
  const double c = scale / static_cast<double>(target.rows());
  const auto log_t = target.array().max(kProbFloor).log();
  const auto log_s = student_soft.array().max(kProbFloor).log();
  return (c * (log_t + 1.0 - log_s)).matrix();
}

AttentionGrads attention_grads(const Mat& upstream, std::span<const Mat> soft_targets,
                               const Mat& v, std::span<const Mat> u, const AttentionParams& attn) {
  check_feature_batches(v, u, attn);
  if (soft_targets.size() != u.size())
    throw DimensionError("attention_grads: " + std::to_string(soft_targets.size()) +
                         " soft targets for " + std::to_string(u.size()) + " feature batches");
  for (const auto& t : soft_targets) require_same_shape(upstream, t, "attention_grads targets");
  if (upstream.rows() != v.rows()) throw DimensionError("attention_grads: batch mismatch");

  const auto count = static_cast<Eigen::Index>(u.size());
  const Eigen::Index batch = v.rows();
  const Mat es = v * attn.w_s;
  std::vector<Mat> et(u.size());
  Mat scores(batch, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    et[i] = u[i] * attn.w_t;
    scores.col(i) = es.cwiseProduct(et[i]).rowwise().sum();
  }
  const Mat w = softmax_tau(scores, 1.0);

  // dL/dw(n, i) = upstream_n . target_{i,n}
  Mat g(batch, count);
  for (Eigen::Index i = 0; i < count; ++i)
    g.col(i) = upstream.cwiseProduct(soft_targets[i]).rowwise().sum();

  // Softmax backward written as sum_j w_j (g_i - g_j) so that equal g gives exact zeros.
  Mat dscore(batch, count);
  for (Eigen::Index n = 0; n < batch; ++n)
    for (Eigen::Index i = 0; i < count; ++i) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < count; ++j) acc += w(n, j) * (g(n, i) - g(n, j));
      dscore(n, i) = w(n, i) * acc;
    }

  Mat mixed_et = Mat::Zero(batch, attn.w_s.cols());
  AttentionGrads out;
  out.w_t = Mat::Zero(attn.w_t.rows(), attn.w_t.cols());
  for (Eigen::Index i = 0; i < count; ++i) {
    mixed_et += (et[i].array().colwise() * dscore.col(i).array()).matrix();
    const Mat scaled_es = (es.array().colwise() * dscore.col(i).array()).matrix();
    out.w_t += u[i].transpose() * scaled_es;
  }
  out.w_s = v.transpose() * mixed_et;
  out.student_features = mixed_et * attn.w_s.transpose();
  return out;
}

}  // namespace eekd
