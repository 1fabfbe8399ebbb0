#ifndef EEKD_ENSEMBLE_HPP
#define EEKD_ENSEMBLE_HPP

#include "eekd/tensor.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace eekd {

enum class WeightKind { kMean, kLinearIncrease, kLinearDecrease, kAttention };

std::string_view to_string(WeightKind kind);
WeightKind weight_kind_from_string(std::string_view name);

struct WeightStrategy {
  WeightKind kind = WeightKind::kAttention;
  int embed_dim = 16;  // attention only
};

/// Projections into the shared scoring space: E_s(v) = W_s^T v, E_t(u) = W_t^T u.
/// One W_t is shared by every intermediate teacher.
struct AttentionParams {
  Mat w_s;  // student feature_dim x embed_dim
  Mat w_t;  // teacher feature_dim x embed_dim

  void validate() const;
};

/// W_s then W_t drawn with fan_uniform from Rng(seed).
AttentionParams attention_init(int student_feature_dim, int teacher_feature_dim, int embed_dim,
                               std::uint64_t seed);

/// Global weights for the fixed strategies, returned as a 1 x M row.
///   mean: 1/M;  linear-increase: i / sum(1..M);  linear-decrease: (M + 1 - i) / sum(1..M)
RowVec fixed_weights(WeightKind kind, int count);

/// Bilinear scores s(n, i) = E_s(v_n) . E_t(u_{i,n}), shape (batch x M).
Mat attention_scores(const Mat& student_features, std::span<const Mat> teacher_features,
                     const AttentionParams& attn);

/// Row-wise softmax of attention_scores: per-sample weights on the open simplex.
Mat attention_weights(const Mat& student_features, std::span<const Mat> teacher_features,
                      const AttentionParams& attn);

/// Per-sample convex combination sum_i w_i * targets[i]. `weights` has either one
/// row (global) or one row per sample; each row must sum to 1 within 1e-9.
Mat ensemble_target(std::span<const Mat> soft_targets, const Mat& weights);

/// dL/dtarget for L = scale * KL(target || student_soft), batch-mean reduction.
Mat kl_target_upstream(const Mat& target, const Mat& student_soft, double scale);

struct AttentionGrads {
  Mat w_s;
  Mat w_t;
  Mat student_features;  // dL/dv, only consumed when gradients are routed into the student
};

/// Exact gradients of the loss with respect to W_s and W_t, chained through the
/// weight softmax and the convex combination. Features are treated as constants.
AttentionGrads attention_grads(const Mat& kl_upstream, std::span<const Mat> soft_targets,
                               const Mat& student_features, std::span<const Mat> teacher_features,
                               const AttentionParams& attn);

}  // namespace eekd

#endif  // EEKD_ENSEMBLE_HPP
