#ifndef EEKD_LOSSES_HPP
#define EEKD_LOSSES_HPP

#include "eekd/mlp.hpp"
#include "eekd/tensor.hpp"

namespace eekd {

/// Row-wise softmax of logits / tau, with per-row max subtraction.
template <typename Derived>
Matrix<typename Derived::Scalar> softmax_tau(const Eigen::MatrixBase<Derived>& logits,
                                             typename Derived::Scalar tau) {
  using Scalar = typename Derived::Scalar;
  if (!(tau > Scalar(0))) throw ConfigError("softmax_tau: temperature must be > 0");
  Matrix<Scalar> out = logits / tau;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    row.array() = (row.array() - row.maxCoeff()).exp();
    row /= row.sum();
  }
  return out;
}

/// -(1/B) sum_n y_n^T log p_n with p floored at kProbFloor.
double cross_entropy(const Mat& probs, const Mat& labels);

/// (1/B) sum_n sum_k t log(t / s); t = 0 terms contribute 0, s floored at kProbFloor.
double kl_div(const Mat& target, const Mat& probs);

/// Distillation objective alpha * CE(softmax(z), y) + (1 - alpha) * c * KL(target || softmax(z / tau)),
/// where c = tau^2 when tau_squared is set and 1 otherwise.
struct KdLoss {
  double alpha = 0.5;
  double tau = 5.0;
  bool tau_squared = false;

  void validate() const;
  double kl_scale() const { return (1.0 - alpha) * (tau_squared ? tau * tau : 1.0); }
};

struct LossGrads {
  double loss = 0.0;
  double ce = 0.0;
  double kl = 0.0;
  DenseStack grads;
};

/**
 * Loss and exact gradients with respect to every student parameter. The target
 * is a constant. When alpha == 1 the target is not read.
 *
 * feature_grad, when given, is an extra dL/d(feature) added at the last hidden
 * activation (used when attention gradients are routed into the student).
 */
LossGrads loss_grads(const ForwardTrace& trace, const MlpSpec& spec, const DenseStack& params,
                     const Mat& labels, const Mat& target, const KdLoss& loss,
                     const Mat* feature_grad = nullptr);

/// Backpropagates dL/dlogits (and an optional dL/dfeature) through the trace.
DenseStack backprop(const ForwardTrace& trace, const DenseStack& params, const Mat& dlogits,
                    const Mat* feature_grad = nullptr);

}  // namespace eekd

#endif  // EEKD_LOSSES_HPP
