#include "eekd/losses.hpp"

#include <cmath>

namespace eekd {

double cross_entropy(const Mat& probs, const Mat& labels) {
  require_same_shape(probs, labels, "cross_entropy");
  if (probs.rows() == 0) throw DimensionError("cross_entropy: empty batch");
  double total = 0.0;
  for (Eigen::Index n = 0; n < probs.rows(); ++n)
    for (Eigen::Index k = 0; k < probs.cols(); ++k)
      if (labels(n, k) != 0.0) total -= labels(n, k) * std::log(std::max(probs(n, k), kProbFloor));
  return total / static_cast<double>(probs.rows());
}

double kl_div(const Mat& target, const Mat& probs) {
  require_same_shape(target, probs, "kl_div");
  if (target.rows() == 0) throw DimensionError("kl_div: empty batch");
  double total = 0.0;
  for (Eigen::Index n = 0; n < target.rows(); ++n)
    for (Eigen::Index k = 0; k < target.cols(); ++k) {
      const double t = target(n, k);
      if (t > 0.0) total += t * (std::log(t) - std::log(std::max(probs(n, k), kProbFloor)));
    }
  return total / static_cast<double>(target.rows());
}

void KdLoss::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
}

DenseStack backprop(const ForwardTrace& trace, const DenseStack& params, const Mat& dlogits,
                    const Mat* feature_grad) {
  const int num_layers = static_cast<int>(params.size());
  DenseStack grads(num_layers);
  Mat delta = dlogits;
  for (int l = num_layers - 1; l >= 0; --l) {
    const Mat& input = l == 0 ? trace.inputs : trace.activations[l - 1];
    grads[l].weight = delta.transpose() * input;
    grads[l].bias = delta.colwise().sum();
    if (l == 0) break;
    Mat up = delta * params[l].weight;
    if (l == num_layers - 1 && feature_grad) {
      require_same_shape(up, *feature_grad, "backprop feature_grad");
      up += *feature_grad;
    }
    delta = up.cwiseProduct((trace.pre_activations[l - 1].array() > 0.0).cast<double>().matrix());
  }
  return grads;
}

LossGrads loss_grads(const ForwardTrace& trace, const MlpSpec& spec, const DenseStack& params,
                     const Mat& labels, const Mat& target, const KdLoss& loss,
                     const Mat* feature_grad) {
  loss.validate();
  check_shapes(params, spec);
  require_same_shape(trace.logits, labels, "loss_grads labels");
  const double batch = static_cast<double>(trace.logits.rows());

  LossGrads out;
  const Mat probs = softmax_tau(trace.logits, 1.0);
  out.ce = cross_entropy(probs, labels);
  Mat dlogits = loss.alpha / batch * (probs - labels);

  const double kl_scale = loss.kl_scale();
  if (kl_scale != 0.0) {
    require_same_shape(trace.logits, target, "loss_grads target");
    const Mat soft = softmax_tau(trace.logits, loss.tau);
    out.kl = kl_div(target, soft);
    // d/dz KL(t || softmax(z / tau)) = (soft * sum(t) - t) / tau
    const Vec mass = target.rowwise().sum();
    Mat dkl = soft.array().colwise() * mass.array();
    dkl -= target;
    dlogits += kl_scale / (loss.tau * batch) * dkl;
  }
  out.loss = loss.alpha * out.ce + kl_scale * out.kl;
  if (!std::isfinite(out.loss)) throw NumericError("loss_grads: non-finite loss");
  out.grads = backprop(trace, params, dlogits, feature_grad);
  return out;
}

}  // namespace eekd
