#ifndef EEKD_OPTIM_HPP
#define EEKD_OPTIM_HPP

#include "eekd/mlp.hpp"
#include "eekd/tensor.hpp"

namespace eekd {

struct SgdOptions {
  double momentum = 0.9;
  double weight_decay = 5e-4;
};

/// buffer <- momentum * buffer + grad + weight_decay * param; param <- param - lr * buffer
template <typename P, typename B, typename G>
void sgd_update(Eigen::MatrixBase<P>& param, Eigen::MatrixBase<B>& buffer,
                const Eigen::MatrixBase<G>& grad, double lr, const SgdOptions& opt) {
  require_same_shape(param, grad, "sgd_update grad");
  require_same_shape(param, buffer, "sgd_update buffer");
  buffer.derived() = opt.momentum * buffer + grad + opt.weight_decay * param;
  param.derived() -= lr * buffer;
}

/// In-place SGD with momentum and weight decay over every layer.
void sgd_step(ParamSet& params, const DenseStack& grads, double lr, const SgdOptions& opt);

}  // namespace eekd

#endif  // EEKD_OPTIM_HPP
