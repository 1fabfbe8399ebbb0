#include "eekd/optim.hpp"

#include <string>

namespace eekd {

void sgd_step(ParamSet& params, const DenseStack& grads, double lr, const SgdOptions& opt) {
  if (lr < 0.0) throw ConfigError("sgd_step: learning rate must be >= 0");
  if (grads.size() != params.layers.size() || params.momentum.size() != params.layers.size())
    throw DimensionError("sgd_step: layer count mismatch (" + std::to_string(params.layers.size()) +
                         " params, " + std::to_string(grads.size()) + " grads)");
  for (std::size_t l = 0; l < grads.size(); ++l) {
    sgd_update(params.layers[l].weight, params.momentum[l].weight, grads[l].weight, lr, opt);
    sgd_update(params.layers[l].bias, params.momentum[l].bias, grads[l].bias, lr, opt);
  }
}

}  // namespace eekd
