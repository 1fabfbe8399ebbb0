#include "eekd/mlp.hpp"

#include <cmath>
#include <string>

namespace eekd {

MlpSpec::MlpSpec(int input, std::vector<int> hidden, int classes)
    : input_dim(input), hidden_dims(std::move(hidden)), num_classes(classes) {
  validate();
}

void MlpSpec::validate() const {
  if (input_dim <= 0) throw ConfigError("MlpSpec: input_dim must be positive");
  if (num_classes <= 0) throw ConfigError("MlpSpec: num_classes must be positive");
  if (hidden_dims.empty()) throw ConfigError("MlpSpec: at least one hidden layer is required");
  for (int h : hidden_dims)
    if (h <= 0) throw ConfigError("MlpSpec: hidden widths must be positive");
}

std::pair<int, int> MlpSpec::layer_dims(int l) const {
  const int in = l == 0 ? input_dim : hidden_dims[l - 1];
  const int out = l + 1 == num_layers() ? num_classes : hidden_dims[l];
  return {in, out};
}

DenseStack zeros_like(const DenseStack& stack) {
  DenseStack out;
  out.reserve(stack.size());
  for (const auto& d : stack)
    out.push_back({Mat::Zero(d.weight.rows(), d.weight.cols()), RowVec::Zero(d.bias.size())});
  return out;
}

std::size_t parameter_count(const DenseStack& stack) {
  std::size_t n = 0;
  for (const auto& d : stack) n += d.weight.size() + d.bias.size();
  return n;
}

void check_shapes(const DenseStack& stack, const MlpSpec& spec) {
  if (static_cast<int>(stack.size()) != spec.num_layers())
    throw DimensionError("layer count " + std::to_string(stack.size()) + " does not match spec (" +
                         std::to_string(spec.num_layers()) + ")");
  for (int l = 0; l < spec.num_layers(); ++l) {
    auto [in, out] = spec.layer_dims(l);
    const auto& d = stack[l];
    if (d.weight.rows() != out || d.bias.size() != out)
      throw DimensionError("layer " + std::to_string(l) + ": output axis expected " +
                           std::to_string(out));
    if (d.weight.cols() != in)
      throw DimensionError("layer " + std::to_string(l) + ": input axis expected " +
                           std::to_string(in));
  }
}

Mat fan_uniform(Eigen::Index rows, Eigen::Index cols, int fan_in, int fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = bound * (2.0 * rng.uniform() - 1.0);
  return m;
}

ParamSet mlp_init(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  ParamSet p;
  for (int l = 0; l < spec.num_layers(); ++l) {
    auto [in, out] = spec.layer_dims(l);
    p.layers.push_back({fan_uniform(out, in, in, out, rng), RowVec::Zero(out)});
  }
  p.momentum = zeros_like(p.layers);
  return p;
}

ForwardTrace forward(const DenseStack& layers, const MlpSpec& spec, const Mat& inputs) {
  check_shapes(layers, spec);
  if (inputs.cols() != spec.input_dim)
    throw DimensionError("forward: inputs axis 1 has " + std::to_string(inputs.cols()) +
                         " features, spec expects " + std::to_string(spec.input_dim));

  ForwardTrace t;
  t.inputs = inputs;
  const Mat* x = &t.inputs;
  const int hidden = spec.num_layers() - 1;
  t.pre_activations.reserve(hidden);
  t.activations.reserve(hidden);
  for (int l = 0; l < hidden; ++l) {
    Mat z = *x * layers[l].weight.transpose();
    z.rowwise() += layers[l].bias;
    t.activations.push_back(z.cwiseMax(0.0));
    t.pre_activations.push_back(std::move(z));
    x = &t.activations.back();
  }
  t.logits = *x * layers.back().weight.transpose();
  t.logits.rowwise() += layers.back().bias;
  if (!t.logits.allFinite()) throw NumericError("forward: non-finite logits");
  return t;
}

}  // namespace eekd
