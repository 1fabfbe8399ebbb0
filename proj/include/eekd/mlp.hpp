#ifndef EEKD_MLP_HPP
#define EEKD_MLP_HPP

#include "eekd/rng.hpp"
#include "eekd/tensor.hpp"

#include <cstdint>
#include <vector>

namespace eekd {

/// Fully connected ReLU network: input -> hidden_dims... -> num_classes.
struct MlpSpec {
  int input_dim = 0;
  std::vector<int> hidden_dims;
  int num_classes = 0;

  MlpSpec() = default;
  MlpSpec(int input, std::vector<int> hidden, int classes);

  /// Throws ConfigError unless all widths are positive and hidden_dims is non-empty.
  void validate() const;
  int feature_dim() const { return hidden_dims.back(); }
  int num_layers() const { return static_cast<int>(hidden_dims.size()) + 1; }
  /// (fan_in, fan_out) of layer `l`; the last layer is the classifier.
  std::pair<int, int> layer_dims(int l) const;

  bool operator==(const MlpSpec&) const = default;
};

/// One affine layer. weight is (out x in); y = x * weight^T + bias.
struct Dense {
  Mat weight;
  RowVec bias;
};

using DenseStack = std::vector<Dense>;

/// Learnable parameters plus SGD momentum buffers of identical shapes.
struct ParamSet {
  DenseStack layers;
  DenseStack momentum;
};

DenseStack zeros_like(const DenseStack& stack);
std::size_t parameter_count(const DenseStack& stack);
/// Shapes of `stack` must match `spec`; throws DimensionError otherwise.
void check_shapes(const DenseStack& stack, const MlpSpec& spec);

/// Fills a (rows x cols) matrix from U(-b, b), b = sqrt(6 / (fan_in + fan_out)),
/// consuming the stream in row-major order.
Mat fan_uniform(Eigen::Index rows, Eigen::Index cols, int fan_in, int fan_out, Rng& rng);

/// Per-layer weights drawn with fan_uniform from Rng(seed), layer by layer;
/// biases and momentum buffers zero.
ParamSet mlp_init(const MlpSpec& spec, std::uint64_t seed);

struct ForwardTrace {
  Mat inputs;
  std::vector<Mat> pre_activations;  // one per hidden layer
  std::vector<Mat> activations;      // ReLU(pre_activations[l])
  Mat logits;

  /// Last hidden activation (batch x feature_dim).
  const Mat& feature() const { return activations.back(); }
};

ForwardTrace forward(const DenseStack& layers, const MlpSpec& spec, const Mat& inputs);
inline ForwardTrace forward(const ParamSet& params, const MlpSpec& spec, const Mat& inputs) {
  return forward(params.layers, spec, inputs);
}

}  // namespace eekd

#endif  // EEKD_MLP_HPP
