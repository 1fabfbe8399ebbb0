#ifndef EEKD_DATA_HPP
#define EEKD_DATA_HPP

#include "eekd/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace eekd {

/// Labelled classification data; inputs are (n x input_dim).
struct Dataset {
  Mat inputs;
  std::vector<int> labels;
  int num_classes = 0;

  Eigen::Index size() const { return inputs.rows(); }
  int input_dim() const { return static_cast<int>(inputs.cols()); }
  void validate() const;
  Mat one_hot() const;
};

struct DataSplit {
  Dataset train;
  Dataset test;
};

/// Centers every column and scales it to unit (population) variance.
/// Constant columns are only centered.
void standardize(Mat& inputs);

/// K Gaussian clusters with means 3 * (cos 2 pi k / K, sin 2 pi k / K, 0, ...)
/// and isotropic std `noise`. Sample i has label i mod K; its `dim` coordinates
/// are drawn in order with Rng::normal. The result is standardized.
Dataset gen_blobs(std::uint64_t seed, int n, int num_classes, int dim, double noise);

/// One generated pool of n_train + n_test samples, standardized together and split.
DataSplit gen_blobs_split(std::uint64_t seed, int n_train, int n_test, int num_classes, int dim,
                          double noise);

/// Rows [begin, end) of a dataset.
Dataset slice(const Dataset& data, Eigen::Index begin, Eigen::Index end);

// IDX (big-endian) format: images magic 0x00000803 with dims (n, rows, cols),
// labels magic 0x00000801 with dim (n), unsigned byte payloads.
inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Pixels scaled to [0, 1] then standardized; num_classes = max label + 1.
Dataset read_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path);

struct Batch {
  Mat inputs;
  Mat labels;  // one-hot
  std::vector<Eigen::Index> indices;
};

/// Fisher-Yates permutation driven by Rng(seed): for i = n-1 .. 1, j = next() mod (i + 1).
std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, std::uint64_t seed);

/// Contiguous slices of the shuffled order; the last partial batch is kept.
std::vector<Batch> batch_iter(const Dataset& data, int batch_size, std::uint64_t epoch_seed);

}  // namespace eekd

#endif  // EEKD_DATA_HPP
