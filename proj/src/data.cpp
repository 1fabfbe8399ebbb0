#include "eekd/data.hpp"

#include "eekd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <sstream>

namespace eekd {

void Dataset::validate() const {
  if (inputs.rows() == 0) throw ConfigError("dataset is empty");
  if (static_cast<Eigen::Index>(labels.size()) != inputs.rows())
    throw ConsistencyError("dataset has " + std::to_string(inputs.rows()) + " inputs but " +
                           std::to_string(labels.size()) + " labels");
  for (int y : labels)
    if (y < 0 || y >= num_classes)
      throw ConfigError("label " + std::to_string(y) + " outside [0, " +
                        std::to_string(num_classes) + ")");
}

Mat Dataset::one_hot() const {
  Mat y = Mat::Zero(size(), num_classes);
  for (Eigen::Index i = 0; i < size(); ++i) y(i, labels[i]) = 1.0;
  return y;
}

void standardize(Mat& inputs) {
  const double n = static_cast<double>(inputs.rows());
  for (Eigen::Index c = 0; c < inputs.cols(); ++c) {
    auto col = inputs.col(c);
    const double mean = col.sum() / n;
    col.array() -= mean;
    const double var = col.squaredNorm() / n;
    if (var > 0.0) col /= std::sqrt(var);
  }
}

namespace {

Dataset blobs_raw(std::uint64_t seed, int n, int num_classes, int dim, double noise) {
  if (num_classes <= 0 || n <= 0 || dim <= 0)
    throw ConfigError("gen_blobs: n, num_classes and dim must be positive");
  if (n % num_classes != 0)
    throw ConfigError("gen_blobs: n=" + std::to_string(n) + " is not divisible by K=" +
                      std::to_string(num_classes));
  if (!(noise >= 0.0)) throw ConfigError("gen_blobs: noise must be >= 0");

  Rng rng(seed);
  Dataset d;
  d.num_classes = num_classes;
  d.inputs.resize(n, dim);
  d.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const int k = i % num_classes;
    const double angle = 2.0 * std::numbers::pi * k / num_classes;
    d.labels[i] = k;
    for (int j = 0; j < dim; ++j) {
      double mean = 0.0;
      if (j == 0) mean = 3.0 * std::cos(angle);
      if (j == 1) mean = 3.0 * std::sin(angle);
      d.inputs(i, j) = mean + noise * rng.normal();
    }
  }
  return d;
}

}  // namespace

Dataset gen_blobs(std::uint64_t seed, int n, int num_classes, int dim, double noise) {
  Dataset d = blobs_raw(seed, n, num_classes, dim, noise);
  standardize(d.inputs);
  return d;
}

DataSplit gen_blobs_split(std::uint64_t seed, int n_train, int n_test, int num_classes, int dim,
                          double noise) {
  if (n_train <= 0 || n_test <= 0) throw ConfigError("gen_blobs_split: empty split");
  Dataset all = gen_blobs(seed, n_train + n_test, num_classes, dim, noise);
  return {slice(all, 0, n_train), slice(all, n_train, n_train + n_test)};
}

Dataset slice(const Dataset& data, Eigen::Index begin, Eigen::Index end) {
  if (begin < 0 || end > data.size() || begin >= end) throw RangeError("slice: bad range");
  Dataset d;
  d.num_classes = data.num_classes;
  d.inputs = data.inputs.middleRows(begin, end - begin);
  d.labels.assign(data.labels.begin() + begin, data.labels.begin() + end);
  return d;
}

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& buf, std::size_t offset,
                        const std::filesystem::path& path) {
  if (buf.size() < offset + 4) throw IoError("truncated IDX header in " + path.string());
  return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
         (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

std::string hex32(std::uint32_t v) {
  std::ostringstream os;
  os << "0x" << std::hex;
  os.width(8);
  os.fill('0');
  os << v;
  return os.str();
}

void check_magic(std::uint32_t found, std::uint32_t expected, const std::filesystem::path& path) {
  if (found != expected)
    throw FormatError("bad IDX magic in " + path.string() + ": expected " + hex32(expected) +
                      ", found " + hex32(found));
}

}  // namespace

Dataset read_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path) {
  const auto images = read_file(images_path);
  const auto labels = read_file(labels_path);

  check_magic(read_be32(images, 0, images_path), kIdxImagesMagic, images_path);
  check_magic(read_be32(labels, 0, labels_path), kIdxLabelsMagic, labels_path);

  const std::size_t n_images = read_be32(images, 4, images_path);
  const std::size_t rows = read_be32(images, 8, images_path);
  const std::size_t cols = read_be32(images, 12, images_path);
  const std::size_t n_labels = read_be32(labels, 4, labels_path);
  if (n_images != n_labels)
    throw ConsistencyError("IDX count mismatch: " + std::to_string(n_images) + " images vs " +
                           std::to_string(n_labels) + " labels");
  if (n_images == 0) throw ConsistencyError("IDX files contain no samples");

  const std::size_t pixels = rows * cols;
  if (images.size() < 16 + n_images * pixels)
    throw IoError("truncated IDX image payload in " + images_path.string());
  if (labels.size() < 8 + n_labels) throw IoError("truncated IDX label payload in " + labels_path.string());

  Dataset d;
  d.inputs.resize(static_cast<Eigen::Index>(n_images), static_cast<Eigen::Index>(pixels));
  d.labels.resize(n_images);
  for (std::size_t i = 0; i < n_images; ++i) {
    for (std::size_t p = 0; p < pixels; ++p)
      d.inputs(i, p) = images[16 + i * pixels + p] / 255.0;
    d.labels[i] = labels[8 + i];
  }
  d.num_classes = *std::max_element(d.labels.begin(), d.labels.end()) + 1;
  standardize(d.inputs);
  return d;
}

std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, std::uint64_t seed) {
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(seed);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.next() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  return order;
}

std::vector<Batch> batch_iter(const Dataset& data, int batch_size, std::uint64_t epoch_seed) {
  if (batch_size < 1) throw ConfigError("batch_iter: batch_size must be >= 1");
  const auto order = shuffled_indices(data.size(), epoch_seed);
  std::vector<Batch> batches;
  for (Eigen::Index start = 0; start < data.size(); start += batch_size) {
    const Eigen::Index count = std::min<Eigen::Index>(batch_size, data.size() - start);
    Batch b;
    b.inputs.resize(count, data.inputs.cols());
    b.labels = Mat::Zero(count, data.num_classes);
    b.indices.assign(order.begin() + start, order.begin() + start + count);
    for (Eigen::Index r = 0; r < count; ++r) {
      b.inputs.row(r) = data.inputs.row(b.indices[r]);
      b.labels(r, data.labels[b.indices[r]]) = 1.0;
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

}  // namespace eekd
