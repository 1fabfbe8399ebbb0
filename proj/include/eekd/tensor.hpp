#ifndef EEKD_TENSOR_HPP
#define EEKD_TENSOR_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace eekd {

// Dense row-major storage matches the on-disk tensor layout and the
// (batch x features) convention used throughout.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat = Matrix<double>;
using RowVec = RowVector<double>;
using Vec = Vector<double>;

/// Floor applied inside every log term of the losses.
inline constexpr double kProbFloor = 1e-12;

// ---------------------------------------------------------------------------
// Error taxonomy. Everything derives from eekd::Error so callers can catch
// broadly; the harness maps ConfigError to exit code 1, the rest to 2.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};
class RangeError : public Error {
 public:
  using Error::Error;
};
class NumericError : public Error {
 public:
  using Error::Error;
};
class InvariantError : public Error {
 public:
  using Error::Error;
};
class ContractError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};
class FormatError : public Error {
 public:
  using Error::Error;
};
class VersionError : public Error {
 public:
  using Error::Error;
};
class CorruptionError : public Error {
 public:
  using Error::Error;
};
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

inline std::string shape_str(Eigen::Index rows, Eigen::Index cols) {
  return "(" + std::to_string(rows) + ", " + std::to_string(cols) + ")";
}

template <typename A, typename B>
void require_same_shape(const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b,
                        const char* what) {
  if (a.rows() != b.rows())
    throw DimensionError(std::string(what) + ": row (axis 0) mismatch " +
                         shape_str(a.rows(), a.cols()) + " vs " + shape_str(b.rows(), b.cols()));
  if (a.cols() != b.cols())
    throw DimensionError(std::string(what) + ": column (axis 1) mismatch " +
                         shape_str(a.rows(), a.cols()) + " vs " + shape_str(b.rows(), b.cols()));
}

}  // namespace eekd

#endif  // EEKD_TENSOR_HPP
