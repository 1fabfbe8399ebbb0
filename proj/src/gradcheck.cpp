#include "eekd/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace eekd {

Mat finite_diff_grad(const std::function<double(const Mat&)>& loss_fn, const Mat& param,
                     double h) {
  Mat probe = param;
  Mat grad(param.rows(), param.cols());
  for (Eigen::Index i = 0; i < param.size(); ++i) {
    const double orig = probe.data()[i];
    probe.data()[i] = orig + h;
    const double up = loss_fn(probe);
    probe.data()[i] = orig - h;
    const double down = loss_fn(probe);
    probe.data()[i] = orig;
    grad.data()[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

DenseStack finite_diff_grad(const std::function<double(const DenseStack&)>& loss_fn,
                            const DenseStack& params, double h) {
  DenseStack probe = params;
  DenseStack grads = zeros_like(params);
  auto sweep = [&](double* values, double* out, Eigen::Index count) {
    for (Eigen::Index i = 0; i < count; ++i) {
      const double orig = values[i];
      values[i] = orig + h;
      const double up = loss_fn(probe);
      values[i] = orig - h;
      const double down = loss_fn(probe);
      values[i] = orig;
      out[i] = (up - down) / (2.0 * h);
    }
  };
  for (std::size_t l = 0; l < probe.size(); ++l) {
    sweep(probe[l].weight.data(), grads[l].weight.data(), probe[l].weight.size());
    sweep(probe[l].bias.data(), grads[l].bias.data(), probe[l].bias.size());
  }
  return grads;
}

double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

GradCheckResult compare_grads(const Mat& analytic, const Mat& numeric, double rel_tol,
                              double abs_tol) {
  require_same_shape(analytic, numeric, "compare_grads");
  GradCheckResult r;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double a = analytic.data()[i];
    const double n = numeric.data()[i];
    const double abs_err = std::abs(a - n);
    const double rel = relative_error(a, n);
    ++r.checked;
    r.max_abs_error = std::max(r.max_abs_error, abs_err);
    if (std::max(std::abs(a), std::abs(n)) >= abs_tol) r.max_rel_error = std::max(r.max_rel_error, rel);
    // Near-zero entries are judged by the absolute tolerance only.
    if (abs_err >= abs_tol && rel >= rel_tol) ++r.failures;
  }
  return r;
}

GradCheckResult compare_grads(const DenseStack& analytic, const DenseStack& numeric,
                              double rel_tol, double abs_tol) {
  if (analytic.size() != numeric.size()) throw DimensionError("compare_grads: layer count");
  GradCheckResult r;
  for (std::size_t l = 0; l < analytic.size(); ++l) {
    merge(r, compare_grads(analytic[l].weight, numeric[l].weight, rel_tol, abs_tol));
    merge(r, compare_grads(Mat(analytic[l].bias), Mat(numeric[l].bias), rel_tol, abs_tol));
  }
  return r;
}

void merge(GradCheckResult& into, const GradCheckResult& other) {
  into.max_rel_error = std::max(into.max_rel_error, other.max_rel_error);
  into.max_abs_error = std::max(into.max_abs_error, other.max_abs_error);
  into.checked += other.checked;
  into.failures += other.failures;
}

}  // namespace eekd
