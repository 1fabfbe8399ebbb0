#ifndef EEKD_GRADCHECK_HPP
#define EEKD_GRADCHECK_HPP

#include "eekd/mlp.hpp"

#include <functional>

namespace eekd {

/// Central differences (L(p + h) - L(p - h)) / (2h) for every scalar of `params`.
DenseStack finite_diff_grad(const std::function<double(const DenseStack&)>& loss_fn,
                            const DenseStack& params, double h = 1e-5);
Mat finite_diff_grad(const std::function<double(const Mat&)>& loss_fn, const Mat& param,
                     double h = 1e-5);

/// |a - b| / max(|a|, |b|), or 0 when both are exactly zero.
double relative_error(double a, double b);

struct GradCheckResult {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t checked = 0;
  std::size_t failures = 0;  // entries with rel >= rel_tol and abs >= abs_tol
};

GradCheckResult compare_grads(const Mat& analytic, const Mat& numeric, double rel_tol = 1e-4,
                              double abs_tol = 1e-8);
GradCheckResult compare_grads(const DenseStack& analytic, const DenseStack& numeric,
                              double rel_tol = 1e-4, double abs_tol = 1e-8);
void merge(GradCheckResult& into, const GradCheckResult& other);

}  // namespace eekd

#endif  // EEKD_GRADCHECK_HPP
