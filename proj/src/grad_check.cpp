#include "ddgf/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "ddgf/error.hpp"

namespace ddgf {

std::vector<Tensor> finite_diff_grad(const ScalarFunction& f, std::vector<Tensor>& params,
                                     double eps) {
  if (!(eps > 0.0)) throw ContractError("finite_diff_grad: eps must be positive");
  std::vector<Tensor> grads;
  grads.reserve(params.size());
  for (auto& p : params) {
    Tensor g(p.rows(), p.cols());
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double saved = p[k];
      p[k] = saved + eps;
      const double up = f(params);
      p[k] = saved - eps;
      const double down = f(params);
      p[k] = saved;
      g[k] = (up - down) / (2.0 * eps);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

double max_relative_error(const Tensor& analytic, const Tensor& numeric, double floor) {
  if (!analytic.same_shape(numeric)) {
    throw ShapeError("max_relative_error: " + analytic.shape_string() + " vs " +
                     numeric.shape_string());
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const double denom = std::max(std::abs(analytic[k]), floor);
    worst = std::max(worst, std::abs(analytic[k] - numeric[k]) / denom);
  }
  return worst;
}

}  // namespace ddgf
