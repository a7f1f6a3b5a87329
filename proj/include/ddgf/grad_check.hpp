#pragma once

#include <functional>
#include <vector>

#include "ddgf/tensor.hpp"

namespace ddgf {

using ScalarFunction = std::function<double(const std::vector<Tensor>&)>;

// Central differences (f(p + eps e) - f(p - eps e)) / (2 eps) for every entry
// of every parameter. params is perturbed in place and restored.
std::vector<Tensor> finite_diff_grad(const ScalarFunction& f, std::vector<Tensor>& params,
                                     double eps = 1e-5);

// Largest |a - b| / max(|a|, floor) over all entries.
double max_relative_error(const Tensor& analytic, const Tensor& numeric, double floor = 1e-8);

}  // namespace ddgf
