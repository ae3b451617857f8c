#pragma once

#include <functional>
#include <vector>

#include "tvc/bundle.hpp"

namespace tvc {

// Max over parameters of |analytic - central difference| / max(1, |central
// difference|). loss_fn is evaluated at the current parameter values, which
// are perturbed in place through the refs and restored. grad_fn returns the
// analytic gradient flattened in ref order, evaluated at the base point.
double gradient_check(const std::vector<TensorRef>& params,
                      const std::function<double()>& loss_fn,
                      const std::function<std::vector<double>()>& grad_fn, double step);

}  // namespace tvc
