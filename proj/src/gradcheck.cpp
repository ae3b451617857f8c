#include "tvc/gradcheck.hpp"

#include <cmath>

#include "tvc/error.hpp"

namespace tvc {

double gradient_check(const std::vector<TensorRef>& params,
                      const std::function<double()>& loss_fn,
                      const std::function<std::vector<double>()>& grad_fn, double step) {
    require(step > 0.0, Err::ShapeMismatch, "step must be positive");

    const std::vector<double> analytic = grad_fn();
    size_t total = 0;
    for (const auto& r : params) total += r.size;
    require(analytic.size() == total, Err::ShapeMismatch,
            "analytic gradient length does not match parameter count");

    double worst = 0.0;
    size_t flat = 0;
    for (const auto& r : params) {
        for (size_t i = 0; i < r.size; ++i, ++flat) {
            const double saved = r.data[i];
            r.data[i] = saved + step;
            const double up = loss_fn();
            r.data[i] = saved - step;
            const double down = loss_fn();
            r.data[i] = saved;
            if (!std::isfinite(up) || !std::isfinite(down))
                fail(Err::NonFiniteLoss, "loss non-finite during finite differencing");
            const double fd = (up - down) / (2.0 * step);
            const double rel = std::fabs(analytic[flat] - fd) / std::max(1.0, std::fabs(fd));
            if (rel > worst) worst = rel;
        }
    }
    return worst;
}

}  // namespace tvc
