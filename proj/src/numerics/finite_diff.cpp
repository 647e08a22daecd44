#include "pgjr/numerics/finite_diff.hpp"

#include <algorithm>
#include <cmath>

#include "pgjr/error.hpp"

namespace pgjr {

Vector central_difference(const std::function<double()>& loss, std::span<double> params,
                          double step) {
  Vector grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + step;
    const double up = loss();
    params[i] = saved - step;
    const double down = loss();
    params[i] = saved;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double max_relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  if (analytic.size() != numeric.size()) throw UsageError("max_relative_error: length mismatch");
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
  }
  if (scale == 0.0) return 0.0;
  return diff / scale;
}

}  // namespace pgjr
