#pragma once

#include <functional>
#include <span>

#include "pgjr/numerics/matrix.hpp"

namespace pgjr {

inline constexpr double kFiniteDiffStep = 1e-5;

/// Central differences of loss() with respect to every entry of params,
/// perturbing in place and restoring each entry afterwards.
Vector central_difference(const std::function<double()>& loss, std::span<double> params,
                          double step = kFiniteDiffStep);

/// max_i |a_i - b_i| / max(max_i |a_i|, max_i |b_i|). Zero when both are
/// identically zero.
double max_relative_error(std::span<const double> analytic, std::span<const double> numeric);

}  // namespace pgjr
