#pragma once

#include <cstddef>

#include "pgjr/numerics/matrix.hpp"

namespace pgjr {

struct PcaOptions {
  std::size_t max_iter = 100;
  double tol = 1e-9;
};

/// Projects mean-centred rows of x onto the top two principal directions,
/// found by power iteration with deflation on the covariance. Each direction
/// is signed so its largest-magnitude loading is positive. Requires n >= 3.
Matrix pca_2d(const Matrix& x, const PcaOptions& opts = {});

}  // namespace pgjr
