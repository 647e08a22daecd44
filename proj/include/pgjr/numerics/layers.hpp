#pragma once

#include <cstddef>
#include <span>

#include "pgjr/numerics/matrix.hpp"

namespace pgjr {

class Rng;

/// Affine map y = W·x + b with gradient accumulators.
struct AffineParams {
  Matrix weight;       // [out x in]
  Vector bias;         // [out]
  Matrix grad_weight;  // same shape as weight
  Vector grad_bias;    // same shape as bias

  AffineParams() = default;
  AffineParams(std::size_t out, std::size_t in);

  std::size_t in_dim() const { return weight.cols(); }
  std::size_t out_dim() const { return weight.rows(); }

  void zero_grad();
  /// Weights uniform in [-1/sqrt(in), 1/sqrt(in)], biases zero.
  void init_fan_in(Rng& rng);
  void set_zero();
};

// Batched forms take one sample per row.

Matrix affine_forward(const AffineParams& p, const Matrix& x);
/// Accumulates grad_weight += upstreamᵀ·x and grad_bias += column sums of
/// upstream. Returns upstream·W when want_input_grad, an empty matrix
/// otherwise.
Matrix affine_backward(AffineParams& p, const Matrix& x, const Matrix& upstream,
                       bool want_input_grad = true);

Vector affine_forward(const AffineParams& p, std::span<const double> x);
Vector affine_backward(AffineParams& p, std::span<const double> x,
                       std::span<const double> upstream);

Vector relu(std::span<const double> x);
/// Passes upstream where x > 0. The subgradient at 0 is 0.
Vector relu_backward(std::span<const double> x, std::span<const double> upstream);
Matrix relu(const Matrix& x);
Matrix relu_backward(const Matrix& x, const Matrix& upstream);

inline constexpr double kDegenerateNorm = 1e-12;

/// x/‖x‖. Throws NumericalError("degenerate vector") when ‖x‖ <= 1e-12.
Vector l2_normalize(std::span<const double> x);
/// (I - x̂x̂ᵀ)·upstream / ‖x‖
Vector l2_normalize_backward(std::span<const double> x, std::span<const double> upstream);
Matrix normalize_rows(const Matrix& x);
Matrix normalize_rows_backward(const Matrix& x, const Matrix& upstream);

}  // namespace pgjr
