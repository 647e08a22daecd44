#include "pgjr/numerics/layers.hpp"

#include <algorithm>
#include <cmath>

#include "pgjr/error.hpp"
#include "pgjr/numerics/rng.hpp"

namespace pgjr {

AffineParams::AffineParams(std::size_t out, std::size_t in)
    : weight(out, in), bias(out, 0.0), grad_weight(out, in), grad_bias(out, 0.0) {}

void AffineParams::zero_grad() {
  grad_weight.fill(0.0);
  std::fill(grad_bias.begin(), grad_bias.end(), 0.0);
}

void AffineParams::init_fan_in(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(in_dim(), 1)));
  for (double& w : weight.values()) w = rng.uniform(-bound, bound);
  std::fill(bias.begin(), bias.end(), 0.0);
}

void AffineParams::set_zero() {
  weight.fill(0.0);
  std::fill(bias.begin(), bias.end(), 0.0);
}

Matrix affine_forward(const AffineParams& p, const Matrix& x) {
  if (x.cols() != p.in_dim()) {
    throw UsageError("affine_forward: input " + shape_string(x) + " does not match weight " +
                     shape_string(p.weight));
  }
  Matrix y = matmul_nt(x, p.weight);
  for (std::size_t r = 0; r < y.rows(); ++r) {
    auto row = y.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += p.bias[j];
  }
  return y;
}

Matrix affine_backward(AffineParams& p, const Matrix& x, const Matrix& upstream,
                       bool want_input_grad) {
  if (x.cols() != p.in_dim() || upstream.cols() != p.out_dim() || x.rows() != upstream.rows()) {
    throw UsageError("affine_backward: shapes x" + shape_string(x) + " upstream" +
                     shape_string(upstream) + " weight" + shape_string(p.weight));
  }
  add_inplace(p.grad_weight, matmul_tn(upstream, x));
  for (std::size_t r = 0; r < upstream.rows(); ++r) {
    auto row = upstream.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) p.grad_bias[j] += row[j];
  }
  if (!want_input_grad) return {};
  return matmul(upstream, p.weight);
}

Vector affine_forward(const AffineParams& p, std::span<const double> x) {
  const Matrix out = affine_forward(p, row_matrix(x));
  auto y = out.values();
  return {y.begin(), y.end()};
}

Vector affine_backward(AffineParams& p, std::span<const double> x,
                       std::span<const double> upstream) {
  const Matrix out = affine_backward(p, row_matrix(x), row_matrix(upstream));
  auto g = out.values();
  return {g.begin(), g.end()};
}

Vector relu(std::span<const double> x) {
  Vector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  return y;
}

Vector relu_backward(std::span<const double> x, std::span<const double> upstream) {
  if (x.size() != upstream.size()) throw UsageError("relu_backward: length mismatch");
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] > 0.0 ? upstream[i] : 0.0;
  return g;
}

Matrix relu(const Matrix& x) {
  return Matrix(x.rows(), x.cols(), relu(x.values()));
}

Matrix relu_backward(const Matrix& x, const Matrix& upstream) {
  if (x.rows() != upstream.rows() || x.cols() != upstream.cols()) {
    throw UsageError("relu_backward: shape mismatch " + shape_string(x) + " vs " +
                     shape_string(upstream));
  }
  return Matrix(x.rows(), x.cols(), relu_backward(x.values(), upstream.values()));
}

namespace {

double checked_norm(std::span<const double> x) {
  const double n = norm2(x);
  if (!(n > kDegenerateNorm)) throw NumericalError("degenerate vector");
  return n;
}

}  // namespace

Vector l2_normalize(std::span<const double> x) {
  const double n = checked_norm(x);
  Vector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / n;
  return y;
}

Vector l2_normalize_backward(std::span<const double> x, std::span<const double> upstream) {
  if (x.size() != upstream.size()) throw UsageError("l2_normalize_backward: length mismatch");
  const double n = checked_norm(x);
  double proj = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) proj += (x[i] / n) * upstream[i];
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = (upstream[i] - (x[i] / n) * proj) / n;
  return g;
}

Matrix normalize_rows(const Matrix& x) {
  Matrix y(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const Vector v = l2_normalize(x.row(r));
    std::copy(v.begin(), v.end(), y.row(r).begin());
  }
  return y;
}

Matrix normalize_rows_backward(const Matrix& x, const Matrix& upstream) {
  if (x.rows() != upstream.rows() || x.cols() != upstream.cols()) {
    throw UsageError("normalize_rows_backward: shape mismatch");
  }
  Matrix g(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const Vector v = l2_normalize_backward(x.row(r), upstream.row(r));
    std::copy(v.begin(), v.end(), g.row(r).begin());
  }
  return g;
}

}  // namespace pgjr
