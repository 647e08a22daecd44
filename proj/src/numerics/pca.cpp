#include "pgjr/numerics/pca.hpp"

#include <cmath>

#include "pgjr/error.hpp"

namespace pgjr {

namespace {

// Leading eigenvector of a symmetric PSD matrix. Returns a zero vector when
// the matrix is (numerically) zero.
Vector power_iteration(const Matrix& cov, const PcaOptions& opts) {
  const std::size_t d = cov.rows();
  Vector v(d);
  // Deterministic start with every component present.
  for (std::size_t i = 0; i < d; ++i) v[i] = 1.0 + 0.01 * static_cast<double>(i);
  double n = norm2(v);
  for (double& x : v) x /= n;

  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    Vector next(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) next[i] = dot(cov.row(i), v);
    n = norm2(next);
    if (n <= 1e-300) return Vector(d, 0.0);
    double delta = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      next[i] /= n;
      delta = std::max(delta, std::abs(next[i] - v[i]));
    }
    v = std::move(next);
    if (delta < opts.tol) break;
  }
  return v;
}

void fix_sign(Vector& v) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  if (!v.empty() && v[arg] < 0.0)
    for (double& x : v) x = -x;
}

}  // namespace

Matrix pca_2d(const Matrix& x, const PcaOptions& opts) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n < 3) throw UsageError("pca_2d: need at least 3 samples, got " + std::to_string(n));

  Vector mean(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) mean[c] += x(r, c);
  for (double& m : mean) m /= static_cast<double>(n);

  Matrix centred(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) centred(r, c) = x(r, c) - mean[c];

  Matrix cov = matmul_tn(centred, centred);
  for (double& v : cov.values()) v /= static_cast<double>(n);

  Matrix out(n, 2);
  for (std::size_t comp = 0; comp < 2 && comp < d; ++comp) {
    Vector v = power_iteration(cov, opts);
    fix_sign(v);
    Vector cv(d);
    for (std::size_t i = 0; i < d; ++i) cv[i] = dot(cov.row(i), v);
    const double lambda = dot(v, cv);
    // Deflate.
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) cov(i, j) -= lambda * v[i] * v[j];
    for (std::size_t r = 0; r < n; ++r) out(r, comp) = dot(centred.row(r), v);
  }
  return out;
}

}  // namespace pgjr
