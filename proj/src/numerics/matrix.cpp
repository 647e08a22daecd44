#include "pgjr/numerics/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "pgjr/error.hpp"
#include "pgjr/numerics/parallel.hpp"

namespace pgjr {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw UsageError("matrix data length " + std::to_string(data_.size()) + " does not match " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw UsageError("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string shape_string(const Matrix& m) {
  return "[" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "]";
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw UsageError("matmul: dimension mismatch " + shape_string(a) + " x " + shape_string(b));
  }
  Matrix c(a.rows(), b.cols());
  const std::size_t inner = a.cols();
  const std::size_t p = b.cols();
  parallel_for(a.rows(), inner * p, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double* out = c.row(i).data();
      for (std::size_t t = 0; t < inner; ++t) {
        const double av = a(i, t);
        const double* brow = b.row(t).data();
        for (std::size_t j = 0; j < p; ++j) out[j] += av * brow[j];
      }
    }
  });
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw UsageError("matmul_nt: dimension mismatch " + shape_string(a) + " x " +
                     shape_string(b) + "^T");
  }
  Matrix c(a.rows(), b.rows());
  const std::size_t inner = a.cols();
  parallel_for(a.rows(), inner * b.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double* arow = a.row(i).data();
      for (std::size_t j = 0; j < b.rows(); ++j) {
        const double* brow = b.row(j).data();
        double s = 0.0;
        for (std::size_t t = 0; t < inner; ++t) s += arow[t] * brow[t];
        c(i, j) = s;
      }
    }
  });
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw UsageError("matmul_tn: dimension mismatch " + shape_string(a) + "^T x " +
                     shape_string(b));
  }
  Matrix c(a.cols(), b.cols());
  const std::size_t inner = a.rows();
  const std::size_t p = b.cols();
  parallel_for(a.cols(), inner * p, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double* out = c.row(i).data();
      for (std::size_t t = 0; t < inner; ++t) {
        const double av = a(t, i);
        if (av == 0.0) continue;
        const double* brow = b.row(t).data();
        for (std::size_t j = 0; j < p; ++j) out[j] += av * brow[j];
      }
    }
  });
  return c;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

void add_inplace(Matrix& dst, const Matrix& src) {
  if (dst.rows() != src.rows() || dst.cols() != src.cols()) {
    throw UsageError("add: shape mismatch " + shape_string(dst) + " vs " + shape_string(src));
  }
  auto d = dst.values();
  auto s = src.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

Matrix row_matrix(std::span<const double> x) {
  return Matrix(1, x.size(), std::vector<double>(x.begin(), x.end()));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace pgjr
