#include "pgjr/gjr/gjr.hpp"

#include "pgjr/error.hpp"

namespace pgjr {

GjrGeometry GjrGeometry::for_input(std::size_t n_in, std::size_t blocks, std::size_t rows) {
  if (blocks == 0 || rows == 0 || n_in % (blocks * rows) != 0) {
    throw UsageError("gjr geometry: input dim " + std::to_string(n_in) +
                     " is not divisible by blocks*rows = " + std::to_string(blocks) + "*" +
                     std::to_string(rows));
  }
  GjrGeometry geo{blocks, rows, n_in / (blocks * rows)};
  geo.validate();
  return geo;
}

void GjrGeometry::validate() const {
  if (blocks < 1) throw UsageError("gjr geometry: need at least one block");
  if (rows < 2) throw UsageError("gjr geometry: need at least two rows per block");
  if (width < 1) throw UsageError("gjr geometry: row width must be positive");
}

GjrParams::GjrParams(const GjrGeometry& geo) {
  geo.validate();
  row_regressors.assign(geo.rows, AffineParams(geo.width, geo.width));
}

namespace {

void check_params(const GjrParams& params, const GjrGeometry& geo) {
  geo.validate();
  if (params.row_regressors.size() != geo.rows) {
    throw UsageError("gjr: expected " + std::to_string(geo.rows) + " row regressors, got " +
                     std::to_string(params.row_regressors.size()));
  }
  for (const auto& r : params.row_regressors) {
    if (r.in_dim() != geo.width || r.out_dim() != geo.width) {
      throw UsageError("gjr: row regressor " + shape_string(r.weight) + " does not match width " +
                       std::to_string(geo.width));
    }
  }
}

void check_input(std::size_t len, const GjrGeometry& geo, const char* what) {
  if (len != geo.n_in()) {
    throw UsageError(std::string(what) + ": input length " + std::to_string(len) +
                     " does not match geometry " + std::to_string(geo.blocks) + "x" +
                     std::to_string(geo.rows) + "x" + std::to_string(geo.width));
  }
}

std::size_t offset(const GjrGeometry& geo, std::size_t block, std::size_t row) {
  return (block * geo.rows + row) * geo.width;
}

}  // namespace

GridBlocks grid_partition(std::span<const double> x, const GjrGeometry& geo) {
  geo.validate();
  check_input(x.size(), geo, "grid_partition");
  GridBlocks blocks(geo.blocks, std::vector<Vector>(geo.rows));
  for (std::size_t i = 0; i < geo.blocks; ++i) {
    for (std::size_t j = 0; j < geo.rows; ++j) {
      auto start = x.begin() + static_cast<std::ptrdiff_t>(offset(geo, i, j));
      blocks[i][j].assign(start, start + static_cast<std::ptrdiff_t>(geo.width));
    }
  }
  return blocks;
}

Vector flatten(const GridBlocks& blocks) {
  Vector out;
  for (const auto& block : blocks)
    for (const auto& row : block) out.insert(out.end(), row.begin(), row.end());
  return out;
}

Matrix gjr_forward(const Matrix& x, const GjrParams& params, const GjrGeometry& geo,
                   GjrCache* cache) {
  check_params(params, geo);
  check_input(x.cols(), geo, "gjr_forward");
  const std::size_t n = x.rows();
  const std::size_t m = geo.blocks;
  const std::size_t l = geo.rows;
  const std::size_t w = geo.width;

  // Block sums, one row per (sample, block).
  Matrix block_sum(n * m, w);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < m; ++i) {
      auto sum = block_sum.row(s * m + i);
      for (std::size_t j = 0; j < l; ++j) {
        const double* src = x.row(s).data() + offset(geo, i, j);
        for (std::size_t c = 0; c < w; ++c) sum[c] += src[c];
      }
    }
  }

  GjrCache local;
  GjrCache& out_cache = cache ? *cache : local;
  out_cache.samples = n;
  out_cache.leave_one_out.assign(l, Matrix());
  out_cache.pre_activation.assign(l, Matrix());

  Matrix y(n, x.cols());
  for (std::size_t j = 0; j < l; ++j) {
    Matrix loo(n * m, w);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t i = 0; i < m; ++i) {
        const double* src = x.row(s).data() + offset(geo, i, j);
        auto sum = block_sum.row(s * m + i);
        auto dst = loo.row(s * m + i);
        for (std::size_t c = 0; c < w; ++c) dst[c] = sum[c] - src[c];
      }
    }
    Matrix pre = affine_forward(params.row_regressors[j], loo);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t i = 0; i < m; ++i) {
        double* dst = y.row(s).data() + offset(geo, i, j);
        auto p = pre.row(s * m + i);
        for (std::size_t c = 0; c < w; ++c) dst[c] = p[c] > 0.0 ? p[c] : 0.0;
      }
    }
    out_cache.leave_one_out[j] = std::move(loo);
    out_cache.pre_activation[j] = std::move(pre);
  }
  return y;
}

Matrix gjr_backward(const GjrCache& cache, GjrParams& params, const GjrGeometry& geo,
                    const Matrix& upstream, bool want_input_grad) {
  check_params(params, geo);
  check_input(upstream.cols(), geo, "gjr_backward");
  const std::size_t n = cache.samples;
  if (upstream.rows() != n || cache.pre_activation.size() != geo.rows) {
    throw UsageError("gjr_backward: cache does not match upstream " + shape_string(upstream));
  }
  const std::size_t m = geo.blocks;
  const std::size_t l = geo.rows;
  const std::size_t w = geo.width;

  // grad_sum accumulates, per (sample, block), the gradient reaching every
  // leave-one-out sum; input row j then receives that total minus its own.
  Matrix grad_sum(n * m, w);
  std::vector<Matrix> grad_loo(want_input_grad ? l : 0);

  for (std::size_t j = 0; j < l; ++j) {
    const Matrix& pre = cache.pre_activation[j];
    Matrix g_pre(n * m, w);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t i = 0; i < m; ++i) {
        const double* up = upstream.row(s).data() + offset(geo, i, j);
        auto p = pre.row(s * m + i);
        auto g = g_pre.row(s * m + i);
        for (std::size_t c = 0; c < w; ++c) g[c] = p[c] > 0.0 ? up[c] : 0.0;
      }
    }
    Matrix g_loo = affine_backward(params.row_regressors[j], cache.leave_one_out[j], g_pre,
                                   want_input_grad);
    if (want_input_grad) {
      add_inplace(grad_sum, g_loo);
      grad_loo[j] = std::move(g_loo);
    }
  }
  if (!want_input_grad) return {};

  Matrix dx(n, geo.n_in());
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < m; ++i) {
      auto total = grad_sum.row(s * m + i);
      for (std::size_t j = 0; j < l; ++j) {
        auto own = grad_loo[j].row(s * m + i);
        double* dst = dx.row(s).data() + offset(geo, i, j);
        for (std::size_t c = 0; c < w; ++c) dst[c] = total[c] - own[c];
      }
    }
  }
  return dx;
}

Vector gjr_forward(std::span<const double> x, const GjrParams& params, const GjrGeometry& geo) {
  const Matrix out = gjr_forward(row_matrix(x), params, geo);
  auto y = out.values();
  return {y.begin(), y.end()};
}

Vector gjr_backward(std::span<const double> x, GjrParams& params, const GjrGeometry& geo,
                    std::span<const double> upstream) {
  GjrCache cache;
  gjr_forward(row_matrix(x), params, geo, &cache);
  const Matrix out = gjr_backward(cache, params, geo, row_matrix(upstream));
  auto g = out.values();
  return {g.begin(), g.end()};
}

}  // namespace pgjr
