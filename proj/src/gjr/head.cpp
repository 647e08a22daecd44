#include "pgjr/gjr/head.hpp"

#include "pgjr/error.hpp"
#include "pgjr/numerics/rng.hpp"

namespace pgjr {

std::vector<AffineParams*> PgjrHead::trainable() {
  std::vector<AffineParams*> out{&projection};
  if (kind == HeadKind::Pgjr && !gjr_frozen)
    for (auto& r : gjr.row_regressors) out.push_back(&r);
  return out;
}

std::vector<const AffineParams*> PgjrHead::all_params() const {
  std::vector<const AffineParams*> out{&projection};
  for (const auto& r : gjr.row_regressors) out.push_back(&r);
  return out;
}

PgjrHead make_head(const HeadInit& init, Rng& projection_rng, Rng& gjr_rng) {
  if (init.n_in == 0 || init.n_out == 0) throw UsageError("head: dimensions must be positive");
  PgjrHead head;
  head.kind = init.kind;
  head.projection = AffineParams(init.n_out, init.n_in);
  head.projection.init_fan_in(projection_rng);
  if (init.kind == HeadKind::Pgjr) {
    head.geometry = GjrGeometry::for_input(init.n_in, init.blocks, init.rows);
    head.gjr = GjrParams(head.geometry);
    if (init.gjr_init == GjrInit::FanIn)
      for (auto& r : head.gjr.row_regressors) r.init_fan_in(gjr_rng);
    head.gjr_frozen = init.freeze_gjr;
  }
  return head;
}

Matrix head_forward(const PgjrHead& head, const Matrix& x, HeadCache* cache) {
  if (x.cols() != head.n_in()) {
    throw UsageError("head_forward: input " + shape_string(x) + " but head expects " +
                     std::to_string(head.n_in()) + " features");
  }
  if (head.kind == HeadKind::Linear) {
    if (cache) cache->input = x;
    return affine_forward(head.projection, x);
  }
  GjrCache gjr_cache;
  Matrix gjr_out = gjr_forward(x, head.gjr, head.geometry, cache ? &gjr_cache : nullptr);
  // Outer ReLU; idempotent on the rectified branch output.
  Matrix residual = relu(gjr_out);
  {
    auto r = residual.values();
    auto in = x.values();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = in[i] + r[i];
  }
  Matrix y = affine_forward(head.projection, residual);
  if (cache) {
    cache->input = x;
    cache->gjr = std::move(gjr_cache);
    cache->gjr_out = std::move(gjr_out);
    cache->residual = std::move(residual);
  }
  return y;
}

Matrix head_backward(PgjrHead& head, const HeadCache& cache, const Matrix& upstream,
                     bool want_input_grad) {
  if (upstream.cols() != head.n_out()) {
    throw UsageError("head_backward: upstream " + shape_string(upstream) + " but head outputs " +
                     std::to_string(head.n_out()));
  }
  if (head.kind == HeadKind::Linear)
    return affine_backward(head.projection, cache.input, upstream, want_input_grad);

  const bool branch_needed = want_input_grad || !head.gjr_frozen;
  Matrix g_residual = affine_backward(head.projection, cache.residual, upstream, branch_needed);
  if (!branch_needed) return {};

  Matrix g_branch = relu_backward(cache.gjr_out, g_residual);
  Matrix dx;
  if (head.gjr_frozen) {
    // Gradients into frozen regressors are discarded.
    GjrParams scratch = head.gjr;
    dx = gjr_backward(cache.gjr, scratch, head.geometry, g_branch, want_input_grad);
  } else {
    dx = gjr_backward(cache.gjr, head.gjr, head.geometry, g_branch, want_input_grad);
  }
  if (!want_input_grad) return {};
  add_inplace(dx, g_residual);
  return dx;
}

Vector pgjr_forward(std::span<const double> x, const PgjrHead& head) {
  const Matrix out = head_forward(head, row_matrix(x));
  auto y = out.values();
  return {y.begin(), y.end()};
}

Vector pgjr_backward(std::span<const double> x, PgjrHead& head, std::span<const double> upstream) {
  HeadCache cache;
  head_forward(head, row_matrix(x), &cache);
  const Matrix out = head_backward(head, cache, row_matrix(upstream));
  auto g = out.values();
  return {g.begin(), g.end()};
}

}  // namespace pgjr
