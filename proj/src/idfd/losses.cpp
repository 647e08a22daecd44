#include "pgjr/idfd/losses.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pgjr/error.hpp"
#include "pgjr/numerics/layers.hpp"

namespace pgjr {

namespace {

// Replaces each row of logits by its softmax and returns the per-row
// log-sum-exp. Subtracts the row max first.
Vector softmax_rows(Matrix& logits) {
  Vector lse(logits.rows());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      sum += v;
    }
    for (double& v : row) v /= sum;
    lse[r] = mx + std::log(sum);
  }
  return lse;
}

void check_indices(std::span<const std::size_t> indices, std::size_t n) {
  std::vector<std::size_t> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw UsageError("instance_loss: duplicate index in batch");
  if (!sorted.empty() && sorted.back() >= n)
    throw UsageError("instance_loss: index " + std::to_string(sorted.back()) +
                     " out of range for bank of " + std::to_string(n));
}

}  // namespace

LossValue instance_loss(const Matrix& batch, std::span<const std::size_t> indices,
                        const MemoryBank& bank, double tau1, LossReduction reduction) {
  if (batch.rows() != indices.size() || batch.cols() != bank.dim()) {
    throw UsageError("instance_loss: batch " + shape_string(batch) + " with " +
                     std::to_string(indices.size()) + " indices against bank " +
                     shape_string(bank.entries()));
  }
  if (!(tau1 > 0.0)) throw UsageError("instance_loss: tau1 must be positive");
  check_indices(indices, bank.size());

  const Matrix& entries = bank.entries();
  Matrix probs = matmul_nt(batch, entries);
  for (double& v : probs.values()) v /= tau1;
  std::vector<double> target(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) target[r] = probs(r, indices[r]);
  const Vector lse = softmax_rows(probs);

  LossValue out;
  for (std::size_t r = 0; r < indices.size(); ++r) out.loss += lse[r] - target[r];

  // dloss/dv = (sum_j p_j bank_j - bank_i) / tau1
  for (std::size_t r = 0; r < indices.size(); ++r) probs(r, indices[r]) -= 1.0;
  out.grad = matmul(probs, entries);
  const double scale =
      reduction == LossReduction::Mean ? 1.0 / (tau1 * static_cast<double>(batch.rows()))
                                       : 1.0 / tau1;
  for (double& g : out.grad.values()) g *= scale;
  if (reduction == LossReduction::Mean) out.loss /= static_cast<double>(batch.rows());
  return out;
}

LossValue decorrelation_loss(const Matrix& batch, double tau2, LossReduction reduction) {
  if (batch.rows() < 2)
    throw UsageError("decorrelation_loss: need at least 2 samples, got " +
                     std::to_string(batch.rows()));
  if (!(tau2 > 0.0)) throw UsageError("decorrelation_loss: tau2 must be positive");

  const std::size_t d = batch.cols();
  const Matrix features = transpose(batch);  // d x b, row l is f_l
  Matrix unit(features.rows(), features.cols());
  Vector norms(d);
  for (std::size_t l = 0; l < d; ++l) {
    norms[l] = norm2(features.row(l));
    if (!(norms[l] >= kDegenerateNorm))
      throw NumericalError("decorrelation_loss: dead dimension " + std::to_string(l));
    for (std::size_t c = 0; c < features.cols(); ++c) unit(l, c) = features(l, c) / norms[l];
  }

  Matrix q = matmul_nt(unit, unit);
  for (double& v : q.values()) v /= tau2;
  Vector diag(d);
  for (std::size_t l = 0; l < d; ++l) diag[l] = q(l, l);
  const Vector lse = softmax_rows(q);

  LossValue out;
  for (std::size_t l = 0; l < d; ++l) out.loss += lse[l] - diag[l];

  // With D = Q - I, dL/dF̂ = (D + Dᵀ) F̂ / tau2.
  for (std::size_t l = 0; l < d; ++l) q(l, l) -= 1.0;
  Matrix sym(d, d);
  for (std::size_t l = 0; l < d; ++l)
    for (std::size_t m = 0; m < d; ++m) sym(l, m) = (q(l, m) + q(m, l)) / tau2;
  const Matrix g_unit = matmul(sym, unit);

  const double scale = reduction == LossReduction::Mean ? 1.0 / static_cast<double>(d) : 1.0;
  out.grad = Matrix(batch.rows(), d);
  for (std::size_t l = 0; l < d; ++l) {
    const Vector g = l2_normalize_backward(features.row(l), g_unit.row(l));
    for (std::size_t c = 0; c < g.size(); ++c) out.grad(c, l) = g[c] * scale;
  }
  out.loss *= scale;
  return out;
}

TotalLoss total_loss(const Matrix& batch, std::span<const std::size_t> indices,
                     const MemoryBank& bank, double tau1, double tau2, LossReduction reduction) {
  LossValue inst = instance_loss(batch, indices, bank, tau1, reduction);
  LossValue dec = decorrelation_loss(batch, tau2, reduction);
  TotalLoss out;
  out.breakdown.instance = inst.loss;
  out.breakdown.decorrelation = dec.loss;
  out.breakdown.total = inst.loss + dec.loss;
  out.grad = std::move(inst.grad);
  add_inplace(out.grad, dec.grad);
  return out;
}

}  // namespace pgjr
