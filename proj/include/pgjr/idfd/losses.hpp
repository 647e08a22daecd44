#pragma once

#include <cstddef>
#include <span>

#include "pgjr/idfd/memory_bank.hpp"

namespace pgjr {

/// Sum adds the per-term losses. Mean divides the instance term by the
/// batch size and the decorrelation term by the feature dimension.
enum class LossReduction { Sum, Mean };

struct LossValue {
  double loss = 0.0;
  Matrix grad;  // dloss/dbatch, same shape as the batch
};

/// Instance discrimination against the memory bank. For a sample with
/// dataset index i and representation v, p_j = softmax_j(bank_j·v / tau1)
/// over all n entries and the term is -log p_i. Bank entries are constants.
/// Throws UsageError on duplicate or out-of-range indices.
LossValue instance_loss(const Matrix& batch, std::span<const std::size_t> indices,
                        const MemoryBank& bank, double tau1,
                        LossReduction reduction = LossReduction::Sum);

/// Feature decorrelation. Column l of the batch, normalised over the batch,
/// is f_l; q_lm = softmax_m(f_m·f_l / tau2) and the loss is -sum_l log q_ll.
/// Throws NumericalError("dead dimension") for a column of norm < 1e-12.
LossValue decorrelation_loss(const Matrix& batch, double tau2,
                             LossReduction reduction = LossReduction::Sum);

struct LossBreakdown {
  double instance = 0.0;
  double decorrelation = 0.0;
  double total = 0.0;
};

struct TotalLoss {
  LossBreakdown breakdown;
  Matrix grad;
};

TotalLoss total_loss(const Matrix& batch, std::span<const std::size_t> indices,
                     const MemoryBank& bank, double tau1 = 1.0, double tau2 = 2.0,
                     LossReduction reduction = LossReduction::Sum);

}  // namespace pgjr
