#include "pgjr/idfd/memory_bank.hpp"

#include <algorithm>

#include "pgjr/error.hpp"
#include "pgjr/numerics/layers.hpp"

namespace pgjr {

MemoryBank MemoryBank::init(const Matrix& features, double momentum) {
  if (features.rows() == 0 || features.cols() == 0)
    throw UsageError("memory bank: need at least one feature row");
  return from_entries(normalize_rows(features), momentum);
}

MemoryBank MemoryBank::from_entries(Matrix entries, double momentum) {
  if (!(momentum >= 0.0 && momentum <= 1.0))
    throw UsageError("memory bank: momentum must lie in [0, 1]");
  MemoryBank bank;
  bank.entries_ = std::move(entries);
  bank.momentum_ = momentum;
  return bank;
}

void MemoryBank::update(std::span<const std::size_t> indices, const Matrix& batch) {
  if (batch.rows() != indices.size() || batch.cols() != dim()) {
    throw UsageError("memory bank update: batch " + shape_string(batch) + " for " +
                     std::to_string(indices.size()) + " indices into bank " +
                     shape_string(entries_));
  }
  Vector mixed(dim());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const std::size_t i = indices[r];
    if (i >= size()) throw UsageError("memory bank update: index out of range");
    auto entry = entries_.row(i);
    auto v = batch.row(r);
    for (std::size_t c = 0; c < mixed.size(); ++c)
      mixed[c] = momentum_ * entry[c] + (1.0 - momentum_) * v[c];
    const Vector unit = l2_normalize(mixed);
    std::copy(unit.begin(), unit.end(), entry.begin());
  }
}

}  // namespace pgjr
