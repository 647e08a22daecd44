#pragma once

#include <cstddef>
#include <span>

#include "pgjr/numerics/matrix.hpp"

namespace pgjr {

/// One unit-norm vector per dataset instance, refreshed by momentum.
class MemoryBank {
 public:
  MemoryBank() = default;

  /// Stores the L2-normalised rows of features. Throws NumericalError on a
  /// degenerate row and UsageError when features is empty or momentum is
  /// outside [0, 1].
  static MemoryBank init(const Matrix& features, double momentum = 0.5);
  /// Adopts entries verbatim; used when restoring a checkpoint.
  static MemoryBank from_entries(Matrix entries, double momentum);

  /// entry_i <- normalize(momentum * entry_i + (1 - momentum) * v_i).
  void update(std::span<const std::size_t> indices, const Matrix& batch);

  const Matrix& entries() const { return entries_; }
  double momentum() const { return momentum_; }
  std::size_t size() const { return entries_.rows(); }
  std::size_t dim() const { return entries_.cols(); }

 private:
  Matrix entries_;
  double momentum_ = 0.5;
};

}  // namespace pgjr
