#pragma once

#include <span>
#include <vector>

#include "pgjr/numerics/layers.hpp"

namespace pgjr {

/// Momentum buffer for one AffineParams.
struct MomentumBuffer {
  Matrix weight;
  Vector bias;

  bool operator==(const MomentumBuffer&) const = default;
};

struct SgdState {
  std::vector<MomentumBuffer> buffers;
  double lr = 0.0;
  double momentum = 0.9;
  double weight_decay = 5e-4;

  SgdState() = default;
  SgdState(std::span<AffineParams* const> params, double lr, double momentum,
           double weight_decay);
};

/// buf = momentum*buf + grad + weight_decay*param; param -= lr*buf; grads
/// are zeroed afterwards. Throws UsageError when buffers do not mirror the
/// parameter shapes.
void sgd_step(std::span<AffineParams* const> params, SgdState& state);

}  // namespace pgjr
