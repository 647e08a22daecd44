#include "pgjr/numerics/sgd.hpp"

#include <algorithm>

#include "pgjr/error.hpp"

namespace pgjr {

SgdState::SgdState(std::span<AffineParams* const> params, double lr_, double momentum_,
                   double weight_decay_)
    : lr(lr_), momentum(momentum_), weight_decay(weight_decay_) {
  buffers.reserve(params.size());
  for (const AffineParams* p : params) {
    buffers.push_back({Matrix(p->weight.rows(), p->weight.cols()), Vector(p->bias.size(), 0.0)});
  }
}

namespace {

void update(std::span<double> param, std::span<double> grad, std::span<double> buf,
            const SgdState& s) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    buf[i] = s.momentum * buf[i] + grad[i] + s.weight_decay * param[i];
    param[i] -= s.lr * buf[i];
    grad[i] = 0.0;
  }
}

}  // namespace

void sgd_step(std::span<AffineParams* const> params, SgdState& state) {
  if (params.size() != state.buffers.size()) {
    throw UsageError("sgd_step: " + std::to_string(params.size()) + " parameter tensors but " +
                     std::to_string(state.buffers.size()) + " momentum buffers");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    AffineParams& p = *params[k];
    MomentumBuffer& b = state.buffers[k];
    if (b.weight.rows() != p.weight.rows() || b.weight.cols() != p.weight.cols() ||
        b.bias.size() != p.bias.size()) {
      throw UsageError("sgd_step: momentum buffer shape mismatch for tensor " + std::to_string(k));
    }
    update(p.weight.values(), p.grad_weight.values(), b.weight.values(), state);
    update(p.bias, p.grad_bias, b.bias, state);
  }
}

}  // namespace pgjr
