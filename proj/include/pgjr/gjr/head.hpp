#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pgjr/gjr/gjr.hpp"

namespace pgjr {

class Rng;

enum class HeadKind {
  /// projection(x + ReLU(gjr(x)))
  Pgjr,
  /// projection(x) only; the tuned linear baseline.
  Linear,
};

enum class GjrInit { FanIn, Zero };

/// Trainable head mapping a frozen embedding to the clustering representation.
struct PgjrHead {
  HeadKind kind = HeadKind::Pgjr;
  GjrGeometry geometry;
  GjrParams gjr;
  AffineParams projection;  // [n_out x n_in]
  bool gjr_frozen = false;

  std::size_t n_in() const { return projection.in_dim(); }
  std::size_t n_out() const { return projection.out_dim(); }

  /// Parameter tensors the optimizer updates, in a fixed order: projection
  /// first, then the row regressors unless the branch is frozen or absent.
  std::vector<AffineParams*> trainable();
  std::vector<const AffineParams*> all_params() const;
};

struct HeadInit {
  HeadKind kind = HeadKind::Pgjr;
  std::size_t n_in = 768;
  std::size_t n_out = 128;
  std::size_t blocks = 8;
  std::size_t rows = 4;
  GjrInit gjr_init = GjrInit::FanIn;
  bool freeze_gjr = false;
};

/// Projection weights come from projection_rng, regressor weights from
/// gjr_rng.
PgjrHead make_head(const HeadInit& init, Rng& projection_rng, Rng& gjr_rng);

struct HeadCache {
  Matrix input;
  GjrCache gjr;
  Matrix gjr_out;   // x*, already >= 0
  Matrix residual;  // x + ReLU(x*)
};

/// Rows of x are samples. Returns the pre-normalisation representation.
Matrix head_forward(const PgjrHead& head, const Matrix& x, HeadCache* cache = nullptr);

/// Chain rule through projection, residual add, outer ReLU and the GJR
/// branch. Accumulates head gradients (GJR gradients only when not frozen).
/// Returns dL/dx when want_input_grad.
Matrix head_backward(PgjrHead& head, const HeadCache& cache, const Matrix& upstream,
                     bool want_input_grad = true);

Vector pgjr_forward(std::span<const double> x, const PgjrHead& head);
Vector pgjr_backward(std::span<const double> x, PgjrHead& head, std::span<const double> upstream);

}  // namespace pgjr
