#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pgjr/numerics/layers.hpp"

namespace pgjr {

/// Feature layout for the grid jigsaw transform: the input splits into
/// `blocks` blocks, each holding `rows` rows of `width` contiguous entries.
struct GjrGeometry {
  std::size_t blocks = 1;
  std::size_t rows = 2;
  std::size_t width = 1;

  std::size_t n_in() const { return blocks * rows * width; }

  /// Width is derived as n_in / (blocks * rows); throws UsageError when that
  /// is not an integer or the geometry is invalid.
  static GjrGeometry for_input(std::size_t n_in, std::size_t blocks, std::size_t rows);
  /// Throws UsageError unless blocks >= 1, rows >= 2 and width >= 1.
  void validate() const;

  bool operator==(const GjrGeometry&) const = default;
};

/// One w x w regressor per row position, shared by all blocks.
struct GjrParams {
  std::vector<AffineParams> row_regressors;

  GjrParams() = default;
  explicit GjrParams(const GjrGeometry& geo);
};

/// blocks[i][j] is row j of block i.
using GridBlocks = std::vector<std::vector<Vector>>;

GridBlocks grid_partition(std::span<const double> x, const GjrGeometry& geo);
Vector flatten(const GridBlocks& blocks);

/// Activations kept by the forward pass for the backward pass. For row
/// position j, leave_one_out[j] and pre_activation[j] have one row per
/// (sample, block) pair, indexed sample * blocks + block.
struct GjrCache {
  std::vector<Matrix> leave_one_out;
  std::vector<Matrix> pre_activation;
  std::size_t samples = 0;
};

/// Batched transform, one sample per row of x. Each output row j of block i
/// is ReLU(W_j · (sum of the block's other rows) + b_j), written back at the
/// position of the input row.
Matrix gjr_forward(const Matrix& x, const GjrParams& params, const GjrGeometry& geo,
                   GjrCache* cache = nullptr);

/// Accumulates regressor gradients. Returns dL/dx when want_input_grad; every
/// input row feeds the leave-one-out sum of each sibling row in its block.
Matrix gjr_backward(const GjrCache& cache, GjrParams& params, const GjrGeometry& geo,
                    const Matrix& upstream, bool want_input_grad = true);

Vector gjr_forward(std::span<const double> x, const GjrParams& params, const GjrGeometry& geo);
Vector gjr_backward(std::span<const double> x, GjrParams& params, const GjrGeometry& geo,
                    std::span<const double> upstream);

}  // namespace pgjr
