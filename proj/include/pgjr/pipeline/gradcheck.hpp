#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pgjr {

struct GradcheckOptions {
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  double step = 1e-5;
  double threshold = 1e-4;
  /// Name of a component whose analytic gradient is negated before
  /// comparison. Used as a negative control.
  std::string break_component;
};

struct GradcheckRow {
  std::string component;
  std::size_t trials = 0;
  double max_rel_error = 0.0;
  bool passed = false;
};

struct GradcheckReport {
  std::vector<GradcheckRow> rows;
  double seconds = 0.0;
  bool passed() const;
  std::string table() const;
};

/// Components: affine, relu, l2_normalize, gjr, pgjr_head, instance_loss,
/// decorrelation_loss, total_loss.
std::vector<std::string> gradcheck_components();

/// Finite-difference suite over small random instances of every component.
GradcheckReport run_gradcheck(const GradcheckOptions& opts = {});

}  // namespace pgjr
