#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pgjr/numerics/matrix.hpp"

namespace pgjr {

struct MetricReport {
  double acc = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
  double silhouette = 0.0;
};

/// Minimum-cost perfect matching on a square cost matrix; result[row] is the
/// column assigned to row.
std::vector<std::size_t> hungarian(const std::vector<std::vector<long long>>& cost);

/// Contingency counts with dense row ids for pred and column ids for truth.
std::vector<std::vector<long long>> contingency(std::span<const int> pred,
                                                std::span<const int> truth);

/// Fraction of samples matched under the best one-to-one cluster-to-class
/// mapping.
double acc(std::span<const int> pred, std::span<const int> truth);

/// I(pred; truth) / sqrt(H(pred) H(truth)), natural logs. 1 when both
/// partitions have a single cluster, 0 when exactly one does.
double nmi(std::span<const int> pred, std::span<const int> truth);

double ari(std::span<const int> pred, std::span<const int> truth);

/// Mean silhouette with Euclidean distance. Singleton clusters score 0.
/// Throws UsageError for fewer than two clusters.
double silhouette(const Matrix& x, std::span<const int> labels);

}  // namespace pgjr
