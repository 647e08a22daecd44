#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pgjr/numerics/matrix.hpp"

namespace pgjr {

class Rng;

struct KmeansOptions {
  std::size_t k = 2;
  std::size_t restarts = 20;
  std::size_t max_iter = 300;
  double tol = 1e-6;
};

struct ClusterResult {
  std::vector<int> assignments;
  Matrix centroids;  // [k x d]
  double inertia = 0.0;
  std::size_t restarts_run = 0;
  std::size_t best_restart = 0;
  /// Inertia after every assignment step of the winning restart.
  std::vector<double> inertia_trace;
  std::size_t iterations = 0;
};

/// k-means++ seeding: first centre uniform, later centres drawn with
/// probability proportional to squared distance to the nearest chosen centre
/// (uniform when every distance is zero).
Matrix kmeans_plus_plus(const Matrix& x, std::size_t k, Rng& rng);

/// Lloyd iterations from the given centroids until the largest centroid
/// shift drops below tol or max_iter is reached. An empty cluster takes the
/// member of the largest cluster farthest from its centroid.
ClusterResult lloyd(const Matrix& x, Matrix centroids, std::size_t max_iter, double tol);

/// Best (lowest inertia, then lowest restart index) of opts.restarts runs.
/// Restart r seeds from its own stream derived from (seed, r), so the result
/// does not depend on how restarts are scheduled. Throws UsageError when
/// n < k or k == 0.
ClusterResult kmeans(const Matrix& x, const KmeansOptions& opts, std::uint64_t seed);

}  // namespace pgjr
