#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pgjr/numerics/matrix.hpp"
#include "pgjr/pipeline/embeddings.hpp"

namespace pgjr::testing {

struct BlobSpec {
  std::size_t per_cluster = 100;
  std::size_t clusters = 3;
  std::size_t dim = 32;
  double sigma = 1.0;
  // Distance between every pair of centres, in units of sigma.
  double separation = 10.0;
  std::size_t views = 1;
  std::uint64_t seed = 0;
};

// Isotropic Gaussian clusters centred at (separation*sigma/sqrt 2) * e_c, so
// every pair of centres is exactly separation*sigma apart. Samples are
// interleaved by cluster and labelled with their cluster id.
EmbeddingSet gaussian_blobs(const BlobSpec& blobs);

// Twelve 2-D points in three tight, well-separated blobs of four.
Matrix twelve_points();
std::vector<int> twelve_point_labels();

// Minimum inertia over every assignment of x's rows to k clusters, with
// empty clusters allowed. Each cluster costs its sum of squared distances
// to its own mean.
double brute_force_inertia(const Matrix& x, std::size_t k);

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo = -1.0,
                     double hi = 1.0);

}  // namespace pgjr::testing
