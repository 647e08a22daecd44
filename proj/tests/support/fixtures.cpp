#include "fixtures.hpp"

#include <cmath>
#include <limits>

#include "pgjr/numerics/rng.hpp"

namespace pgjr::testing {

EmbeddingSet gaussian_blobs(const BlobSpec& blobs) {
  EmbeddingSet set;
  set.n = blobs.per_cluster * blobs.clusters;
  set.views = blobs.views;
  set.dim = blobs.dim;
  set.source_tag = "synthetic-blobs";
  set.labels.resize(set.n);
  set.data.resize(set.n * set.views * set.dim);
  Rng rng(blobs.seed, RngStream::Synthetic);
  const double offset = blobs.separation * blobs.sigma / std::sqrt(2.0);
  for (std::size_t s = 0; s < set.n; ++s) {
    const std::size_t c = s % blobs.clusters;
    set.labels[s] = static_cast<std::int32_t>(c);
    for (std::size_t a = 0; a < set.views; ++a) {
      float* out = set.data.data() + (s * set.views + a) * set.dim;
      for (std::size_t t = 0; t < set.dim; ++t) {
        const double centre = (t == c % blobs.dim) ? offset : 0.0;
        out[t] = static_cast<float>(centre + blobs.sigma * rng.normal());
      }
    }
  }
  return set;
}

Matrix twelve_points() {
  return {{0.0, 0.0},   {0.3, 0.1},   {0.1, 0.4},   {0.35, 0.3},  //
          {10.0, 0.0},  {10.2, 0.3},  {9.8, 0.2},   {10.1, -0.2},  //
          {5.0, 9.0},   {5.3, 9.2},   {4.9, 8.7},   {5.1, 9.35}};
}

std::vector<int> twelve_point_labels() { return {0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2}; }

namespace {

double partition_cost(const Matrix& x, const std::vector<int>& assign, std::size_t k) {
  const std::size_t d = x.cols();
  std::vector<double> sum(k * d, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    ++count[assign[i]];
    for (std::size_t t = 0; t < d; ++t) sum[assign[i] * d + t] += x(i, t);
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const std::size_t c = assign[i];
    for (std::size_t t = 0; t < d; ++t) {
      const double diff = x(i, t) - sum[c * d + t] / static_cast<double>(count[c]);
      cost += diff * diff;
    }
  }
  return cost;
}

}  // namespace

double brute_force_inertia(const Matrix& x, std::size_t k) {
  const std::size_t n = x.rows();
  std::vector<int> assign(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    best = std::min(best, partition_cost(x, assign, k));
    std::size_t i = 0;
    while (i < n && assign[i] == static_cast<int>(k) - 1) assign[i++] = 0;
    if (i == n) break;
    ++assign[i];
  }
  return best;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo,
                     double hi) {
  Rng rng(seed, 99);
  Matrix m(rows, cols);
  for (auto& v : m.values()) v = rng.uniform(lo, hi);
  return m;
}

}  // namespace pgjr::testing
