#include "pgjr/cluster/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pgjr/error.hpp"
#include "pgjr/numerics/parallel.hpp"
#include "pgjr/numerics/rng.hpp"

namespace pgjr {

namespace {

void copy_row(std::span<const double> src, std::span<double> dst) {
  std::copy(src.begin(), src.end(), dst.begin());
}

// Nearest centroid per point (lowest index on ties); returns the inertia.
double assign(const Matrix& x, const Matrix& centroids, std::vector<int>& labels,
              std::vector<double>& dist) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
      const double d = squared_distance(x.row(i), centroids.row(c));
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    labels[i] = arg;
    dist[i] = best;
    inertia += best;
  }
  return inertia;
}

void repair_empty(const Matrix& x, Matrix& centroids, std::vector<int>& labels,
                  std::vector<double>& dist) {
  const std::size_t k = centroids.rows();
  std::vector<std::size_t> counts(k, 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  for (std::size_t empty = 0; empty < k; ++empty) {
    if (counts[empty] != 0) continue;
    const auto largest = static_cast<std::size_t>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (static_cast<std::size_t>(labels[i]) == largest && dist[i] > far_d) {
        far_d = dist[i];
        far = i;
      }
    }
    labels[far] = static_cast<int>(empty);
    dist[far] = 0.0;
    --counts[largest];
    ++counts[empty];
    copy_row(x.row(far), centroids.row(empty));
  }
}

}  // namespace

Matrix kmeans_plus_plus(const Matrix& x, std::size_t k, Rng& rng) {
  const std::size_t n = x.rows();
  if (k == 0 || n < k)
    throw UsageError("kmeans: need n >= k >= 1, got n=" + std::to_string(n) +
                     " k=" + std::to_string(k));
  Matrix centroids(k, x.cols());
  std::size_t first = rng.below(n);
  copy_row(x.row(first), centroids.row(0));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(x.row(i), centroids.row(0));

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (target < acc) {
          pick = i;
          break;
        }
      }
      // Guard against landing on a zero-weight tail after rounding.
      while (d2[pick] == 0.0 && pick > 0) --pick;
    } else {
      pick = rng.below(n);
    }
    copy_row(x.row(pick), centroids.row(c));
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], squared_distance(x.row(i), centroids.row(c)));
  }
  return centroids;
}

ClusterResult lloyd(const Matrix& x, Matrix centroids, std::size_t max_iter, double tol) {
  if (centroids.cols() != x.cols())
    throw UsageError("lloyd: centroid dim does not match data " + shape_string(x));
  const std::size_t n = x.rows();
  const std::size_t k = centroids.rows();
  ClusterResult out;
  std::vector<int> labels(n, 0);
  std::vector<double> dist(n, 0.0);

  for (std::size_t it = 0; it < max_iter; ++it) {
    out.inertia_trace.push_back(assign(x, centroids, labels, dist));
    repair_empty(x, centroids, labels, dist);

    Matrix next(k, x.cols());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      ++counts[c];
      auto dst = next.row(c);
      auto src = x.row(i);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      auto row = next.row(c);
      for (double& v : row) v /= static_cast<double>(counts[c]);
      shift = std::max(shift, std::sqrt(squared_distance(row, centroids.row(c))));
    }
    centroids = std::move(next);
    out.iterations = it + 1;
    if (shift < tol) break;
  }
  out.inertia = assign(x, centroids, labels, dist);
  out.inertia_trace.push_back(out.inertia);
  out.assignments = std::move(labels);
  out.centroids = std::move(centroids);
  return out;
}

ClusterResult kmeans(const Matrix& x, const KmeansOptions& opts, std::uint64_t seed) {
  if (opts.k == 0 || x.rows() < opts.k)
    throw UsageError("kmeans: need n >= k >= 1, got n=" + std::to_string(x.rows()) +
                     " k=" + std::to_string(opts.k));
  const std::size_t restarts = std::max<std::size_t>(opts.restarts, 1);
  std::vector<ClusterResult> runs(restarts);
  parallel_for(restarts, x.rows() * x.cols() * opts.k * 16, [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) {
      Rng rng(seed, RngStream::KmeansRestart, r);
      runs[r] = lloyd(x, kmeans_plus_plus(x, opts.k, rng), opts.max_iter, opts.tol);
    }
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r)
    if (runs[r].inertia < runs[best].inertia) best = r;
  ClusterResult out = std::move(runs[best]);
  out.restarts_run = restarts;
  out.best_restart = best;
  return out;
}

}  // namespace pgjr
