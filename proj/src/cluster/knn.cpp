#include "pgjr/cluster/knn.hpp"

#include <algorithm>
#include <cmath>

#include "pgjr/error.hpp"

namespace pgjr {

std::vector<ClusterNeighbors> knn_to_centroid(const Matrix& x, const ClusterResult& result,
                                              std::size_t k) {
  if (result.assignments.size() != x.rows())
    throw UsageError("knn_to_centroid: assignment count does not match data rows");
  if (result.centroids.cols() != x.cols())
    throw UsageError("knn_to_centroid: centroid dim does not match data");
  std::vector<ClusterNeighbors> out(result.centroids.rows());
  for (std::size_t c = 0; c < out.size(); ++c) out[c].cluster = c;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const int c = result.assignments[i];
    if (c < 0 || static_cast<std::size_t>(c) >= out.size())
      throw UsageError("knn_to_centroid: assignment out of range");
    out[static_cast<std::size_t>(c)].nearest.push_back(
        {i, std::sqrt(squared_distance(x.row(i), result.centroids.row(static_cast<std::size_t>(c))))});
  }
  for (auto& cluster : out) {
    auto& v = cluster.nearest;
    std::sort(v.begin(), v.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
    });
    cluster.short_cluster = v.size() < k;
    if (v.size() > k) v.resize(k);
  }
  return out;
}

}  // namespace pgjr
