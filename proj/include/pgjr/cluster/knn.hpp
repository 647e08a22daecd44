#pragma once

#include <cstddef>
#include <vector>

#include "pgjr/cluster/kmeans.hpp"

namespace pgjr {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

struct ClusterNeighbors {
  std::size_t cluster = 0;
  std::vector<Neighbor> nearest;  // ascending distance, ties by lower index
  bool short_cluster = false;     // fewer than k members
};

/// For each cluster, the k members closest to its centroid.
std::vector<ClusterNeighbors> knn_to_centroid(const Matrix& x, const ClusterResult& result,
                                              std::size_t k = 3);

}  // namespace pgjr
