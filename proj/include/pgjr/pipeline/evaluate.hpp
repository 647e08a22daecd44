#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pgjr/cluster/kmeans.hpp"
#include "pgjr/cluster/knn.hpp"
#include "pgjr/cluster/metrics.hpp"
#include "pgjr/pipeline/checkpoint.hpp"
#include "pgjr/pipeline/embeddings.hpp"

namespace pgjr {

/// Raw head outputs for one view of every sample, computed in fixed-size
/// chunks.
Matrix head_outputs(const PgjrHead& head, const EmbeddingSet& data, std::size_t view = 0);

/// Unit-norm head outputs for one view of every sample.
Matrix representations(const PgjrHead& head, const EmbeddingSet& data, std::size_t view = 0);

/// Metrics over the samples with a known label; acc/nmi/ari are left unset
/// when there are none. Silhouette is computed whenever there are at least
/// two clusters.
struct LabelledMetrics {
  std::optional<double> acc, nmi, ari;
  std::optional<double> silhouette;
};
LabelledMetrics score_clustering(const Matrix& x, std::span<const int> assignments,
                                 std::span<const std::int32_t> labels);

struct Evaluation {
  ClusterResult cluster;
  LabelledMetrics metrics;
};

/// Cluster a representation matrix and score it against the labels.
Evaluation cluster_and_score(const Matrix& x, const EmbeddingSet& data, const KmeansOptions& opts,
                             std::uint64_t seed);

/// Final-style evaluation of a checkpoint: view 0, cfg.restarts restarts on
/// the final-evaluation stream.
Evaluation evaluate(const Checkpoint& ckpt, const EmbeddingSet& data);

/// k-means directly on view 0 of the embeddings, optionally L2-normalised.
Evaluation evaluate_raw(const EmbeddingSet& data, const KmeansOptions& opts, std::uint64_t seed,
                        bool normalize);

std::string evaluation_to_json(const Evaluation& ev, bool include_assignments = false);

/// CSV of sample_index, proj_x, proj_y, cluster_id, true_label.
std::string projection_csv(const Matrix& reps, const ClusterResult& cluster,
                           std::span<const std::int32_t> labels);
void export_projection(const Checkpoint& ckpt, const EmbeddingSet& data, const std::string& path);

std::string knn_json(const std::vector<ClusterNeighbors>& neighbors, std::size_t k);
void knn_report(const Checkpoint& ckpt, const EmbeddingSet& data, std::size_t k,
                const std::string& path);

}  // namespace pgjr
