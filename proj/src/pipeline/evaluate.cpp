#include "pgjr/pipeline/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "json.hpp"
#include "pgjr/error.hpp"
#include "pgjr/numerics/layers.hpp"
#include "pgjr/numerics/pca.hpp"
#include "pgjr/numerics/rng.hpp"
#include "pgjr/pipeline/binary_io.hpp"

namespace pgjr {

using nlohmann::json;

namespace {

constexpr std::size_t kForwardChunk = 256;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Matrix head_outputs(const PgjrHead& head, const EmbeddingSet& data, std::size_t view) {
  if (data.dim != head.n_in())
    throw UsageError("head expects " + std::to_string(head.n_in()) + "-dim embeddings, data has " +
                     std::to_string(data.dim));
  if (view >= data.views) throw UsageError("view index out of range");
  Matrix out(data.n, head.n_out());
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < data.n; start += kForwardChunk) {
    const std::size_t end = std::min(data.n, start + kForwardChunk);
    idx.resize(end - start);
    for (std::size_t i = start; i < end; ++i) idx[i - start] = i;
    const Matrix y = head_forward(head, data.gather(idx, view));
    for (std::size_t r = 0; r < y.rows(); ++r)
      std::copy(y.row(r).begin(), y.row(r).end(), out.row(start + r).begin());
  }
  return out;
}

Matrix representations(const PgjrHead& head, const EmbeddingSet& data, std::size_t view) {
  return normalize_rows(head_outputs(head, data, view));
}

LabelledMetrics score_clustering(const Matrix& x, std::span<const int> assignments,
                                 std::span<const std::int32_t> labels) {
  LabelledMetrics m;
  std::vector<int> pred, truth;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) continue;
    pred.push_back(assignments[i]);
    truth.push_back(labels[i]);
  }
  if (!pred.empty()) {
    m.acc = acc(pred, truth);
    m.nmi = nmi(pred, truth);
    m.ari = ari(pred, truth);
  }
  std::set<int> distinct(assignments.begin(), assignments.end());
  if (distinct.size() >= 2 && x.rows() >= 3) m.silhouette = silhouette(x, assignments);
  return m;
}

Evaluation cluster_and_score(const Matrix& x, const EmbeddingSet& data, const KmeansOptions& opts,
                             std::uint64_t seed) {
  Evaluation ev;
  ev.cluster = kmeans(x, opts, seed);
  ev.metrics = score_clustering(x, ev.cluster.assignments, data.labels);
  return ev;
}

Evaluation evaluate(const Checkpoint& ckpt, const EmbeddingSet& data) {
  const TrainConfig& cfg = ckpt.config;
  if (ckpt.bank.size() != 0 && ckpt.bank.size() != data.n)
    throw UsageError("checkpoint was trained on " + std::to_string(ckpt.bank.size()) +
                     " samples, data has " + std::to_string(data.n));
  const Matrix reps = representations(ckpt.head, data, 0);
  KmeansOptions opts{cfg.k, cfg.restarts, cfg.kmeans_max_iter, cfg.kmeans_tol};
  return cluster_and_score(reps, data, opts, Rng(cfg.seed, RngStream::FinalEval).next_u64());
}

Evaluation evaluate_raw(const EmbeddingSet& data, const KmeansOptions& opts, std::uint64_t seed,
                        bool normalize) {
  Matrix x = data.view_matrix(0);
  if (normalize) x = normalize_rows(x);
  return cluster_and_score(x, data, opts, Rng(seed, RngStream::FinalEval).next_u64());
}

namespace {

json metrics_json(const LabelledMetrics& m) {
  json j = json::object();
  if (m.acc) j["acc"] = *m.acc;
  if (m.nmi) j["nmi"] = *m.nmi;
  if (m.ari) j["ari"] = *m.ari;
  if (m.silhouette) j["silhouette"] = *m.silhouette;
  return j;
}

}  // namespace

std::string evaluation_to_json(const Evaluation& ev, bool include_assignments) {
  json j = metrics_json(ev.metrics);
  j["inertia"] = ev.cluster.inertia;
  j["k"] = ev.cluster.centroids.rows();
  j["restarts_run"] = ev.cluster.restarts_run;
  std::vector<std::size_t> sizes(ev.cluster.centroids.rows(), 0);
  for (int a : ev.cluster.assignments) ++sizes[static_cast<std::size_t>(a)];
  j["cluster_sizes"] = sizes;
  if (include_assignments) j["assignments"] = ev.cluster.assignments;
  return j.dump(2);
}

std::string projection_csv(const Matrix& reps, const ClusterResult& cluster,
                           std::span<const std::int32_t> labels) {
  const Matrix proj = pca_2d(reps);
  std::string out = "sample_index,proj_x,proj_y,cluster_id,true_label\n";
  for (std::size_t i = 0; i < reps.rows(); ++i) {
    out += std::to_string(i) + "," + fmt_double(proj(i, 0)) + "," + fmt_double(proj(i, 1)) + "," +
           std::to_string(cluster.assignments[i]) + "," + std::to_string(labels[i]) + "\n";
  }
  return out;
}

void export_projection(const Checkpoint& ckpt, const EmbeddingSet& data, const std::string& path) {
  const Evaluation ev = evaluate(ckpt, data);
  const Matrix reps = representations(ckpt.head, data, 0);
  io::write_text(path, projection_csv(reps, ev.cluster, data.labels));
}

std::string knn_json(const std::vector<ClusterNeighbors>& neighbors, std::size_t k) {
  json clusters = json::array();
  for (const auto& c : neighbors) {
    json nearest = json::array();
    for (std::size_t r = 0; r < c.nearest.size(); ++r)
      nearest.push_back({{"rank", r + 1}, {"index", c.nearest[r].index},
                         {"distance", c.nearest[r].distance}});
    clusters.push_back({{"cluster", c.cluster}, {"short", c.short_cluster}, {"nearest", nearest}});
  }
  return json{{"k", k}, {"clusters", clusters}}.dump(2);
}

void knn_report(const Checkpoint& ckpt, const EmbeddingSet& data, std::size_t k,
                const std::string& path) {
  if (k == 0) throw UsageError("knn: k must be positive");
  const Evaluation ev = evaluate(ckpt, data);
  const Matrix reps = representations(ckpt.head, data, 0);
  io::write_text(path, knn_json(knn_to_centroid(reps, ev.cluster, k), k));
}

}  // namespace pgjr
