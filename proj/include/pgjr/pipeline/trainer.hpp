#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pgjr/cluster/kmeans.hpp"
#include "pgjr/cluster/metrics.hpp"
#include "pgjr/pipeline/checkpoint.hpp"
#include "pgjr/pipeline/embeddings.hpp"
#include "pgjr/pipeline/evaluate.hpp"

namespace pgjr {

struct EpochLoss {
  std::size_t epoch = 0;  // 1-based
  double lr = 0.0;
  double instance = 0.0;       // mean over batches
  double decorrelation = 0.0;  // mean over batches
  double total = 0.0;
  std::size_t batches = 0;
};

struct EvalPoint {
  std::size_t epoch = 0;  // 1-based
  LabelledMetrics metrics;
  double inertia = 0.0;
};

struct RunReport {
  std::vector<EpochLoss> losses;
  std::vector<EvalPoint> evals;
  std::optional<ClusterResult> final_cluster;
  LabelledMetrics final_metrics;
  bool has_labels = false;
  /// Wall-clock seconds per epoch; written to timing.json, not report.json.
  std::vector<double> epoch_seconds;
};

struct TrainResult {
  Checkpoint checkpoint;
  RunReport report;
};

/// Fresh training state: initial head, optimizer buffers and a memory bank
/// built from one forward pass over view 0.
Checkpoint initial_checkpoint(const TrainConfig& cfg, const EmbeddingSet& data);

/// Trains from `resume` (or a fresh initialisation) up to cfg.epochs.
/// Throws NumericalError naming the epoch and batch when the loss stops being
/// finite.
TrainResult train(const TrainConfig& cfg, const EmbeddingSet& data,
                  const Checkpoint* resume = nullptr);

/// Writes report.json, losses.csv, timing.json and checkpoint.bin into dir.
void write_run_outputs(const TrainResult& result, const std::string& dir);

std::string report_to_json(const RunReport& report, const TrainConfig& cfg);
std::string losses_to_csv(const RunReport& report);

}  // namespace pgjr
