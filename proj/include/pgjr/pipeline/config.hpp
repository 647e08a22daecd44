#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "json.hpp"

#include "pgjr/gjr/head.hpp"
#include "pgjr/idfd/losses.hpp"

namespace pgjr {

/// Training hyperparameters. Every field has a default.
struct TrainConfig {
  double tau1 = 1.0;
  double tau2 = 2.0;
  std::size_t blocks = 8;
  std::size_t grid = 4;  // rows per block
  std::size_t n_out = 128;
  std::size_t batch_size = 128;
  std::size_t epochs = 150;
  double lr0 = 0.5;
  double lr1 = 0.01;
  std::size_t lr1_epoch = 75;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  double bank_momentum = 0.5;
  std::size_t restarts = 20;
  std::size_t eval_restarts = 5;
  std::size_t kmeans_max_iter = 300;
  double kmeans_tol = 1e-6;
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::size_t eval_every = 10;
  LossReduction loss_reduction = LossReduction::Mean;
  HeadKind head = HeadKind::Pgjr;
  GjrInit gjr_init = GjrInit::FanIn;
  bool freeze_gjr = false;

  double learning_rate(std::size_t epoch) const { return epoch < lr1_epoch ? lr0 : lr1; }

  /// Throws UsageError on out-of-range values.
  void validate() const;
  /// Checks the config against a dataset (batch size, dims, k).
  void validate_for(std::size_t n, std::size_t dim) const;
  HeadInit head_init(std::size_t n_in) const;

  bool operator==(const TrainConfig&) const = default;
};

/// Every field is optional; unknown keys and wrongly typed values throw
/// UsageError.
TrainConfig config_from_json(const nlohmann::json& j);
TrainConfig parse_config(const std::string& text);
TrainConfig load_config(const std::string& path);
nlohmann::json config_to_json(const TrainConfig& cfg);

/// FNV-1a over the canonical JSON of every field except `epochs`.
std::uint64_t config_hash(const TrainConfig& cfg);

}  // namespace pgjr
