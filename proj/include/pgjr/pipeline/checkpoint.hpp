#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pgjr/gjr/head.hpp"
#include "pgjr/idfd/memory_bank.hpp"
#include "pgjr/numerics/sgd.hpp"
#include "pgjr/pipeline/config.hpp"

namespace pgjr {

inline constexpr char kCheckpointMagic[] = "PGJRCKP1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Complete training state: restoring it and continuing reproduces an
/// uninterrupted run bit for bit.
struct Checkpoint {
  TrainConfig config;
  std::uint64_t config_hash = 0;
  std::uint32_t epoch = 0;  // epochs completed
  PgjrHead head;
  std::vector<MomentumBuffer> optimizer;  // mirrors head.trainable()
  MemoryBank bank;
  std::uint64_t shuffle_counter = 0;
};

std::vector<char> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::vector<char>& bytes, const std::string& what = "checkpoint");
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace pgjr
