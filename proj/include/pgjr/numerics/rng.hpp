#pragma once

#include <cstdint>

namespace pgjr {

/// Purpose tags for independent random streams derived from one seed.
enum class RngStream : std::uint64_t {
  ProjectionInit = 1,
  GjrInit = 2,
  Shuffle = 3,
  TrainEval = 4,
  FinalEval = 5,
  KmeansRestart = 6,
  Gradcheck = 7,
  Synthetic = 8,
};

/// Counter-based 64-bit generator: output i is a bijective mix of (key, i),
/// so the whole state is the pair (key, counter) and any position can be
/// restored exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);
  Rng(std::uint64_t seed, RngStream stream, std::uint64_t index = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Standard normal (Box-Muller, no cached spare).
  double normal();
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }
  void set_counter(std::uint64_t c) { counter_ = c; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace pgjr
