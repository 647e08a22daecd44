#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pgjr/numerics/matrix.hpp"

namespace pgjr {

inline constexpr char kEmbeddingMagic[] = "PGJREMB1";
inline constexpr std::uint32_t kEmbeddingVersion = 1;

/// n images x A views x d float32 embeddings, sample-major then view-major.
struct EmbeddingSet {
  std::size_t n = 0;
  std::size_t views = 1;
  std::size_t dim = 0;
  std::vector<std::int32_t> labels;  // length n, -1 = unknown
  std::vector<float> data;           // length n * views * dim
  std::string source_tag;

  /// True when at least one label is known.
  bool has_labels() const;
  /// Throws DataFormatError when sizes disagree or an entry is NaN/Inf.
  void validate() const;

  std::span<const float> sample(std::size_t i, std::size_t view) const;
  /// One view of every sample, promoted to float64.
  Matrix view_matrix(std::size_t view) const;
  /// Selected samples of one view.
  Matrix gather(std::span<const std::size_t> indices, std::size_t view) const;
};

EmbeddingSet parse_embeddings(const std::vector<char>& bytes, const std::string& what = "embeddings");
std::vector<char> serialize_embeddings(const EmbeddingSet& set);

EmbeddingSet load_embeddings(const std::string& path);
void write_embeddings(const EmbeddingSet& set, const std::string& path);

}  // namespace pgjr
