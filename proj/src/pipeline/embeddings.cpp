#include "pgjr/pipeline/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <string_view>

#include "pgjr/error.hpp"
#include "pgjr/pipeline/binary_io.hpp"

namespace pgjr {

bool EmbeddingSet::has_labels() const {
  return std::any_of(labels.begin(), labels.end(), [](std::int32_t l) { return l >= 0; });
}

void EmbeddingSet::validate() const {
  if (labels.size() != n)
    throw DataFormatError("embeddings: label count " + std::to_string(labels.size()) +
                          " does not match n=" + std::to_string(n));
  if (data.size() != n * views * dim)
    throw DataFormatError("embeddings: data length " + std::to_string(data.size()) +
                          " does not match n*A*d=" + std::to_string(n * views * dim));
  if (views < 1) throw DataFormatError("embeddings: need at least one view");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i]))
      throw DataFormatError("embeddings: non-finite value at sample " +
                            std::to_string(i / (views * dim)) + ", view " +
                            std::to_string((i / dim) % views) + ", dim " +
                            std::to_string(i % dim));
  }
  for (std::int32_t l : labels)
    if (l < -1) throw DataFormatError("embeddings: label " + std::to_string(l) + " below -1");
}

std::span<const float> EmbeddingSet::sample(std::size_t i, std::size_t view) const {
  return {data.data() + (i * views + view) * dim, dim};
}

Matrix EmbeddingSet::view_matrix(std::size_t view) const {
  Matrix m(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto src = sample(i, view);
    std::copy(src.begin(), src.end(), m.row(i).begin());
  }
  return m;
}

Matrix EmbeddingSet::gather(std::span<const std::size_t> indices, std::size_t view) const {
  Matrix m(indices.size(), dim);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    auto src = sample(indices[r], view);
    std::copy(src.begin(), src.end(), m.row(r).begin());
  }
  return m;
}

EmbeddingSet parse_embeddings(const std::vector<char>& bytes, const std::string& what) {
  io::Reader in(bytes, what);
  if (bytes.size() < 8 || in.bytes(8) != std::string_view(kEmbeddingMagic, 8))
    throw DataFormatError(what + ": bad magic");
  const std::uint32_t version = in.u32();
  if (version != kEmbeddingVersion)
    throw DataFormatError(what + ": unsupported version " + std::to_string(version));
  EmbeddingSet set;
  set.n = in.u32();
  set.views = in.u32();
  set.dim = in.u32();
  if (set.views == 0) throw DataFormatError(what + ": view count is zero");
  in.need(set.n * 4);
  set.labels.resize(set.n);
  for (auto& l : set.labels) l = in.i32();
  const std::size_t per_sample = set.views * set.dim;
  if (per_sample != 0 && set.n > in.remaining() / 4 / per_sample)
    throw DataFormatError(what + ": truncated payload at offset " + std::to_string(in.pos()) +
                          " (header declares " + std::to_string(set.n) + "x" +
                          std::to_string(set.views) + "x" + std::to_string(set.dim) + ")");
  const std::size_t count = set.n * per_sample;
  set.data.resize(count);
  for (auto& v : set.data) v = in.f32();
  if (in.remaining() != 0)
    throw DataFormatError(what + ": " + std::to_string(in.remaining()) +
                          " trailing bytes after payload at offset " + std::to_string(in.pos()));
  set.validate();
  return set;
}

std::vector<char> serialize_embeddings(const EmbeddingSet& set) {
  set.validate();
  io::Writer out;
  out.bytes(std::string_view(kEmbeddingMagic, 8));
  out.u32(kEmbeddingVersion);
  out.u32(static_cast<std::uint32_t>(set.n));
  out.u32(static_cast<std::uint32_t>(set.views));
  out.u32(static_cast<std::uint32_t>(set.dim));
  for (std::int32_t l : set.labels) out.i32(l);
  for (float v : set.data) out.f32(v);
  return out.data();
}

EmbeddingSet load_embeddings(const std::string& path) {
  EmbeddingSet set = parse_embeddings(io::read_file(path), path);
  set.source_tag = path;
  return set;
}

void write_embeddings(const EmbeddingSet& set, const std::string& path) {
  io::write_file(path, serialize_embeddings(set));
}

}  // namespace pgjr
