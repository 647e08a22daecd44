#include "pgjr/pipeline/checkpoint.hpp"

#include <string_view>

#include "pgjr/pipeline/binary_io.hpp"

namespace pgjr {

namespace {

void put_matrix(io::Writer& out, const Matrix& m) {
  out.u32(static_cast<std::uint32_t>(m.rows()));
  out.u32(static_cast<std::uint32_t>(m.cols()));
  for (double v : m.values()) out.f64(v);
}

void put_vector(io::Writer& out, const Vector& v) {
  out.u32(static_cast<std::uint32_t>(v.size()));
  for (double x : v) out.f64(x);
}

Matrix get_matrix(io::Reader& in) {
  const std::size_t rows = in.u32();
  const std::size_t cols = in.u32();
  if (cols != 0 && rows > in.remaining() / 8 / cols) in.need(rows * cols * 8);
  std::vector<double> data(rows * cols);
  for (double& v : data) v = in.f64();
  return Matrix(rows, cols, std::move(data));
}

Vector get_vector(io::Reader& in) {
  const std::size_t n = in.u32();
  in.need(n * 8);
  Vector v(n);
  for (double& x : v) x = in.f64();
  return v;
}

void put_affine(io::Writer& out, const AffineParams& p) {
  put_matrix(out, p.weight);
  put_vector(out, p.bias);
}

AffineParams get_affine(io::Reader& in, const std::string& what) {
  AffineParams p;
  p.weight = get_matrix(in);
  p.bias = get_vector(in);
  if (p.bias.size() != p.weight.rows())
    throw DataFormatError(what + ": bias length does not match weight rows");
  p.grad_weight = Matrix(p.weight.rows(), p.weight.cols());
  p.grad_bias.assign(p.bias.size(), 0.0);
  return p;
}

}  // namespace

std::vector<char> serialize_checkpoint(const Checkpoint& c) {
  io::Writer out;
  out.bytes(std::string_view(kCheckpointMagic, 8));
  out.u32(kCheckpointVersion);
  out.str(config_to_json(c.config).dump());
  out.u64(c.config_hash);
  out.u32(c.epoch);
  out.u64(c.shuffle_counter);

  out.u32(c.head.kind == HeadKind::Pgjr ? 0 : 1);
  out.u32(c.head.gjr_frozen ? 1 : 0);
  out.u32(static_cast<std::uint32_t>(c.head.geometry.blocks));
  out.u32(static_cast<std::uint32_t>(c.head.geometry.rows));
  out.u32(static_cast<std::uint32_t>(c.head.geometry.width));
  put_affine(out, c.head.projection);
  out.u32(static_cast<std::uint32_t>(c.head.gjr.row_regressors.size()));
  for (const auto& r : c.head.gjr.row_regressors) put_affine(out, r);

  out.u32(static_cast<std::uint32_t>(c.optimizer.size()));
  for (const auto& b : c.optimizer) {
    put_matrix(out, b.weight);
    put_vector(out, b.bias);
  }

  out.f64(c.bank.momentum());
  put_matrix(out, c.bank.entries());
  return out.data();
}

Checkpoint parse_checkpoint(const std::vector<char>& bytes, const std::string& what) {
  io::Reader in(bytes, what);
  if (bytes.size() < 8 || in.bytes(8) != std::string_view(kCheckpointMagic, 8))
    throw DataFormatError(what + ": bad magic");
  const std::uint32_t version = in.u32();
  if (version != kCheckpointVersion)
    throw DataFormatError(what + ": unsupported checkpoint version " + std::to_string(version));

  Checkpoint c;
  try {
    c.config = parse_config(in.str());
  } catch (const UsageError& e) {
    throw DataFormatError(what + ": embedded " + e.what());
  }
  c.config_hash = in.u64();
  if (c.config_hash != config_hash(c.config))
    throw DataFormatError(what + ": config hash does not match embedded config");
  c.epoch = in.u32();
  c.shuffle_counter = in.u64();

  const std::uint32_t kind = in.u32();
  if (kind > 1) throw DataFormatError(what + ": unknown head kind " + std::to_string(kind));
  c.head.kind = kind == 0 ? HeadKind::Pgjr : HeadKind::Linear;
  c.head.gjr_frozen = in.u32() != 0;
  c.head.geometry.blocks = in.u32();
  c.head.geometry.rows = in.u32();
  c.head.geometry.width = in.u32();
  c.head.projection = get_affine(in, what);
  const std::uint32_t regressors = in.u32();
  for (std::uint32_t i = 0; i < regressors; ++i)
    c.head.gjr.row_regressors.push_back(get_affine(in, what));
  if (c.head.kind == HeadKind::Pgjr) {
    if (regressors != c.head.geometry.rows ||
        c.head.geometry.n_in() != c.head.projection.in_dim())
      throw DataFormatError(what + ": head geometry is inconsistent");
  }

  const std::uint32_t buffers = in.u32();
  for (std::uint32_t i = 0; i < buffers; ++i) {
    MomentumBuffer b;
    b.weight = get_matrix(in);
    b.bias = get_vector(in);
    c.optimizer.push_back(std::move(b));
  }

  const double bank_momentum = in.f64();
  c.bank = MemoryBank::from_entries(get_matrix(in), bank_momentum);
  if (in.remaining() != 0)
    throw DataFormatError(what + ": trailing bytes at offset " + std::to_string(in.pos()));
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  io::write_file(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
  return parse_checkpoint(io::read_file(path), path);
}

}  // namespace pgjr
