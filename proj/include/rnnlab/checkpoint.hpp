// Copyright 2026 The rnnlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Binary model checkpoints.
//
// Layout (all integers unsigned little-endian, reals IEEE-754 binary64
// little-endian):
//
//   bytes 0..7   magic "RNNLABCK"
//   u32          format version (1)
//   u32          cell kind (0 = vanilla, 1 = lstm)
//   u64 x 4      layers, hidden size H, input dim d, label count |L|
//   per matrix, in the order layer 1 U, layer 1 V, ..., layer n V, W_out:
//     u64 rows, u64 cols, rows*cols reals in row-major order
//
// LSTM U and V stack the gate blocks (g, i, f, o) top to bottom, H rows each.

#ifndef RNNLAB_CHECKPOINT_HPP_
#define RNNLAB_CHECKPOINT_HPP_

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "rnnlab/cells.hpp"
#include "rnnlab/errors.hpp"

namespace rnnlab {

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::array<char, 8> kCheckpointMagic = {'R', 'N', 'N', 'L', 'A', 'B', 'C', 'K'};

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class ByteReader {
 public:
  explicit ByteReader(const std::string& bytes) : bytes_(bytes) {}

  std::uint64_t u64(const char* what) { return read(8, what); }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(read(4, what)); }
  double f64(const char* what) { return std::bit_cast<double>(read(8, what)); }
  bool done() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::uint64_t read(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n)
      throw DataError(std::string("checkpoint truncated while reading ") + what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += n;
    return v;
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize_checkpoint(const ModelParams& model) {
  validate(model);
  std::string out(kCheckpointMagic.begin(), kCheckpointMagic.end());
  detail::put_u32(out, kCheckpointVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(model.spec.kind));
  detail::put_u64(out, model.spec.layers);
  detail::put_u64(out, model.spec.hidden);
  detail::put_u64(out, model.spec.input_dim);
  detail::put_u64(out, model.spec.labels);
  for (const Matrix* m : model.tensors()) {
    detail::put_u64(out, m->rows());
    detail::put_u64(out, m->cols());
    for (double v : m->values()) detail::put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

inline ModelParams deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < kCheckpointMagic.size() ||
      std::memcmp(bytes.data(), kCheckpointMagic.data(), kCheckpointMagic.size()) != 0)
    throw DataError("not an rnnlab checkpoint (bad magic)");
  const std::string body = bytes.substr(kCheckpointMagic.size());
  detail::ByteReader in(body);
  const std::uint32_t version = in.u32("version");
  if (version != kCheckpointVersion)
    throw DataError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                    std::to_string(kCheckpointVersion) + ")");
  const std::uint32_t kind = in.u32("cell kind");
  if (kind > 1) throw DataError("checkpoint: unknown cell kind " + std::to_string(kind));
  ModelSpec spec;
  spec.kind = static_cast<CellKind>(kind);
  spec.layers = in.u64("layers");
  spec.hidden = in.u64("hidden size");
  spec.input_dim = in.u64("input dim");
  spec.labels = in.u64("label count");
  // Guard against absurd headers before allocating.
  const double gh = static_cast<double>(gate_count(spec.kind)) * static_cast<double>(spec.hidden);
  const double hd = static_cast<double>(spec.hidden);
  const double params = gh * (static_cast<double>(spec.input_dim) + hd) +
                        (static_cast<double>(spec.layers) - 1.0) * gh * 2.0 * hd +
                        static_cast<double>(spec.labels) * hd;
  if (spec.layers < 1 || spec.hidden < 1 || spec.input_dim < 1 || spec.labels < 1 ||
      params * 8 > static_cast<double>(in.remaining()))
    throw DataError("checkpoint: dims inconsistent with file size");
  ModelParams model = zero_params(spec);
  std::size_t index = 0;
  for (Matrix* m : model.tensors()) {
    const std::uint64_t rows = in.u64("matrix rows");
    const std::uint64_t cols = in.u64("matrix cols");
    if (rows != m->rows() || cols != m->cols())
      throw DataError("checkpoint: matrix " + std::to_string(index) + " is " +
                      std::to_string(rows) + "x" + std::to_string(cols) + ", expected " +
                      std::to_string(m->rows()) + "x" + std::to_string(m->cols()));
    for (double& v : m->values()) v = in.f64("matrix data");
    ++index;
  }
  if (!in.done()) throw DataError("checkpoint: trailing bytes");
  return model;
}

inline void save_checkpoint(const ModelParams& model, const std::string& path) {
  const std::string bytes = serialize_checkpoint(model);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw DataError("write to '" + path + "' failed");
}

inline ModelParams load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  try {
    return deserialize_checkpoint(bytes);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace rnnlab

#endif  // RNNLAB_CHECKPOINT_HPP_
