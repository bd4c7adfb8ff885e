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

// Online and batch decoding graphs.
//
// Every graph is a set of equal-length chains that start from the zero state.
// Online decoding is one chain over the whole (lookahead-padded) sequence;
// batch decoding is one chain of `context` steps per prediction anchor. The
// chains of a set are evaluated together as columns of a batch.
//
// Frame indices are 0-based. Indices outside [0, T) read as zero frames.

#ifndef RNNLAB_GRAPHS_HPP_
#define RNNLAB_GRAPHS_HPP_

#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rnnlab/cells.hpp"
#include "rnnlab/errors.hpp"
#include "rnnlab/numeric.hpp"

namespace rnnlab {

enum class DecodeMode { kOnline, kBatch };

struct DecodeConfig {
  DecodeMode mode = DecodeMode::kOnline;
  std::size_t lookahead = 1;
  std::size_t context = 1;  // total chain length, batch only
  std::size_t predict = 1;  // consecutive predictions per chain, batch training only

  bool operator==(const DecodeConfig&) const = default;

  static DecodeConfig online(std::size_t lookahead = 1) {
    return {DecodeMode::kOnline, lookahead, 1, 1};
  }
  static DecodeConfig batch(std::size_t context, std::size_t lookahead = 1,
                            std::size_t predict = 1) {
    return {DecodeMode::kBatch, lookahead, context, predict};
  }

  // Frames before the anchor that a batch chain still covers.
  std::ptrdiff_t past_coverage() const {
    return static_cast<std::ptrdiff_t>(context) - static_cast<std::ptrdiff_t>(lookahead) -
           static_cast<std::ptrdiff_t>(predict) + 1;
  }

  void validate() const {
    if (lookahead < 1) throw ConfigError("lookahead must be >= 1");
    if (mode == DecodeMode::kOnline) return;
    if (context < 1) throw ConfigError("context must be >= 1");
    if (predict < 1) throw ConfigError("predict must be >= 1");
    if (context < lookahead + predict - 1) {
      throw ConfigError("batch decoding requires context >= lookahead + predict - 1 (" +
                        std::to_string(context) + " < " + std::to_string(lookahead) + " + " +
                        std::to_string(predict) + " - 1)");
    }
  }

  // Round-trips through parse_decode_specs.
  std::string label() const {
    std::ostringstream os;
    if (mode == DecodeMode::kOnline) {
      os << "online:lookahead=" << lookahead;
    } else {
      os << "batch:context=" << context << ",lookahead=" << lookahead;
      if (predict != 1) os << ",predict=" << predict;
    }
    return os.str();
  }

  // The configuration used at test time: consecutive prediction is a
  // training-only device.
  DecodeConfig for_decoding() const {
    DecodeConfig d = *this;
    d.predict = 1;
    return d;
  }
};

namespace detail {

inline std::vector<std::size_t> parse_counts(const std::string& key, const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || v < 1)
      throw ConfigError("decode spec: bad value '" + item + "' for " + key);
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("decode spec: no value for " + key);
  return out;
}

}  // namespace detail

// Parses "online", "online:lookahead=5", "batch:context=40,lookahead=20" or
// "batch:context=40,35,30,lookahead=20,predict=1". Multiple values for one key
// expand into one config per value.
inline std::vector<DecodeConfig> parse_decode_specs(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string mode = spec.substr(0, colon);
  DecodeConfig base;
  if (mode == "online") {
    base.mode = DecodeMode::kOnline;
  } else if (mode == "batch") {
    base.mode = DecodeMode::kBatch;
  } else {
    throw ConfigError("decode spec: unknown mode '" + mode + "'");
  }
  // Tokens are split on ','; a token without '=' is another value of the
  // preceding key.
  std::vector<std::pair<std::string, std::string>> keys;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const auto eq = tok.find('=');
      if (eq != std::string::npos) {
        keys.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
      } else if (!keys.empty()) {
        keys.back().second += "," + tok;
      } else {
        throw ConfigError("decode spec: expected key=value in '" + spec + "'");
      }
    }
  }
  bool has_context = false;
  std::vector<DecodeConfig> out{base};
  for (const auto& [key, text] : keys) {
    std::size_t DecodeConfig::*field = nullptr;
    if (key == "lookahead") {
      field = &DecodeConfig::lookahead;
    } else if (key == "context" && base.mode == DecodeMode::kBatch) {
      field = &DecodeConfig::context;
      has_context = true;
    } else if (key == "predict" && base.mode == DecodeMode::kBatch) {
      field = &DecodeConfig::predict;
    } else {
      throw ConfigError("decode spec: key '" + key + "' not valid for " + mode);
    }
    std::vector<DecodeConfig> expanded;
    for (const auto& cfg : out)
      for (std::size_t v : detail::parse_counts(key, text)) {
        DecodeConfig c = cfg;
        c.*field = v;
        expanded.push_back(c);
      }
    out = std::move(expanded);
  }
  if (base.mode == DecodeMode::kBatch && !has_context)
    throw ConfigError("decode spec: batch needs context=");
  for (const auto& c : out) c.validate();
  return out;
}

// Read-only view of a T x d frame matrix with zero padding on both sides.
class PaddedSequence {
 public:
  explicit PaddedSequence(const Matrix& frames) : frames_(&frames) {}

  std::size_t length() const { return frames_->rows(); }
  std::size_t dim() const { return frames_->cols(); }
  bool in_range(std::ptrdiff_t t) const {
    return t >= 0 && t < static_cast<std::ptrdiff_t>(length());
  }
  double at(std::ptrdiff_t t, std::size_t k) const {
    return in_range(t) ? (*frames_)(static_cast<std::size_t>(t), k) : 0.0;
  }
  Vector frame(std::ptrdiff_t t) const {
    Vector v(dim());
    for (std::size_t k = 0; k < dim(); ++k) v[k] = at(t, k);
    return v;
  }

 private:
  const Matrix* frames_;
};

// One chain of a batch graph. `end - start + 1` is the chain length;
// each prediction pairs a predicted frame with the frame index of the hidden
// vector it is read from.
struct ChainLayout {
  std::ptrdiff_t start = 0;
  std::ptrdiff_t end = 0;
  std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>> predictions;

  bool operator==(const ChainLayout&) const = default;
};

// Chains anchored at every frame t: the chain ends at t + lookahead + predict - 2
// and predicts frames t .. t + predict - 1 (those < T) from its last `predict`
// hidden vectors.
inline std::vector<ChainLayout> consecutive_chains(std::size_t length, std::size_t context,
                                                   std::size_t lookahead, std::size_t predict) {
  DecodeConfig::batch(context, lookahead, predict).validate();
  const auto k = static_cast<std::ptrdiff_t>(context);
  const auto la = static_cast<std::ptrdiff_t>(lookahead);
  const auto p = static_cast<std::ptrdiff_t>(predict);
  const auto n = static_cast<std::ptrdiff_t>(length);
  std::vector<ChainLayout> out;
  out.reserve(length);
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    ChainLayout c;
    c.end = t + la + p - 2;
    c.start = c.end - k + 1;
    for (std::ptrdiff_t i = 1; i <= p; ++i) {
      const std::ptrdiff_t frame = t + i - 1;
      if (frame >= n) break;
      c.predictions.emplace_back(frame, t + la + i - 2);
    }
    out.push_back(std::move(c));
  }
  return out;
}

// Column-batched form of a graph.
struct ChainSet {
  struct Prediction {
    std::size_t chain = 0;
    std::size_t step = 0;   // position within the chain
    std::size_t frame = 0;  // predicted frame
  };
  std::size_t length = 0;
  std::vector<std::ptrdiff_t> starts;
  std::vector<Prediction> predictions;

  std::size_t chains() const { return starts.size(); }
};

inline ChainSet to_chain_set(const std::vector<ChainLayout>& layouts) {
  ChainSet s;
  for (const auto& c : layouts) {
    const auto len = static_cast<std::size_t>(c.end - c.start + 1);
    if (s.starts.empty()) {
      s.length = len;
    } else if (len != s.length) {
      throw ConfigError("chain set: chains must have equal length");
    }
    for (const auto& [frame, hidden] : c.predictions) {
      if (hidden < c.start || hidden > c.end) throw ConfigError("chain set: prediction off chain");
      s.predictions.push_back({s.starts.size(), static_cast<std::size_t>(hidden - c.start),
                               static_cast<std::size_t>(frame)});
    }
    s.starts.push_back(c.start);
  }
  return s;
}

// Single chain from frame 0 through T + lookahead - 2; frame t is predicted
// from the hidden vector at t + lookahead - 1.
inline ChainSet online_chain(std::size_t length, std::size_t lookahead) {
  if (lookahead < 1) throw ConfigError("lookahead must be >= 1");
  ChainSet s;
  if (length == 0) return s;
  s.length = length + lookahead - 1;
  s.starts.push_back(0);
  for (std::size_t t = 0; t < length; ++t) s.predictions.push_back({0, t + lookahead - 1, t});
  return s;
}

inline ChainSet build_chain_set(std::size_t length, const DecodeConfig& cfg) {
  cfg.validate();
  if (cfg.mode == DecodeMode::kOnline) return online_chain(length, cfg.lookahead);
  return to_chain_set(consecutive_chains(length, cfg.context, cfg.lookahead, cfg.predict));
}

// Activations kept for the backward pass: steps[s][l] is layer l at chain
// position s.
struct GraphCache {
  std::vector<std::vector<LayerStep>> steps;
};

namespace detail {

inline Matrix gather_inputs(const PaddedSequence& seq, const ChainSet& set, std::size_t step) {
  Matrix x(seq.dim(), set.chains());
  for (std::size_t b = 0; b < set.chains(); ++b) {
    const std::ptrdiff_t t = set.starts[b] + static_cast<std::ptrdiff_t>(step);
    if (!seq.in_range(t)) continue;
    for (std::size_t k = 0; k < seq.dim(); ++k) x(k, b) = seq.at(t, k);
  }
  return x;
}

inline std::vector<std::vector<std::size_t>> predictions_by_step(const ChainSet& set) {
  std::vector<std::vector<std::size_t>> by(set.length);
  for (std::size_t i = 0; i < set.predictions.size(); ++i) {
    if (set.predictions[i].step >= set.length || set.predictions[i].chain >= set.chains())
      throw ConfigError("chain set: prediction index out of range");
    by[set.predictions[i].step].push_back(i);
  }
  return by;
}

inline Vector column_of(const Matrix& m, std::size_t b) {
  Vector v(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) v[r] = m(r, b);
  return v;
}

}  // namespace detail

// Evaluates every chain of `set` and returns logits for each prediction, in
// the order of set.predictions. Fills `cache` when given.
inline std::vector<Vector> graph_forward(const ModelParams& model, const PaddedSequence& seq,
                                         const ChainSet& set, GraphCache* cache = nullptr) {
  if (seq.dim() != model.spec.input_dim)
    throw ConfigError("sequence frame dim " + std::to_string(seq.dim()) + " != model input dim " +
                      std::to_string(model.spec.input_dim));
  const std::size_t layers = model.cells.size();
  const std::size_t hid = model.spec.hidden;
  const std::size_t n = set.chains();
  const bool lstm = model.spec.kind == CellKind::kLstm;
  const auto by_step = detail::predictions_by_step(set);

  std::vector<Vector> logits(set.predictions.size());
  std::vector<Matrix> h(layers, Matrix(hid, n));
  std::vector<Matrix> c(layers, lstm ? Matrix(hid, n) : Matrix());
  if (cache != nullptr) cache->steps.assign(set.length, std::vector<LayerStep>(layers));

  for (std::size_t s = 0; s < set.length; ++s) {
    Matrix in = detail::gather_inputs(seq, set, s);
    for (std::size_t l = 0; l < layers; ++l) {
      LayerStep out;
      cell_forward(model.spec.kind, model.cells[l], in, h[l], c[l], out);
      if (cache != nullptr) {
        out.x = std::move(in);
        out.h_prev = std::move(h[l]);
        out.c_prev = std::move(c[l]);
      }
      h[l] = out.h;
      if (lstm) c[l] = out.c;
      in = out.h;
      if (cache != nullptr) cache->steps[s][l] = std::move(out);
    }
    for (std::size_t i : by_step[s]) {
      logits[i] = output_logits(model, detail::column_of(h[layers - 1], set.predictions[i].chain));
    }
  }
  return logits;
}

// Reverse-mode pass through a cached graph. `dlogits[i]` is the cotangent
// of prediction i (an empty Vector counts as zero). Parameter cotangents
// accumulate into `grads` when given; per-step input cotangents (d x chains)
// are written to `dx` when given.
inline void graph_backward(const ModelParams& model, const ChainSet& set, const GraphCache& cache,
                           const std::vector<Vector>& dlogits, ModelParams* grads,
                           std::vector<Matrix>* dx) {
  if (cache.steps.size() != set.length) throw ConfigError("graph_backward: cache length mismatch");
  if (dlogits.size() != set.predictions.size())
    throw ConfigError("graph_backward: one cotangent per prediction required");
  const std::size_t layers = model.cells.size();
  const std::size_t hid = model.spec.hidden;
  const std::size_t n = set.chains();
  const bool lstm = model.spec.kind == CellKind::kLstm;
  const auto by_step = detail::predictions_by_step(set);

  ModelParams scratch;
  if (grads == nullptr) {
    scratch = zero_params(model.spec);
    grads = &scratch;
  }
  if (dx != nullptr) dx->assign(set.length, Matrix());

  std::vector<Matrix> dh(layers, Matrix(hid, n));
  std::vector<Matrix> dc(layers, lstm ? Matrix(hid, n) : Matrix());
  for (std::size_t s = set.length; s-- > 0;) {
    const auto& top = cache.steps[s][layers - 1];
    for (std::size_t i : by_step[s]) {
      const Vector& g = dlogits[i];
      if (g.dim() == 0) continue;
      const std::size_t b = set.predictions[i].chain;
      detail::require(g.dim() == model.spec.labels, "graph_backward: dlogits dim");
      for (std::size_t k = 0; k < g.dim(); ++k) {
        const double gk = g[k];
        for (std::size_t j = 0; j < hid; ++j) {
          grads->w_out(k, j) += gk * top.h(j, b);
          dh[layers - 1](j, b) += model.w_out(k, j) * gk;
        }
      }
    }
    Matrix from_above;
    for (std::size_t l = layers; l-- > 0;) {
      Matrix dh_in = std::move(dh[l]);
      if (l + 1 < layers) {
        auto dst = dh_in.values();
        auto src = from_above.values();
        for (std::size_t q = 0; q < dst.size(); ++q) dst[q] += src[q];
      }
      Matrix dx_l;
      const Matrix dc_in = lstm ? std::move(dc[l]) : Matrix();
      const bool want_dx = l > 0 || dx != nullptr;
      cell_backward(model.spec.kind, model.cells[l], cache.steps[s][l], dh_in,
                    lstm ? &dc_in : nullptr, grads->cells[l], want_dx ? &dx_l : nullptr, dh[l],
                    lstm ? &dc[l] : nullptr);
      if (l > 0) {
        from_above = std::move(dx_l);
      } else if (dx != nullptr) {
        (*dx)[s] = std::move(dx_l);
      }
    }
  }
}

// Logits for every frame 0..T-1 under the given decode configuration.
inline std::vector<Vector> online_decode(const ModelParams& model, const PaddedSequence& seq,
                                         std::size_t lookahead) {
  return graph_forward(model, seq, online_chain(seq.length(), lookahead));
}

inline std::vector<Vector> batch_decode(const ModelParams& model, const PaddedSequence& seq,
                                        std::size_t context, std::size_t lookahead) {
  if (seq.length() == 0) return {};
  return graph_forward(model, seq,
                       to_chain_set(consecutive_chains(seq.length(), context, lookahead, 1)));
}

inline std::vector<Vector> decode(const ModelParams& model, const PaddedSequence& seq,
                                  const DecodeConfig& cfg) {
  const DecodeConfig d = cfg.for_decoding();
  d.validate();
  return d.mode == DecodeMode::kOnline ? online_decode(model, seq, d.lookahead)
                                       : batch_decode(model, seq, d.context, d.lookahead);
}

}  // namespace rnnlab

#endif  // RNNLAB_GRAPHS_HPP_
