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

// Vanilla RNN and LSTM cells, stacked networks and the output projection.
//
// Neither cell has bias terms, so for the LSTM a zero input on a zero state
// maps exactly back to the zero state. The graph code relies on this when it
// pads sequences with zero frames.

#ifndef RNNLAB_CELLS_HPP_
#define RNNLAB_CELLS_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rnnlab/errors.hpp"
#include "rnnlab/numeric.hpp"

namespace rnnlab {

enum class CellKind : std::uint32_t { kVanilla = 0, kLstm = 1 };

inline const char* to_string(CellKind k) { return k == CellKind::kLstm ? "lstm" : "vanilla"; }

inline CellKind parse_cell_kind(const std::string& s) {
  if (s == "lstm") return CellKind::kLstm;
  if (s == "vanilla" || s == "rnn") return CellKind::kVanilla;
  throw ConfigError("unknown cell kind '" + s + "' (expected lstm or vanilla)");
}

// Number of pre-activation rows per hidden unit.
inline std::size_t gate_count(CellKind k) { return k == CellKind::kLstm ? 4 : 1; }

// Weights of one recurrent layer. For the vanilla cell u is H x d_in and v is
// H x H. For the LSTM both have 4H rows holding the gate blocks in the order
// (g, i, f, o).
struct CellParams {
  Matrix u;
  Matrix v;

  bool operator==(const CellParams&) const = default;
};

struct CellState {
  Vector h;
  Vector c;  // empty for the vanilla cell

  bool operator==(const CellState&) const = default;
};

struct ModelSpec {
  CellKind kind = CellKind::kLstm;
  std::size_t layers = 1;
  std::size_t hidden = 1;
  std::size_t input_dim = 1;
  std::size_t labels = 1;

  bool operator==(const ModelSpec&) const = default;
};

struct ModelParams {
  ModelSpec spec;
  std::vector<CellParams> cells;
  Matrix w_out;  // labels x hidden

  bool operator==(const ModelParams&) const = default;

  std::vector<Matrix*> tensors() {
    std::vector<Matrix*> out;
    for (auto& c : cells) {
      out.push_back(&c.u);
      out.push_back(&c.v);
    }
    out.push_back(&w_out);
    return out;
  }
  std::vector<const Matrix*> tensors() const {
    std::vector<const Matrix*> out;
    for (const auto& c : cells) {
      out.push_back(&c.u);
      out.push_back(&c.v);
    }
    out.push_back(&w_out);
    return out;
  }
};

inline void validate(const ModelSpec& s) {
  if (s.layers < 1 || s.hidden < 1 || s.input_dim < 1 || s.labels < 1)
    throw ConfigError("model dimensions must all be >= 1");
}

inline ModelParams zero_params(const ModelSpec& s) {
  validate(s);
  ModelParams m;
  m.spec = s;
  const std::size_t rows = gate_count(s.kind) * s.hidden;
  for (std::size_t l = 0; l < s.layers; ++l) {
    const std::size_t in = l == 0 ? s.input_dim : s.hidden;
    m.cells.push_back({Matrix(rows, in), Matrix(rows, s.hidden)});
  }
  m.w_out = Matrix(s.labels, s.hidden);
  return m;
}

// Throws unless every matrix has the shape the spec implies.
inline void validate(const ModelParams& m) {
  validate(m.spec);
  const ModelParams ref = zero_params(m.spec);
  if (m.cells.size() != ref.cells.size()) throw ConfigError("model layer count mismatch");
  for (std::size_t l = 0; l < m.cells.size(); ++l) {
    if (!m.cells[l].u.same_shape(ref.cells[l].u) || !m.cells[l].v.same_shape(ref.cells[l].v))
      throw ConfigError("layer " + std::to_string(l) + " weight shape mismatch");
  }
  if (!m.w_out.same_shape(ref.w_out)) throw ConfigError("output projection shape mismatch");
}

// He initialisation: N(0, 2 / fan_in) with fan_in the column count of each
// matrix, drawn layer by layer (u, v) and then the output projection.
inline ModelParams init_params(const ModelSpec& s, std::uint64_t seed) {
  ModelParams m = zero_params(s);
  std::mt19937_64 rng(seed);
  for (Matrix* w : m.tensors()) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(w->cols())));
    for (double& x : w->values()) x = dist(rng);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Column-batched step. Column b of every matrix belongs to chain b.

struct LayerStep {
  Matrix x;       // d_in x B
  Matrix h_prev;  // H x B
  Matrix c_prev;  // H x B (LSTM)
  Matrix gates;   // post-activation, (gH) x B
  Matrix c;       // H x B (LSTM)
  Matrix tanh_c;  // H x B (LSTM)
  Matrix h;       // H x B
};

inline void cell_forward(CellKind kind, const CellParams& p, const Matrix& x, const Matrix& h_prev,
                         const Matrix& c_prev, LayerStep& out) {
  const std::size_t hid = p.v.cols();
  const std::size_t n = x.cols();
  detail::require(p.u.cols() == x.rows(), "cell input dim");
  detail::require(h_prev.rows() == hid && h_prev.cols() == n, "cell hidden state");
  Matrix pre(p.u.rows(), n);
  matmul_acc(p.u, x, pre);
  matmul_acc(p.v, h_prev, pre);
  if (kind == CellKind::kVanilla) {
    for (double& z : pre.values()) z = detail::logistic(z);
    out.gates = pre;
    out.h = std::move(pre);
    return;
  }
  detail::require(c_prev.rows() == hid && c_prev.cols() == n, "cell memory state");
  for (std::size_t r = 0; r < pre.rows(); ++r) {
    auto row = pre.row(r);
    if (r < hid) {
      for (double& z : row) z = std::tanh(z);
    } else {
      for (double& z : row) z = detail::logistic(z);
    }
  }
  out.c = Matrix(hid, n);
  out.tanh_c = Matrix(hid, n);
  out.h = Matrix(hid, n);
  for (std::size_t k = 0; k < hid; ++k) {
    for (std::size_t b = 0; b < n; ++b) {
      const double g = pre(k, b);
      const double i = pre(hid + k, b);
      const double f = pre(2 * hid + k, b);
      const double o = pre(3 * hid + k, b);
      const double c = i * g + f * c_prev(k, b);
      const double tc = std::tanh(c);
      out.c(k, b) = c;
      out.tanh_c(k, b) = tc;
      out.h(k, b) = o * tc;
    }
  }
  out.gates = std::move(pre);
}

// Reverse of cell_forward. `step` must carry x, h_prev and c_prev as well as
// the outputs. Parameter cotangents accumulate into `grads`; dx (if given),
// dh_prev and dc_prev are overwritten.
inline void cell_backward(CellKind kind, const CellParams& p, const LayerStep& step,
                          const Matrix& dh, const Matrix* dc, CellParams& grads, Matrix* dx,
                          Matrix& dh_prev, Matrix* dc_prev) {
  const std::size_t hid = p.v.cols();
  if (step.gates.size() == 0 || step.x.size() == 0 || step.h_prev.size() == 0)
    throw ConfigError("cell_backward: forward cache missing");
  const std::size_t n = step.h.cols();
  detail::require(dh.rows() == hid && dh.cols() == n, "cell_backward: dh");
  Matrix dpre(p.u.rows(), n);
  if (kind == CellKind::kVanilla) {
    for (std::size_t k = 0; k < hid; ++k)
      for (std::size_t b = 0; b < n; ++b) {
        const double y = step.h(k, b);
        dpre(k, b) = dh(k, b) * y * (1.0 - y);
      }
  } else {
    if (step.c.size() == 0 || step.c_prev.size() == 0)
      throw ConfigError("cell_backward: LSTM memory cache missing");
    if (dc_prev == nullptr) throw ConfigError("cell_backward: LSTM needs a dc_prev output");
    *dc_prev = Matrix(hid, n);
    for (std::size_t k = 0; k < hid; ++k) {
      for (std::size_t b = 0; b < n; ++b) {
        const double g = step.gates(k, b);
        const double i = step.gates(hid + k, b);
        const double f = step.gates(2 * hid + k, b);
        const double o = step.gates(3 * hid + k, b);
        const double tc = step.tanh_c(k, b);
        const double dhk = dh(k, b);
        double dct = dhk * o * (1.0 - tc * tc);
        if (dc != nullptr) dct += (*dc)(k, b);
        const double d_o = dhk * tc;
        const double d_i = dct * g;
        const double d_g = dct * i;
        const double d_f = dct * step.c_prev(k, b);
        (*dc_prev)(k, b) = dct * f;
        dpre(k, b) = d_g * (1.0 - g * g);
        dpre(hid + k, b) = d_i * i * (1.0 - i);
        dpre(2 * hid + k, b) = d_f * f * (1.0 - f);
        dpre(3 * hid + k, b) = d_o * o * (1.0 - o);
      }
    }
  }
  matmul_nt_acc(dpre, step.x, grads.u);
  matmul_nt_acc(dpre, step.h_prev, grads.v);
  if (dx != nullptr) {
    *dx = Matrix(p.u.cols(), n);
    matmul_tn_acc(p.u, dpre, *dx);
  }
  dh_prev = Matrix(hid, n);
  matmul_tn_acc(p.v, dpre, dh_prev);
}

// ---------------------------------------------------------------------------
// Single-vector API.

namespace detail {

inline Matrix column(const Vector& v) {
  Matrix m(v.dim(), 1);
  for (std::size_t i = 0; i < v.dim(); ++i) m(i, 0) = v[i];
  return m;
}

inline Vector to_vector(const Matrix& m) {
  return Vector(std::vector<double>(m.values().begin(), m.values().end()));
}

}  // namespace detail

// h = logistic(U x + V h_prev)
inline Vector rnn_step(const CellParams& p, const Vector& h_prev, const Vector& x) {
  detail::require(p.u.rows() == p.v.rows() && p.v.rows() == p.v.cols(), "rnn_step: params");
  LayerStep s;
  cell_forward(CellKind::kVanilla, p, detail::column(x), detail::column(h_prev), Matrix(), s);
  return detail::to_vector(s.h);
}

inline CellState lstm_step(const CellParams& p, const CellState& state, const Vector& x) {
  detail::require(p.u.rows() == 4 * p.v.cols() && p.v.rows() == p.u.rows(), "lstm_step: params");
  detail::require(state.c.dim() == state.h.dim(), "lstm_step: state");
  LayerStep s;
  cell_forward(CellKind::kLstm, p, detail::column(x), detail::column(state.h),
               detail::column(state.c), s);
  return {detail::to_vector(s.h), detail::to_vector(s.c)};
}

inline CellState zero_state(const ModelSpec& s) {
  return {Vector(s.hidden), s.kind == CellKind::kLstm ? Vector(s.hidden) : Vector()};
}

struct StackStepResult {
  std::vector<CellState> states;
  Vector top_h;
};

inline StackStepResult stack_step(const ModelParams& model, const std::vector<CellState>& states,
                                  const Vector& x) {
  if (states.size() != model.cells.size())
    throw ConfigError("stack_step: expected " + std::to_string(model.cells.size()) +
                      " layer states, got " + std::to_string(states.size()));
  StackStepResult r;
  Vector in = x;
  for (std::size_t l = 0; l < model.cells.size(); ++l) {
    if (model.spec.kind == CellKind::kLstm) {
      r.states.push_back(lstm_step(model.cells[l], states[l], in));
    } else {
      r.states.push_back({rnn_step(model.cells[l], states[l].h, in), Vector()});
    }
    in = r.states.back().h;
  }
  r.top_h = in;
  return r;
}

inline Vector output_logits(const ModelParams& model, const Vector& h) {
  return affine(model.w_out, h);
}

// Cotangents of one single-vector cell step.
struct StepCotangents {
  Vector dx;
  Vector dh_prev;
  Vector dc_prev;  // empty for the vanilla cell
};

inline StepCotangents cell_step_vjp(CellKind kind, const CellParams& p, const CellState& state,
                                    const Vector& x, const Vector& dh, const Vector& dc,
                                    CellParams& grads) {
  LayerStep s;
  const Matrix cprev = kind == CellKind::kLstm ? detail::column(state.c) : Matrix();
  cell_forward(kind, p, detail::column(x), detail::column(state.h), cprev, s);
  s.x = detail::column(x);
  s.h_prev = detail::column(state.h);
  s.c_prev = cprev;
  Matrix mdx, mdh, mdc;
  const Matrix mdc_in = kind == CellKind::kLstm ? detail::column(dc) : Matrix();
  cell_backward(kind, p, s, detail::column(dh), kind == CellKind::kLstm ? &mdc_in : nullptr, grads,
                &mdx, mdh, kind == CellKind::kLstm ? &mdc : nullptr);
  StepCotangents r{detail::to_vector(mdx), detail::to_vector(mdh), Vector()};
  if (kind == CellKind::kLstm) r.dc_prev = detail::to_vector(mdc);
  return r;
}

}  // namespace rnnlab

#endif  // RNNLAB_CELLS_HPP_
