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

// Dense 64-bit linear algebra for small recurrent networks.
//
// Matrices are row-major. A "column batch" is a Matrix whose columns are
// independent vectors (one per decoding chain); every kernel below sums in
// a fixed order per output element, so a column's result does not depend on
// how many other columns travel with it.

#ifndef RNNLAB_NUMERIC_HPP_
#define RNNLAB_NUMERIC_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rnnlab/errors.hpp"

namespace rnnlab {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double fill = 0.0) : data_(dim, fill) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

  std::size_t dim() const { return data_.size(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  bool operator==(const Vector&) const = default;

 private:
  std::vector<double> data_;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ConfigError("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  void set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }
  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline std::ostream& operator<<(std::ostream& os, const Vector& v) {
  os << '(';
  for (std::size_t i = 0; i < v.dim(); ++i) os << (i ? ", " : "") << v[i];
  return os << ')';
}

inline std::ostream& operator<<(std::ostream& os, const Matrix& m) {
  os << '[';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    os << (r ? "; " : "");
    for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? ", " : "") << m(r, c);
  }
  return os << ']';
}

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(std::string("dimension mismatch: ") + what);
}

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace detail

inline bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

// ---------------------------------------------------------------------------
// Single-vector forms.

inline Vector affine(const Matrix& w, const Vector& x) {
  detail::require(w.cols() == x.dim(), "affine: W.cols != x.dim");
  Vector y(w.rows());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < w.cols(); ++j) acc += w(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

// Accumulates dW += dy x^T and dx += W^T dy.
inline void affine_vjp(const Matrix& w, const Vector& x, const Vector& dy, Matrix& dw,
                       Vector& dx) {
  detail::require(w.cols() == x.dim() && w.rows() == dy.dim(), "affine_vjp: operand shapes");
  detail::require(dw.same_shape(w) && dx.dim() == x.dim(), "affine_vjp: cotangent shapes");
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      dw(i, j) += dy[i] * x[j];
      dx[j] += w(i, j) * dy[i];
    }
  }
}

inline Vector logistic(const Vector& x) {
  Vector y(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) y[i] = detail::logistic(x[i]);
  return y;
}

inline Vector tanh(const Vector& x) {
  Vector y(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) y[i] = std::tanh(x[i]);
  return y;
}

// The activation VJPs take the forward *output* y, which is what the cell
// caches keep.
inline Vector logistic_vjp(const Vector& y, const Vector& dy) {
  detail::require(y.dim() == dy.dim(), "logistic_vjp");
  Vector dx(y.dim());
  for (std::size_t i = 0; i < y.dim(); ++i) dx[i] = dy[i] * y[i] * (1.0 - y[i]);
  return dx;
}

inline Vector tanh_vjp(const Vector& y, const Vector& dy) {
  detail::require(y.dim() == dy.dim(), "tanh_vjp");
  Vector dx(y.dim());
  for (std::size_t i = 0; i < y.dim(); ++i) dx[i] = dy[i] * (1.0 - y[i] * y[i]);
  return dx;
}

// ---------------------------------------------------------------------------
// Column-batch kernels. Each output element is accumulated onto its current
// value over the contracted index in ascending order.

namespace detail {

// c (m x n, leading dim ldc) += a (m x k, lda) * b (k x n, ldb), raw row-major.
inline void gemm_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
                     const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  constexpr std::size_t kRows = 4;
  constexpr std::size_t kCols = 4;
  if (n == 1) {
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
      double a0 = c[i * ldc], a1 = c[(i + 1) * ldc], a2 = c[(i + 2) * ldc], a3 = c[(i + 3) * ldc];
      const double* r0 = a + i * lda;
      for (std::size_t p = 0; p < k; ++p) {
        const double bv = b[p * ldb];
        a0 += r0[p] * bv;
        a1 += r0[lda + p] * bv;
        a2 += r0[2 * lda + p] * bv;
        a3 += r0[3 * lda + p] * bv;
      }
      c[i * ldc] = a0;
      c[(i + 1) * ldc] = a1;
      c[(i + 2) * ldc] = a2;
      c[(i + 3) * ldc] = a3;
    }
    for (; i < m; ++i) {
      double acc = c[i * ldc];
      for (std::size_t p = 0; p < k; ++p) acc += a[i * lda + p] * b[p * ldb];
      c[i * ldc] = acc;
    }
    return;
  }
  std::size_t i = 0;
  for (; i + kRows <= m; i += kRows) {
    std::size_t j = 0;
    for (; j + kCols <= n; j += kCols) {
      double acc[kRows][kCols];
      for (std::size_t r = 0; r < kRows; ++r)
        for (std::size_t q = 0; q < kCols; ++q) acc[r][q] = c[(i + r) * ldc + j + q];
      for (std::size_t p = 0; p < k; ++p) {
        const double* bp = b + p * ldb + j;
        for (std::size_t r = 0; r < kRows; ++r) {
          const double av = a[(i + r) * lda + p];
          for (std::size_t q = 0; q < kCols; ++q) acc[r][q] += av * bp[q];
        }
      }
      for (std::size_t r = 0; r < kRows; ++r)
        for (std::size_t q = 0; q < kCols; ++q) c[(i + r) * ldc + j + q] = acc[r][q];
    }
    for (; j < n; ++j)
      for (std::size_t r = 0; r < kRows; ++r) {
        double acc = c[(i + r) * ldc + j];
        for (std::size_t p = 0; p < k; ++p) acc += a[(i + r) * lda + p] * b[p * ldb + j];
        c[(i + r) * ldc + j] = acc;
      }
  }
  for (; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = c[i * ldc + j];
      for (std::size_t p = 0; p < k; ++p) acc += a[i * lda + p] * b[p * ldb + j];
      c[i * ldc + j] = acc;
    }
}

inline Matrix transpose(const Matrix& x) {
  Matrix t(x.cols(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) t(j, i) = x(i, j);
  return t;
}

}  // namespace detail

// out += w * x
inline void matmul_acc(const Matrix& w, const Matrix& x, Matrix& out) {
  detail::require(w.cols() == x.rows() && out.rows() == w.rows() && out.cols() == x.cols(),
                  "matmul_acc");
  detail::gemm_acc(w.rows(), x.cols(), w.cols(), w.values().data(), w.cols(), x.values().data(),
                   x.cols(), out.values().data(), out.cols());
}

// dx += w^T * dy
inline void matmul_tn_acc(const Matrix& w, const Matrix& dy, Matrix& dx) {
  detail::require(w.rows() == dy.rows() && dx.rows() == w.cols() && dx.cols() == dy.cols(),
                  "matmul_tn_acc");
  if (dy.cols() == 1) {
    double* o = dx.values().data();
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const double g = dy(i, 0);
      const double* wr = w.row(i).data();
      for (std::size_t j = 0; j < w.cols(); ++j) o[j] += wr[j] * g;
    }
    return;
  }
  const Matrix wt = detail::transpose(w);
  detail::gemm_acc(wt.rows(), dy.cols(), wt.cols(), wt.values().data(), wt.cols(),
                   dy.values().data(), dy.cols(), dx.values().data(), dx.cols());
}

// dw += dy * x^T
inline void matmul_nt_acc(const Matrix& dy, const Matrix& x, Matrix& dw) {
  detail::require(dy.cols() == x.cols() && dw.rows() == dy.rows() && dw.cols() == x.rows(),
                  "matmul_nt_acc");
  if (dy.cols() == 1) {
    for (std::size_t i = 0; i < dy.rows(); ++i) {
      const double g = dy(i, 0);
      double* dr = dw.row(i).data();
      for (std::size_t j = 0; j < x.rows(); ++j) dr[j] += g * x(j, 0);
    }
    return;
  }
  const Matrix xt = detail::transpose(x);
  detail::gemm_acc(dy.rows(), xt.cols(), dy.cols(), dy.values().data(), dy.cols(),
                   xt.values().data(), xt.cols(), dw.values().data(), dw.cols());
}

// ---------------------------------------------------------------------------
// Output layer loss.

struct XentResult {
  double loss = 0.0;
  Vector probs;
  Vector grad_logits;
};

// Cross entropy of softmax(logits) against a class index, computed as
// logsumexp(logits) - logits[label].
inline XentResult softmax_xent(std::span<const double> logits, std::size_t label) {
  if (label >= logits.size()) {
    throw DataError("label " + std::to_string(label) + " out of range for " +
                    std::to_string(logits.size()) + " classes");
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  XentResult r;
  r.probs = Vector(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) {
    r.probs[k] = std::exp(logits[k] - mx);
    sum += r.probs[k];
  }
  for (std::size_t k = 0; k < logits.size(); ++k) r.probs[k] /= sum;
  r.loss = (mx + std::log(sum)) - logits[label];
  r.grad_logits = r.probs;
  r.grad_logits[label] -= 1.0;
  return r;
}

inline XentResult softmax_xent(const Vector& logits, std::size_t label) {
  return softmax_xent(logits.values(), label);
}

// Lowest index wins ties.
inline std::size_t argmax(std::span<const double> xs) {
  return static_cast<std::size_t>(std::max_element(xs.begin(), xs.end()) - xs.begin());
}

// ---------------------------------------------------------------------------
// Gradient clipping.

inline double global_norm(std::span<const Matrix* const> grads) {
  double sq = 0.0;
  for (const Matrix* g : grads)
    for (double v : g->values()) sq += v * v;
  return std::sqrt(sq);
}

struct ClipResult {
  std::vector<Matrix> grads;
  double norm = 0.0;
  double scale = 1.0;
};

// Scales every entry by max_norm / norm when the joint 2-norm exceeds max_norm.
inline double clip_in_place(std::span<Matrix* const> grads, double max_norm) {
  if (!(max_norm > 0.0)) throw ConfigError("clip norm must be positive");
  std::vector<const Matrix*> view(grads.begin(), grads.end());
  const double norm = global_norm(view);
  if (norm <= max_norm) return 1.0;
  const double scale = max_norm / norm;
  for (Matrix* g : grads)
    for (double& v : g->values()) v *= scale;
  return scale;
}

inline ClipResult global_norm_clip(std::vector<Matrix> grads, double max_norm) {
  ClipResult r;
  r.grads = std::move(grads);
  std::vector<Matrix*> ptrs;
  for (Matrix& g : r.grads) ptrs.push_back(&g);
  std::vector<const Matrix*> cptrs(ptrs.begin(), ptrs.end());
  r.norm = global_norm(cptrs);
  r.scale = clip_in_place(ptrs, max_norm);
  return r;
}

}  // namespace rnnlab

#endif  // RNNLAB_NUMERIC_HPP_
