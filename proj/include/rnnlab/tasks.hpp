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

// Synthetic frame-labelling tasks with known Bayes ceilings.
//
//   markov  y_t is a frozen random function of the last `order` symbols.
//   modsum  y_t is the prefix sum of the symbols modulo `classes`; it has a
//           constant-size recursive form but no fixed Markov order.
//   future  y_t is the symbol `future_lookahead - 1` frames ahead, or the pad
//           class past the end of the sequence.
//
// Frames are one-hot symbol codes plus isotropic Gaussian noise.

#ifndef RNNLAB_TASKS_HPP_
#define RNNLAB_TASKS_HPP_

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rnnlab/errors.hpp"
#include "rnnlab/numeric.hpp"

namespace rnnlab {

struct LabeledSequence {
  Matrix frames;  // T x d
  std::vector<std::size_t> labels;

  std::size_t length() const { return labels.size(); }
  bool operator==(const LabeledSequence&) const = default;
};

struct Dataset {
  std::size_t dim = 0;
  std::size_t classes = 0;
  std::vector<LabeledSequence> sequences;
  std::vector<std::size_t> table;  // markov labelling table, may be empty

  std::size_t frame_count() const {
    std::size_t n = 0;
    for (const auto& s : sequences) n += s.length();
    return n;
  }
  bool operator==(const Dataset&) const = default;
};

inline void validate(const Dataset& ds) {
  for (std::size_t i = 0; i < ds.sequences.size(); ++i) {
    const auto& s = ds.sequences[i];
    if (s.frames.rows() != s.labels.size() || (s.length() > 0 && s.frames.cols() != ds.dim))
      throw DataError("sequence " + std::to_string(i) + ": frame/label shape mismatch");
    for (std::size_t t = 0; t < s.length(); ++t)
      if (s.labels[t] >= ds.classes)
        throw DataError("sequence " + std::to_string(i) + " frame " + std::to_string(t) +
                        ": label " + std::to_string(s.labels[t]) + " >= " +
                        std::to_string(ds.classes));
    if (!all_finite(s.frames.values()))
      throw DataError("sequence " + std::to_string(i) + ": non-finite frame value");
  }
}

enum class TaskKind { kMarkov, kModSum, kFuture };

inline const char* to_string(TaskKind k) {
  switch (k) {
    case TaskKind::kMarkov: return "markov";
    case TaskKind::kModSum: return "modsum";
    case TaskKind::kFuture: return "future";
  }
  return "?";
}

inline TaskKind parse_task_kind(const std::string& s) {
  if (s == "markov") return TaskKind::kMarkov;
  if (s == "modsum") return TaskKind::kModSum;
  if (s == "future") return TaskKind::kFuture;
  throw ConfigError("unknown task '" + s + "' (expected markov, modsum or future)");
}

struct TaskSpec {
  TaskKind kind = TaskKind::kMarkov;
  std::size_t alphabet = 4;          // symbols; modsum uses `classes` instead
  std::size_t classes = 4;           // future derives alphabet + 1
  std::size_t order = 1;             // markov
  std::size_t future_lookahead = 2;  // future
  double noise = 0.1;
  std::size_t length = 100;
  std::size_t count = 100;
  std::uint64_t seed = 1;

  std::size_t symbols() const { return kind == TaskKind::kModSum ? classes : alphabet; }
  std::size_t frame_dim() const { return symbols(); }
  std::size_t label_count() const { return kind == TaskKind::kFuture ? alphabet + 1 : classes; }

  void validate() const {
    if (symbols() < 1 || label_count() < 1 || length < 1 || count < 1)
      throw ConfigError("task counts must be >= 1");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("noise must be finite and >= 0");
    if (kind == TaskKind::kMarkov && order < 1) throw ConfigError("markov order must be >= 1");
    if (kind == TaskKind::kFuture && future_lookahead < 2)
      throw ConfigError("future lookahead must be >= 2");
  }
};

// Frozen labelling table over windows of the last min(t+1, order) symbols.
// Windows shorter than `order` only occur at the left boundary, where the
// missing symbols are the reserved pad symbol; they get their own entries.
// Index layout: all windows of length 1, then length 2, ..., each block in
// base-`alphabet` order with the oldest symbol most significant.
class MarkovTable {
 public:
  static constexpr double kMaxWindows = 1e6;

  MarkovTable(std::size_t alphabet, std::size_t order, std::vector<std::size_t> classes)
      : alphabet_(alphabet), order_(order), classes_(std::move(classes)) {
    if (std::pow(static_cast<double>(alphabet), static_cast<double>(order)) > kMaxWindows)
      throw ConfigError("markov table too large: alphabet^order > 1e6");
    offsets_.assign(order + 2, 0);
    std::size_t block = 1;
    for (std::size_t m = 1; m <= order; ++m) {
      block *= alphabet;
      offsets_[m + 1] = offsets_[m] + block;
    }
    if (classes_.size() != offsets_[order + 1])
      throw ConfigError("markov table has " + std::to_string(classes_.size()) + " entries, expected " +
                        std::to_string(offsets_[order + 1]));
  }

  static std::size_t entry_count(std::size_t alphabet, std::size_t order) {
    std::size_t n = 0, block = 1;
    for (std::size_t m = 1; m <= order; ++m) n += (block *= alphabet);
    return n;
  }

  std::size_t alphabet() const { return alphabet_; }
  std::size_t order() const { return order_; }
  const std::vector<std::size_t>& entries() const { return classes_; }
  std::size_t offset(std::size_t m) const { return offsets_[m]; }

  // `window` holds the last m symbols, oldest first; 1 <= m <= order.
  std::size_t index(std::span<const std::size_t> window) const {
    std::size_t code = 0;
    for (std::size_t s : window) code = code * alphabet_ + s;
    return offsets_[window.size()] + code;
  }

  std::size_t label(std::span<const std::size_t> symbols, std::size_t t) const {
    const std::size_t m = std::min(t + 1, order_);
    return classes_[index(symbols.subspan(t + 1 - m, m))];
  }

 private:
  std::size_t alphabet_;
  std::size_t order_;
  std::vector<std::size_t> classes_;
  std::vector<std::size_t> offsets_;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
}

inline constexpr std::uint64_t kTableStream = 0x7ab1eULL << 32;

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline Matrix encode_frames(const std::vector<std::size_t>& symbols, std::size_t dim, double noise,
                            std::mt19937_64& rng) {
  Matrix f(symbols.size(), dim);
  std::normal_distribution<double> gauss(0.0, noise > 0.0 ? noise : 1.0);
  for (std::size_t t = 0; t < symbols.size(); ++t) {
    for (std::size_t k = 0; k < dim; ++k) {
      f(t, k) = (k == symbols[t] ? 1.0 : 0.0) + (noise > 0.0 ? gauss(rng) : 0.0);
    }
  }
  return f;
}

}  // namespace detail

// Generated data plus the symbol streams behind the frames.
struct GeneratedTask {
  Dataset dataset;
  std::vector<std::vector<std::size_t>> symbols;
};

inline MarkovTable random_markov_table(const TaskSpec& spec) {
  const std::size_t n = MarkovTable::entry_count(spec.alphabet, spec.order);
  if (std::pow(static_cast<double>(spec.alphabet), static_cast<double>(spec.order)) >
      MarkovTable::kMaxWindows)
    throw ConfigError("markov table too large: alphabet^order > 1e6");
  std::mt19937_64 rng(detail::mix_seed(spec.seed, detail::kTableStream));
  std::vector<std::size_t> cls(n);
  for (auto& c : cls) c = detail::uniform_index(rng, spec.classes);
  return MarkovTable(spec.alphabet, spec.order, std::move(cls));
}

namespace detail {

template <typename LabelFn>
GeneratedTask generate(const TaskSpec& spec, LabelFn&& label_of) {
  spec.validate();
  GeneratedTask g;
  g.dataset.dim = spec.frame_dim();
  g.dataset.classes = spec.label_count();
  for (std::size_t i = 0; i < spec.count; ++i) {
    std::mt19937_64 rng(mix_seed(spec.seed, i));
    std::vector<std::size_t> sym(spec.length);
    for (auto& s : sym) s = uniform_index(rng, spec.symbols());
    LabeledSequence seq;
    seq.labels = label_of(sym);
    seq.frames = encode_frames(sym, spec.frame_dim(), spec.noise, rng);
    g.dataset.sequences.push_back(std::move(seq));
    g.symbols.push_back(std::move(sym));
  }
  return g;
}

}  // namespace detail

// Label functions over symbol streams.
inline std::vector<std::size_t> modsum_labels(std::span<const std::size_t> sym,
                                              std::size_t classes) {
  std::vector<std::size_t> y(sym.size());
  std::size_t acc = 0;
  for (std::size_t t = 0; t < sym.size(); ++t) y[t] = acc = (acc + sym[t]) % classes;
  return y;
}

// Symbol at t + lookahead - 1, or `pad` past the end.
inline std::vector<std::size_t> future_labels(std::span<const std::size_t> sym,
                                              std::size_t lookahead, std::size_t pad) {
  std::vector<std::size_t> y(sym.size());
  for (std::size_t t = 0; t < sym.size(); ++t) {
    const std::size_t src = t + lookahead - 1;
    y[t] = src < sym.size() ? sym[src] : pad;
  }
  return y;
}

inline GeneratedTask gen_markov(const TaskSpec& spec, std::optional<MarkovTable> table = {}) {
  if (spec.kind != TaskKind::kMarkov) throw ConfigError("gen_markov: task kind is not markov");
  spec.validate();
  const MarkovTable tab = table ? *table : random_markov_table(spec);
  if (tab.alphabet() != spec.alphabet || tab.order() != spec.order)
    throw ConfigError("gen_markov: table does not match task");
  for (std::size_t c : tab.entries())
    if (c >= spec.classes) throw ConfigError("gen_markov: table class out of range");
  GeneratedTask g = detail::generate(spec, [&](const std::vector<std::size_t>& sym) {
    std::vector<std::size_t> y(sym.size());
    for (std::size_t t = 0; t < sym.size(); ++t) y[t] = tab.label(sym, t);
    return y;
  });
  g.dataset.table = tab.entries();
  return g;
}

inline GeneratedTask gen_modsum(const TaskSpec& spec) {
  if (spec.kind != TaskKind::kModSum) throw ConfigError("gen_modsum: task kind is not modsum");
  return detail::generate(
      spec, [&](const std::vector<std::size_t>& sym) { return modsum_labels(sym, spec.classes); });
}

inline GeneratedTask gen_future(const TaskSpec& spec) {
  if (spec.kind != TaskKind::kFuture) throw ConfigError("gen_future: task kind is not future");
  return detail::generate(spec, [&](const std::vector<std::size_t>& sym) {
    return future_labels(sym, spec.future_lookahead, spec.alphabet);
  });
}

inline GeneratedTask generate_task(const TaskSpec& spec) {
  switch (spec.kind) {
    case TaskKind::kMarkov: return gen_markov(spec);
    case TaskKind::kModSum: return gen_modsum(spec);
    case TaskKind::kFuture: return gen_future(spec);
  }
  throw ConfigError("unknown task kind");
}

// ---------------------------------------------------------------------------
// Bayes oracle.

// Frames visible to a predictor of y_t: `past` frames ending at t (t
// included) and `future` frames after t. kUnbounded past is the online case.
struct OracleWindow {
  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();
  std::size_t past = kUnbounded;
  std::size_t future = 0;
};

struct OracleOptions {
  bool monte_carlo = false;
  std::size_t sequences = 1000;  // Monte-Carlo sequences of spec.length
  std::uint64_t seed = 7;
};

struct OracleResult {
  double accuracy = 0.0;           // averaged over positions 1..T
  double interior_accuracy = 0.0;  // positions clear of both boundaries
  double std_error = 0.0;          // of accuracy; 0 when exact
  double interior_std_error = 0.0;
  std::size_t positions = 0;
  std::size_t interior_positions = 0;
  bool monte_carlo = false;
};

namespace detail {

// For a markov table: the best class for each visible suffix of v symbols
// within windows of m symbols, and the resulting accuracy.
struct SuffixRule {
  std::vector<std::size_t> best;
  double accuracy = 1.0;
};

inline SuffixRule markov_suffix_rule(const MarkovTable& tab, std::size_t classes, std::size_t m,
                                     std::size_t v) {
  SuffixRule r;
  const std::size_t a = tab.alphabet();
  std::size_t full = 1, suffixes = 1;
  for (std::size_t i = 0; i < m; ++i) full *= a;
  for (std::size_t i = 0; i < v; ++i) suffixes *= a;
  std::vector<std::size_t> counts(suffixes * classes, 0);
  for (std::size_t code = 0; code < full; ++code) {
    const std::size_t cls = tab.entries()[tab.offset(m) + code];
    ++counts[(code % suffixes) * classes + cls];
  }
  r.best.resize(suffixes);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < suffixes; ++s) {
    const auto first = counts.begin() + static_cast<std::ptrdiff_t>(s * classes);
    const auto it = std::max_element(first, first + static_cast<std::ptrdiff_t>(classes));
    r.best[s] = static_cast<std::size_t>(it - first);
    hits += *it;
  }
  r.accuracy = static_cast<double>(hits) / static_cast<double>(full);
  return r;
}

inline std::size_t visible_past(const OracleWindow& w, std::size_t tau) {
  return std::min(w.past, tau);
}

}  // namespace detail

// Best achievable frame accuracy when y_t may depend only on the frames in
// `window`. The predictor is assumed to know its position in the sequence,
// so boundary positions are scored optimistically; `interior_accuracy`
// excludes them. Exact mode enumerates and needs noiseless frames;
// Monte-Carlo mode simulates `options.sequences` sequences, decodes each
// noisy frame to its nearest symbol and applies the noiseless Bayes rule.
inline OracleResult bayes_oracle(const TaskSpec& spec, const OracleWindow& window,
                                 const std::vector<std::size_t>& table = {},
                                 const OracleOptions& options = {}) {
  spec.validate();
  if (window.past < 1) throw ConfigError("oracle window must include the current frame");
  std::optional<MarkovTable> tab;
  if (spec.kind == TaskKind::kMarkov) {
    if (std::pow(static_cast<double>(spec.alphabet), static_cast<double>(spec.order)) >
        MarkovTable::kMaxWindows)
      throw ConfigError("oracle enumeration infeasible: alphabet^order > 1e6");
    tab.emplace(spec.alphabet, spec.order, table.empty() ? random_markov_table(spec).entries()
                                                         : table);
  }
  if (!options.monte_carlo && spec.noise != 0.0)
    throw ConfigError("exact oracle requires noise = 0; use Monte-Carlo mode");

  const std::size_t len = spec.length;
  const std::size_t a = spec.symbols();
  // Rules for markov positions, keyed by (m, v).
  std::vector<std::vector<std::optional<detail::SuffixRule>>> rules;
  auto markov_rule = [&](std::size_t m, std::size_t v) -> const detail::SuffixRule& {
    if (rules.empty()) rules.assign(spec.order + 1, std::vector<std::optional<detail::SuffixRule>>(spec.order + 1));
    auto& slot = rules[m][v];
    if (!slot) slot = detail::markov_suffix_rule(*tab, spec.classes, m, v);
    return *slot;
  };

  // Expected accuracy at 1-based position tau, plus whether tau is interior.
  auto exact_at = [&](std::size_t tau) -> std::pair<double, bool> {
    const std::size_t vis = detail::visible_past(window, tau);
    switch (spec.kind) {
      case TaskKind::kMarkov: {
        const std::size_t m = std::min(tau, spec.order);
        const bool interior = tau >= spec.order;
        return {vis >= m ? 1.0 : markov_rule(m, vis).accuracy, interior};
      }
      case TaskKind::kModSum: {
        const bool interior = tau > std::min(window.past, len);
        return {vis >= tau ? 1.0 : 1.0 / static_cast<double>(a), interior};
      }
      case TaskKind::kFuture: {
        const bool past_end = tau + spec.future_lookahead - 1 > len;
        if (past_end) return {1.0, false};
        const bool seen = spec.future_lookahead - 1 <= window.future;
        return {seen ? 1.0 : 1.0 / static_cast<double>(a), true};
      }
    }
    return {0.0, false};
  };

  OracleResult r;
  r.monte_carlo = options.monte_carlo;
  if (!options.monte_carlo) {
    double sum = 0.0, isum = 0.0;
    for (std::size_t tau = 1; tau <= len; ++tau) {
      const auto [acc, interior] = exact_at(tau);
      sum += acc;
      if (interior) {
        isum += acc;
        ++r.interior_positions;
      }
    }
    r.positions = len;
    r.accuracy = sum / static_cast<double>(len);
    r.interior_accuracy = r.interior_positions ? isum / static_cast<double>(r.interior_positions)
                                               : r.accuracy;
    return r;
  }

  // Monte-Carlo: simulate, decode symbols by argmax, apply the Bayes rule.
  TaskSpec sim = spec;
  sim.count = options.sequences;
  sim.seed = options.seed;
  GeneratedTask g = spec.kind == TaskKind::kMarkov ? gen_markov(sim, *tab) : generate_task(sim);
  std::size_t hits = 0, ihits = 0;
  for (const auto& seq : g.dataset.sequences) {
    std::vector<std::size_t> sym(seq.length());
    for (std::size_t t = 0; t < seq.length(); ++t) sym[t] = argmax(seq.frames.row(t));
    for (std::size_t t = 0; t < seq.length(); ++t) {
      const std::size_t tau = t + 1;
      const std::size_t vis = detail::visible_past(window, tau);
      bool interior = true;
      std::size_t guess = 0;
      switch (spec.kind) {
        case TaskKind::kMarkov: {
          const std::size_t m = std::min(tau, spec.order);
          interior = tau >= spec.order;
          if (vis >= m) {
            guess = tab->label(sym, t);
          } else {
            std::size_t code = 0;
            for (std::size_t q = tau - vis; q < tau; ++q) code = code * a + sym[q];
            guess = markov_rule(m, vis).best[code];
          }
          break;
        }
        case TaskKind::kModSum: {
          interior = tau > std::min(window.past, len);
          std::size_t acc = 0;
          for (std::size_t q = tau - vis; q < tau; ++q) acc = (acc + sym[q]) % spec.classes;
          guess = acc;
          break;
        }
        case TaskKind::kFuture: {
          const std::size_t src = t + spec.future_lookahead - 1;
          if (src >= len) {
            guess = spec.alphabet;
            interior = false;
          } else {
            guess = spec.future_lookahead - 1 <= window.future ? sym[src] : 0;
          }
          break;
        }
      }
      const bool ok = guess == seq.labels[t];
      hits += ok;
      if (interior) {
        ihits += ok;
        ++r.interior_positions;
      }
      ++r.positions;
    }
  }
  auto se = [](double p, std::size_t n) {
    return n ? std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
  };
  r.accuracy = static_cast<double>(hits) / static_cast<double>(r.positions);
  r.interior_accuracy = r.interior_positions ? static_cast<double>(ihits) /
                                                   static_cast<double>(r.interior_positions)
                                             : r.accuracy;
  r.std_error = se(r.accuracy, r.positions);
  r.interior_std_error = se(r.interior_accuracy, r.interior_positions);
  return r;
}

// ---------------------------------------------------------------------------
// Dataset text format.
//
//   rnnlab-dataset v1 d=<d> C=<C> N=<N>
//   seq <T>
//   <label>\t<f_1> ... <f_d>        (T records, %.17g)
//   ...
//   table <window-index> <class>    (optional, markov only)

inline void write_dataset(std::ostream& os, const Dataset& ds) {
  validate(ds);
  os << "rnnlab-dataset v1 d=" << ds.dim << " C=" << ds.classes << " N=" << ds.sequences.size()
     << "\n";
  char buf[32];
  for (const auto& s : ds.sequences) {
    os << "seq " << s.length() << "\n";
    for (std::size_t t = 0; t < s.length(); ++t) {
      os << s.labels[t] << '\t';
      for (std::size_t k = 0; k < ds.dim; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", s.frames(t, k));
        if (k) os << ' ';
        os << buf;
      }
      os << '\n';
    }
  }
  for (std::size_t i = 0; i < ds.table.size(); ++i) os << "table " << i << ' ' << ds.table[i] << '\n';
}

inline void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  write_dataset(os, ds);
  if (!os) throw DataError("write to '" + path + "' failed");
}

inline Dataset read_dataset(std::istream& is, const std::string& name = "<stream>") {
  std::size_t line_no = 0;
  std::string line;
  auto fail = [&](const std::string& msg) -> DataError {
    return DataError(name + ":" + std::to_string(line_no) + ": " + msg);
  };
  auto next = [&]() -> bool {
    if (!std::getline(is, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next()) throw fail("empty file");
  Dataset ds;
  std::size_t n = 0;
  if (std::sscanf(line.c_str(), "rnnlab-dataset v1 d=%zu C=%zu N=%zu", &ds.dim, &ds.classes, &n) != 3)
    throw fail("bad header (expected 'rnnlab-dataset v1 d=<d> C=<C> N=<N>')");
  if (ds.classes < 1 || ds.dim < 1) throw fail("header dims must be >= 1");
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t len = 0;
    if (!next()) throw fail("missing sequence " + std::to_string(i));
    char tail = 0;
    if (std::sscanf(line.c_str(), "seq %zu %c", &len, &tail) != 1)
      throw fail("expected 'seq <T>' for sequence " + std::to_string(i));
    LabeledSequence s;
    s.frames = Matrix(len, ds.dim);
    s.labels.resize(len);
    for (std::size_t t = 0; t < len; ++t) {
      const std::string where = "sequence " + std::to_string(i) + " record " + std::to_string(t);
      if (!next()) throw fail("truncated at " + where);
      const char* p = line.c_str();
      char* endp = nullptr;
      errno = 0;
      const long long lab = std::strtoll(p, &endp, 10);
      if (endp == p || *endp != '\t' || lab < 0) throw fail(where + ": bad label field");
      if (static_cast<std::size_t>(lab) >= ds.classes)
        throw fail(where + ": label " + std::to_string(lab) + " >= C=" + std::to_string(ds.classes));
      s.labels[t] = static_cast<std::size_t>(lab);
      p = endp + 1;
      for (std::size_t k = 0; k < ds.dim; ++k) {
        const double v = std::strtod(p, &endp);
        if (endp == p) throw fail(where + ": expected " + std::to_string(ds.dim) + " values");
        if (!std::isfinite(v)) throw fail(where + ": non-finite value");
        s.frames(t, k) = v;
        p = endp;
      }
      while (*p == ' ' || *p == '\t') ++p;
      if (*p != '\0') throw fail(where + ": trailing data");
    }
    ds.sequences.push_back(std::move(s));
  }
  while (next()) {
    if (line.empty()) continue;
    std::size_t idx = 0, cls = 0;
    char tail = 0;
    if (std::sscanf(line.c_str(), "table %zu %zu %c", &idx, &cls, &tail) != 2)
      throw fail("unexpected content after " + std::to_string(n) + " sequences");
    if (idx != ds.table.size()) throw fail("table indices must be consecutive");
    if (cls >= ds.classes) throw fail("table class out of range");
    ds.table.push_back(cls);
  }
  return ds;
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open dataset '" + path + "'");
  return read_dataset(is, path);
}

// 80/10/10 split by sequence index.
struct DatasetSplits {
  Dataset train, dev, test;
};

inline DatasetSplits split_dataset(const Dataset& ds) {
  DatasetSplits s;
  for (Dataset* d : {&s.train, &s.dev, &s.test}) {
    d->dim = ds.dim;
    d->classes = ds.classes;
    d->table = ds.table;
  }
  const std::size_t n = ds.sequences.size();
  const std::size_t a = n * 8 / 10, b = n * 9 / 10;
  for (std::size_t i = 0; i < n; ++i)
    (i < a ? s.train : i < b ? s.dev : s.test).sequences.push_back(ds.sequences[i]);
  return s;
}

}  // namespace rnnlab

#endif  // RNNLAB_TASKS_HPP_
