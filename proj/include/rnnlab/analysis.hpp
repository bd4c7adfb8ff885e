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

// Gradient probes and evaluation tables.
//
// A model that realises a fixed-order Markov function must have zero
// gradient with respect to inputs older than its order. The probes here
// measure ||d loss_t / d x_{t - delta}|| exactly through a decoding graph so
// that condition can be checked on trained models.

#ifndef RNNLAB_ANALYSIS_HPP_
#define RNNLAB_ANALYSIS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rnnlab/cells.hpp"
#include "rnnlab/errors.hpp"
#include "rnnlab/graphs.hpp"
#include "rnnlab/metrics.hpp"
#include "rnnlab/numeric.hpp"
#include "rnnlab/parallel.hpp"
#include "rnnlab/tasks.hpp"

namespace rnnlab {

// For each sampled prediction time t, the input-gradient norm at every offset
// 0..max_delta; entries with t - delta < 0 are NaN.
struct SampleGradients {
  std::vector<std::size_t> times;
  std::vector<std::vector<double>> norms;  // [sample][delta]
};

namespace detail {

inline double column_norm(const Matrix& m, std::size_t b) {
  double sq = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) sq += m(r, b) * m(r, b);
  return std::sqrt(sq);
}

// Gradient norms of the per-frame loss of prediction `pred` w.r.t. every input
// frame, read off one backward pass.
inline std::vector<double> frame_gradient_norms(const ModelParams& model, const ChainSet& set,
                                                const GraphCache& cache,
                                                const std::vector<Vector>& logits,
                                                const LabeledSequence& utt, std::size_t pred,
                                                std::size_t max_delta) {
  const auto& p = set.predictions[pred];
  std::vector<Vector> dlogits(set.predictions.size());
  dlogits[pred] = softmax_xent(logits[pred], utt.labels[p.frame]).grad_logits;
  std::vector<Matrix> dx;
  graph_backward(model, set, cache, dlogits, nullptr, &dx);
  std::vector<double> out(max_delta + 1, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t d = 0; d <= max_delta && d <= p.frame; ++d) {
    const std::ptrdiff_t frame = static_cast<std::ptrdiff_t>(p.frame - d);
    const std::ptrdiff_t step = frame - set.starts[p.chain];
    // Frames outside the chain are not part of the graph.
    out[d] = step < 0 || step >= static_cast<std::ptrdiff_t>(set.length)
                 ? 0.0
                 : column_norm(dx[static_cast<std::size_t>(step)], p.chain);
  }
  return out;
}

}  // namespace detail

// Samples prediction times 0, stride, 2*stride, ... and differentiates each
// one's loss. Online graphs share one forward pass; a batch graph builds the
// single chain that serves the sampled prediction.
inline SampleGradients sample_input_gradients(const ModelParams& model, const LabeledSequence& utt,
                                              const DecodeConfig& decode, std::size_t stride,
                                              std::size_t max_delta) {
  if (stride < 1) throw ConfigError("probe stride must be >= 1");
  const DecodeConfig cfg = decode.for_decoding();
  cfg.validate();
  SampleGradients out;
  const std::size_t len = utt.length();
  if (len == 0) return out;
  const PaddedSequence seq(utt.frames);
  if (cfg.mode == DecodeMode::kOnline) {
    const ChainSet set = online_chain(len, cfg.lookahead);
    GraphCache cache;
    const auto logits = graph_forward(model, seq, set, &cache);
    for (std::size_t t = 0; t < len; t += stride) {
      out.times.push_back(t);
      out.norms.push_back(
          detail::frame_gradient_norms(model, set, cache, logits, utt, t, max_delta));
    }
    return out;
  }
  const auto layouts = consecutive_chains(len, cfg.context, cfg.lookahead, 1);
  for (std::size_t t = 0; t < len; t += stride) {
    const ChainSet set = to_chain_set({layouts[t]});
    GraphCache cache;
    const auto logits = graph_forward(model, seq, set, &cache);
    out.times.push_back(t);
    out.norms.push_back(detail::frame_gradient_norms(model, set, cache, logits, utt, 0, max_delta));
  }
  return out;
}

struct GradientReport {
  std::size_t delta = 0;
  std::vector<double> norms;
  std::size_t skipped = 0;  // sampled t with t - delta < 0
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
  double median = 0.0;
  double max = 0.0;
};

inline double median_of(std::vector<double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// Equal-width bins over [0, upper]; upper defaults to the largest norm (or 1
// when every norm is zero). Values above `upper` land in the last bin.
inline void fill_histogram(GradientReport& r, std::size_t bins,
                           std::optional<double> upper = std::nullopt) {
  if (bins < 2) throw ConfigError("histogram needs at least 2 bins");
  r.max = r.norms.empty() ? 0.0 : *std::max_element(r.norms.begin(), r.norms.end());
  r.median = median_of(r.norms);
  double hi = upper ? *upper : r.max;
  if (!(hi > 0.0)) hi = 1.0;
  r.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b)
    r.bin_edges[b] = hi * static_cast<double>(b) / static_cast<double>(bins);
  r.counts.assign(bins, 0);
  for (double v : r.norms) {
    auto b = static_cast<std::size_t>(v / hi * static_cast<double>(bins));
    ++r.counts[std::min(b, bins - 1)];
  }
}

inline GradientReport input_gradient_norms(const ModelParams& model, const LabeledSequence& utt,
                                           const DecodeConfig& decode, std::size_t delta,
                                           std::size_t stride = 5) {
  const SampleGradients g = sample_input_gradients(model, utt, decode, stride, delta);
  GradientReport r;
  r.delta = delta;
  for (std::size_t i = 0; i < g.times.size(); ++i) {
    if (g.times[i] < delta) {
      ++r.skipped;
    } else {
      r.norms.push_back(g.norms[i][delta]);
    }
  }
  r.max = r.norms.empty() ? 0.0 : *std::max_element(r.norms.begin(), r.norms.end());
  r.median = median_of(r.norms);
  return r;
}

// Norms pooled over a dataset, in sequence order.
inline GradientReport gradient_histogram(const ModelParams& model, const Dataset& ds,
                                         const DecodeConfig& decode, std::size_t delta,
                                         std::size_t bins, std::size_t stride = 5,
                                         std::optional<double> upper = std::nullopt) {
  check_compatible(model, ds);
  std::vector<GradientReport> parts(ds.sequences.size());
  parallel_for(ds.sequences.size(), [&](std::size_t i) {
    parts[i] = input_gradient_norms(model, ds.sequences[i], decode, delta, stride);
  });
  GradientReport r;
  r.delta = delta;
  for (const auto& p : parts) {
    r.norms.insert(r.norms.end(), p.norms.begin(), p.norms.end());
    r.skipped += p.skipped;
  }
  fill_histogram(r, bins, upper);
  return r;
}

inline void write_histogram(std::ostream& os, const GradientReport& r) {
  os << "# bin_lo\tbin_hi\tcount\tlog10_count\n";
  char buf[128];
  for (std::size_t b = 0; b < r.counts.size(); ++b) {
    if (r.counts[b] == 0) {
      std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t0\t-inf\n", r.bin_edges[b], r.bin_edges[b + 1]);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t%zu\t%.17g\n", r.bin_edges[b],
                    r.bin_edges[b + 1], r.counts[b], std::log10(static_cast<double>(r.counts[b])));
    }
    os << buf;
  }
}

inline void write_gradient_summary(std::ostream& os, const GradientReport& r) {
  os << "# delta\tsamples\tskipped\tmedian\tmax\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu\t%zu\t%zu\t%.17g\t%.17g\n", r.delta, r.norms.size(),
                r.skipped, r.median, r.max);
  os << buf;
}

inline void write_norms(std::ostream& os, const GradientReport& r) {
  os << "# norm\n";
  char buf[40];
  for (double v : r.norms) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    os << buf;
  }
}

// ---------------------------------------------------------------------------

struct MarkovOrderOptions {
  std::size_t max_delta = 40;
  std::size_t stride = 5;
  std::optional<double> epsilon;  // default: 1e-6 * median norm at delta 0
};

struct MarkovOrderResult {
  std::optional<std::size_t> order;  // smallest delta >= 1 whose median <= epsilon
  double epsilon = 0.0;
  std::vector<double> medians;  // index = delta, 0..max_delta
};

// Scans the median input-gradient norm over delta under the online graph.
inline MarkovOrderResult empirical_markov_order(const ModelParams& model, const Dataset& ds,
                                                const MarkovOrderOptions& opt = {},
                                                std::size_t lookahead = 1) {
  check_compatible(model, ds);
  if (opt.epsilon && !(*opt.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  std::vector<SampleGradients> parts(ds.sequences.size());
  parallel_for(ds.sequences.size(), [&](std::size_t i) {
    parts[i] = sample_input_gradients(model, ds.sequences[i], DecodeConfig::online(lookahead),
                                      opt.stride, opt.max_delta);
  });
  MarkovOrderResult r;
  std::vector<std::vector<double>> by_delta(opt.max_delta + 1);
  for (const auto& p : parts)
    for (const auto& row : p.norms)
      for (std::size_t d = 0; d <= opt.max_delta; ++d)
        if (!std::isnan(row[d])) by_delta[d].push_back(row[d]);
  for (auto& v : by_delta) r.medians.push_back(median_of(std::move(v)));
  r.epsilon = opt.epsilon ? *opt.epsilon : 1e-6 * r.medians[0];
  for (std::size_t d = 1; d <= opt.max_delta; ++d) {
    if (r.medians[d] <= r.epsilon) {
      r.order = d;
      break;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

struct NamedModel {
  std::string name;
  std::string train_config;  // free-form label, e.g. the training decode spec
  std::optional<ModelParams> model;
  std::string error;  // why `model` is absent
};

struct MismatchCell {
  std::string model;
  std::string train_config;
  std::string eval_config;
  double fer = 0.0;
  std::string error;  // non-empty when the cell could not be evaluated
};

inline std::vector<MismatchCell> mismatch_matrix(const std::vector<NamedModel>& models,
                                                 const std::vector<DecodeConfig>& evals,
                                                 const Dataset& ds) {
  std::vector<MismatchCell> cells;
  for (const auto& m : models) {
    for (const auto& e : evals) {
      MismatchCell c{m.name, m.train_config, e.label(), 0.0, m.error};
      if (m.model) {
        try {
          c.fer = evaluate_fer(*m.model, ds, e);
        } catch (const std::exception& ex) {
          c.error = ex.what();
        }
      } else if (c.error.empty()) {
        c.error = "model unavailable";
      }
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

inline void write_mismatch_table(std::ostream& os, const std::vector<MismatchCell>& cells) {
  os << "# model\ttrain_config\teval_config\tfer\n";
  char buf[40];
  for (const auto& c : cells) {
    os << c.model << '\t' << c.train_config << '\t' << c.eval_config << '\t';
    if (c.error.empty()) {
      std::snprintf(buf, sizeof buf, "%.6f", c.fer);
      os << buf;
    } else {
      os << "ERROR";
    }
    os << '\n';
  }
}

}  // namespace rnnlab

#endif  // RNNLAB_ANALYSIS_HPP_
