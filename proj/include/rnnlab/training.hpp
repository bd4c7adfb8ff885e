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

// Backpropagation through either decoding graph, clipped SGD and the epoch
// loop with dev-set model selection.

#ifndef RNNLAB_TRAINING_HPP_
#define RNNLAB_TRAINING_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "rnnlab/cells.hpp"
#include "rnnlab/errors.hpp"
#include "rnnlab/graphs.hpp"
#include "rnnlab/metrics.hpp"
#include "rnnlab/numeric.hpp"
#include "rnnlab/tasks.hpp"

namespace rnnlab {

struct LossAndGrads {
  double loss = 0.0;  // mean cross entropy over all predictions of the graph
  std::size_t predictions = 0;
  ModelParams grads;
};

// Mean per-prediction cross entropy of the graph `decode` builds over the
// utterance, and its exact gradient. Batch chains contribute additively.
inline LossAndGrads loss_and_grads(const ModelParams& model, const LabeledSequence& utt,
                                   const DecodeConfig& decode) {
  if (utt.length() == 0) throw DataError("loss_and_grads: empty utterance");
  const ChainSet set = build_chain_set(utt.length(), decode);
  GraphCache cache;
  const auto logits = graph_forward(model, PaddedSequence(utt.frames), set, &cache);
  LossAndGrads r;
  r.predictions = set.predictions.size();
  const double inv = 1.0 / static_cast<double>(r.predictions);
  std::vector<Vector> dlogits(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const std::size_t label = utt.labels[set.predictions[i].frame];
    if (label >= model.spec.labels)
      throw DataError("label " + std::to_string(label) + " >= model label count " +
                      std::to_string(model.spec.labels));
    XentResult x = softmax_xent(logits[i], label);
    total += x.loss;
    for (double& g : x.grad_logits.values()) g *= inv;
    dlogits[i] = std::move(x.grad_logits);
  }
  r.loss = total * inv;
  r.grads = zero_params(model.spec);
  graph_backward(model, set, cache, dlogits, &r.grads, nullptr);
  return r;
}

// Loss only, without the backward pass.
inline double graph_loss(const ModelParams& model, const LabeledSequence& utt,
                         const DecodeConfig& decode) {
  if (utt.length() == 0) throw DataError("graph_loss: empty utterance");
  const ChainSet set = build_chain_set(utt.length(), decode);
  const auto logits = graph_forward(model, PaddedSequence(utt.frames), set);
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i)
    total += softmax_xent(logits[i], utt.labels[set.predictions[i].frame]).loss;
  return total / static_cast<double>(logits.size());
}

struct SgdResult {
  bool applied = false;  // false when the gradient had non-finite entries
  double grad_norm = 0.0;
  double scale = 1.0;
};

// theta <- theta - step * clip(g). Non-finite gradients leave the model
// untouched.
inline SgdResult sgd_update(ModelParams& model, ModelParams grads, double step, double clip) {
  if (!(step > 0.0)) throw ConfigError("step size must be positive");
  if (!(model.spec == grads.spec))
    throw ConfigError("sgd_update: gradient shape does not match model");
  SgdResult r;
  auto gs = grads.tensors();
  for (const Matrix* g : gs)
    if (!all_finite(g->values())) return r;
  std::vector<const Matrix*> cgs(gs.begin(), gs.end());
  r.grad_norm = global_norm(cgs);
  r.scale = clip_in_place(gs, clip);
  auto ps = model.tensors();
  for (std::size_t k = 0; k < ps.size(); ++k) {
    auto p = ps[k]->values();
    auto g = gs[k]->values();
    for (std::size_t q = 0; q < p.size(); ++q) p[q] -= step * g[q];
  }
  r.applied = true;
  return r;
}

struct TrainConfig {
  DecodeConfig decode;
  double step = 0.05;
  double clip = 5.0;
  std::size_t epochs = 20;
  std::uint64_t seed = 1;
  std::size_t loss_window = 100;  // updates in the running training-loss average

  void validate() const {
    decode.validate();
    if (!(step > 0.0)) throw ConfigError("step size must be positive");
    if (!(clip > 0.0)) throw ConfigError("clip norm must be positive");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (loss_window < 1) throw ConfigError("loss window must be >= 1");
  }
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double mean_train_loss = 0.0;
  double dev_fer = 0.0;
  std::size_t skipped_updates = 0;
};

struct TrainHistory {
  std::vector<double> update_loss;
  std::vector<double> running_loss;  // mean of the last `loss_window` updates
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // 1-based
  std::size_t skipped_updates = 0;

  double best_dev_fer() const { return epochs.at(best_epoch - 1).dev_fer; }
};

inline void write_history_table(std::ostream& os, const TrainHistory& h) {
  os << "# epoch\tmean_train_loss\tdev_fer\n";
  char buf[96];
  for (const auto& e : h.epochs) {
    std::snprintf(buf, sizeof buf, "%zu\t%.17g\t%.17g\n", e.epoch, e.mean_train_loss, e.dev_fer);
    os << buf;
  }
}

inline void write_update_table(std::ostream& os, const TrainHistory& h) {
  os << "# update\tloss\trunning_loss\n";
  char buf[96];
  for (std::size_t i = 0; i < h.update_loss.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu\t%.17g\t%.17g\n", i + 1, h.update_loss[i],
                  h.running_loss[i]);
    os << buf;
  }
}

struct TrainResult {
  ModelParams best;
  ModelParams last;
  TrainHistory history;
};

// Called after each epoch with the record just appended.
using EpochCallback = std::function<void(const EpochRecord&)>;

inline TrainResult train(const ModelSpec& spec, const TrainConfig& cfg, const Dataset& train_set,
                         const Dataset& dev_set, const EpochCallback& on_epoch = {}) {
  cfg.validate();
  validate(spec);
  if (train_set.sequences.empty() || dev_set.sequences.empty())
    throw DataError("train: training and dev sets must be non-empty");
  ModelParams model = init_params(spec, cfg.seed);
  check_compatible(model, train_set);
  check_compatible(model, dev_set);
  for (const auto& s : train_set.sequences)
    if (s.length() == 0) throw DataError("train: empty utterance in training set");

  TrainResult r;
  auto& h = r.history;
  std::vector<std::size_t> order(train_set.sequences.size());
  double best_fer = std::numeric_limits<double>::infinity();
  double window_sum = 0.0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(detail::mix_seed(cfg.seed, 0xe90c0000ULL + epoch));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[detail::uniform_index(rng, i)]);

    EpochRecord rec;
    rec.epoch = epoch;
    double epoch_sum = 0.0;
    for (std::size_t idx : order) {
      LossAndGrads lg = loss_and_grads(model, train_set.sequences[idx], cfg.decode);
      const SgdResult up = sgd_update(model, std::move(lg.grads), cfg.step, cfg.clip);
      if (!up.applied || !std::isfinite(lg.loss)) {
        ++rec.skipped_updates;
        ++h.skipped_updates;
        if (!std::isfinite(lg.loss)) continue;
      }
      epoch_sum += lg.loss;
      h.update_loss.push_back(lg.loss);
      window_sum += lg.loss;
      const std::size_t n = h.update_loss.size();
      if (n > cfg.loss_window) window_sum -= h.update_loss[n - 1 - cfg.loss_window];
      h.running_loss.push_back(window_sum / static_cast<double>(std::min(n, cfg.loss_window)));
    }
    rec.mean_train_loss = epoch_sum / static_cast<double>(order.size());
    rec.dev_fer = evaluate_fer(model, dev_set, cfg.decode);
    h.epochs.push_back(rec);
    if (rec.dev_fer < best_fer) {
      best_fer = rec.dev_fer;
      h.best_epoch = epoch;
      r.best = model;
    }
    if (on_epoch) on_epoch(rec);
  }
  if (h.best_epoch == 0) {  // every dev FER was NaN
    h.best_epoch = cfg.epochs;
    r.best = model;
  }
  r.last = std::move(model);
  return r;
}

}  // namespace rnnlab

#endif  // RNNLAB_TRAINING_HPP_
