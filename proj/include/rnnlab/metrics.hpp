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

#ifndef RNNLAB_METRICS_HPP_
#define RNNLAB_METRICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "rnnlab/cells.hpp"
#include "rnnlab/errors.hpp"
#include "rnnlab/graphs.hpp"
#include "rnnlab/parallel.hpp"
#include "rnnlab/tasks.hpp"

namespace rnnlab {

// Percentage of positions where prediction and label differ.
inline double frame_error_rate(std::span<const std::size_t> predictions,
                               std::span<const std::size_t> labels) {
  if (predictions.size() != labels.size())
    throw ConfigError("frame_error_rate: " + std::to_string(predictions.size()) +
                      " predictions for " + std::to_string(labels.size()) + " labels");
  if (labels.empty()) throw ConfigError("frame_error_rate: no frames");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) wrong += predictions[i] != labels[i];
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(labels.size());
}

inline std::vector<std::size_t> predict_classes(const ModelParams& model,
                                                const LabeledSequence& seq,
                                                const DecodeConfig& cfg) {
  const auto logits = decode(model, PaddedSequence(seq.frames), cfg);
  std::vector<std::size_t> out(logits.size());
  for (std::size_t t = 0; t < logits.size(); ++t) out[t] = argmax(logits[t].values());
  return out;
}

inline void check_compatible(const ModelParams& model, const Dataset& ds) {
  if (ds.dim != model.spec.input_dim)
    throw DataError("dataset frame dim " + std::to_string(ds.dim) + " != model input dim " +
                    std::to_string(model.spec.input_dim));
  if (ds.classes > model.spec.labels)
    throw DataError("dataset has " + std::to_string(ds.classes) + " classes, model only " +
                    std::to_string(model.spec.labels));
}

// Predicted classes for every sequence of the dataset.
inline std::vector<std::vector<std::size_t>> predict_dataset(const ModelParams& model,
                                                             const Dataset& ds,
                                                             const DecodeConfig& cfg) {
  check_compatible(model, ds);
  std::vector<std::vector<std::size_t>> out(ds.sequences.size());
  parallel_for(ds.sequences.size(),
               [&](std::size_t i) { out[i] = predict_classes(model, ds.sequences[i], cfg); });
  return out;
}

// FER pooled over every frame of the dataset.
inline double evaluate_fer(const ModelParams& model, const Dataset& ds, const DecodeConfig& cfg) {
  const auto preds = predict_dataset(model, ds, cfg);
  std::vector<std::size_t> p, y;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    p.insert(p.end(), preds[i].begin(), preds[i].end());
    y.insert(y.end(), ds.sequences[i].labels.begin(), ds.sequences[i].labels.end());
  }
  return frame_error_rate(p, y);
}

}  // namespace rnnlab

#endif  // RNNLAB_METRICS_HPP_
