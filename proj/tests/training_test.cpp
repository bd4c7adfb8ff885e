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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "rnnlab/checkpoint.hpp"
#include "rnnlab/metrics.hpp"
#include "rnnlab/training.hpp"
#include "test_util.hpp"

namespace rnnlab {
namespace {

using testing::random_model;
using testing::random_utterance;

const DecodeConfig kConfigs[] = {DecodeConfig::online(1), DecodeConfig::online(2),
                                 DecodeConfig::batch(4, 1), DecodeConfig::batch(6, 2, 3)};

TEST(LossAndGrads, ZeroModelLossIsLogLabels) {
  std::mt19937_64 rng(1);
  const ModelParams m = zero_params({CellKind::kLstm, 2, 3, 2, 4});
  const auto u = random_utterance(7, 2, 4, rng);
  for (const auto& cfg : kConfigs) EXPECT_EQ(loss_and_grads(m, u, cfg).loss, std::log(4.0));
}

// Zero output weights give ln|L| regardless of the recurrent weights.
TEST(LossAndGrads, ZeroOutputWeightsLossIsLogLabels) {
  std::mt19937_64 rng(2);
  ModelParams m = random_model({CellKind::kLstm, 2, 3, 2, 3}, rng);
  m.w_out.set_zero();
  const auto u = random_utterance(6, 2, 3, rng);
  for (const auto& cfg : kConfigs) EXPECT_DOUBLE_EQ(graph_loss(m, u, cfg), std::log(3.0));
}

TEST(LossAndGrads, EightFrameOnlineFiniteDifferences) {
  std::mt19937_64 rng(3);
  ModelParams m = random_model({CellKind::kLstm, 2, 4, 3, 3}, rng);
  const auto u = random_utterance(8, 3, 3, rng);
  const auto lg = loss_and_grads(m, u, DecodeConfig::online(1));
  EXPECT_LT(testing::max_param_gradient_error(
                m, lg.grads, [&] { return graph_loss(m, u, DecodeConfig::online(1)); }),
            1e-5);
}

TEST(LossAndGrads, FourConfigurationsFiniteDifferences) {
  std::mt19937_64 rng(4);
  const DecodeConfig cfgs[] = {DecodeConfig::online(1), DecodeConfig::online(3),
                               DecodeConfig::batch(4, 1, 1), DecodeConfig::batch(5, 1, 3)};
  for (const auto& cfg : cfgs) {
    ModelParams m = random_model({CellKind::kLstm, 2, 4, 2, 3}, rng);
    const auto u = random_utterance(8, 2, 3, rng);
    const auto lg = loss_and_grads(m, u, cfg);
    EXPECT_LT(testing::max_param_gradient_error(m, lg.grads,
                                                [&] { return graph_loss(m, u, cfg); }),
              1e-5)
        << cfg.label();
  }
}

TEST(LossAndGrads, LongBatchEqualsOnlineForLstm) {
  std::mt19937_64 rng(5);
  const ModelParams m = random_model({CellKind::kLstm, 2, 3, 2, 3}, rng);
  const auto u = random_utterance(9, 2, 3, rng);
  const auto on = loss_and_grads(m, u, DecodeConfig::online(2));
  const auto ba = loss_and_grads(m, u, DecodeConfig::batch(10, 2));
  EXPECT_EQ(on.loss, ba.loss);
}

// Independent recomputation: one single-chain decode per anchor.
TEST(LossAndGrads, ConsecutiveLossIsMeanOverChainPredictions) {
  std::mt19937_64 rng(6);
  const ModelParams m = random_model({CellKind::kLstm, 2, 3, 2, 3}, rng);
  const auto u = random_utterance(10, 2, 3, rng);
  const std::size_t k = 5, la = 2, p = 3;
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& c : consecutive_chains(10, k, la, p)) {
    Matrix frames(k, 2);
    for (std::ptrdiff_t s = c.start; s <= c.end; ++s)
      if (s >= 0 && s < 10)
        for (std::size_t j = 0; j < 2; ++j)
          frames(static_cast<std::size_t>(s - c.start), j) = u.frames(static_cast<std::size_t>(s), j);
    const auto logits = online_decode(m, PaddedSequence(frames), 1);
    for (const auto& [f, h] : c.predictions) {
      total += softmax_xent(logits[static_cast<std::size_t>(h - c.start)],
                            u.labels[static_cast<std::size_t>(f)])
                   .loss;
      ++count;
    }
  }
  const auto lg = loss_and_grads(m, u, DecodeConfig::batch(k, la, p));
  EXPECT_EQ(lg.predictions, count);
  EXPECT_NEAR(lg.loss, total / static_cast<double>(count), 1e-12);
}

TEST(LossAndGrads, BadLabelIsDataError) {
  const ModelParams m = zero_params({CellKind::kLstm, 1, 2, 2, 3});
  LabeledSequence u{Matrix(2, 2), {0, 3}};
  EXPECT_THROW(loss_and_grads(m, u, DecodeConfig::online(1)), DataError);
  EXPECT_THROW(loss_and_grads(m, LabeledSequence{Matrix(0, 2), {}}, DecodeConfig::online(1)),
               DataError);
}

TEST(SgdUpdate, ZeroGradsLeaveModelUnchanged) {
  std::mt19937_64 rng(7);
  ModelParams m = random_model({CellKind::kLstm, 1, 2, 2, 2}, rng);
  const ModelParams before = m;
  EXPECT_TRUE(sgd_update(m, zero_params(m.spec), 0.05, 5).applied);
  EXPECT_EQ(m, before);
}

TEST(SgdUpdate, HandArithmetic) {
  ModelParams m = zero_params({CellKind::kVanilla, 1, 1, 1, 1});
  ModelParams g = zero_params(m.spec);
  m.cells[0].u(0, 0) = 1.0;
  g.cells[0].u(0, 0) = 2.0;
  sgd_update(m, g, 0.05, 5.0);
  EXPECT_DOUBLE_EQ(m.cells[0].u(0, 0), 0.9);
}

TEST(SgdUpdate, ClipHalvesStep) {
  ModelParams m = zero_params({CellKind::kVanilla, 1, 1, 1, 1});
  ModelParams g = zero_params(m.spec);
  g.cells[0].u(0, 0) = 6.0;
  g.cells[0].v(0, 0) = 8.0;
  const SgdResult r = sgd_update(m, g, 1.0, 5.0);
  EXPECT_DOUBLE_EQ(r.grad_norm, 10.0);
  EXPECT_DOUBLE_EQ(r.scale, 0.5);
  EXPECT_DOUBLE_EQ(m.cells[0].u(0, 0), -3.0);
  EXPECT_DOUBLE_EQ(m.cells[0].v(0, 0), -4.0);
}

TEST(SgdUpdate, NonFiniteGradientIsSkipped) {
  ModelParams m = zero_params({CellKind::kLstm, 1, 2, 2, 2});
  const ModelParams before = m;
  ModelParams g = zero_params(m.spec);
  g.w_out(0, 0) = std::nan("");
  g.w_out(1, 1) = 1.0;
  EXPECT_FALSE(sgd_update(m, g, 0.05, 5).applied);
  EXPECT_EQ(m, before);
}

TEST(SgdUpdate, ShapeMismatch) {
  ModelParams m = zero_params({CellKind::kLstm, 1, 2, 2, 2});
  EXPECT_THROW(sgd_update(m, zero_params({CellKind::kLstm, 1, 3, 2, 2}), 0.05, 5), ConfigError);
  EXPECT_THROW(sgd_update(m, zero_params(m.spec), 0.0, 5), ConfigError);
}

Dataset small_markov(std::size_t count, std::uint64_t seed) {
  TaskSpec t;
  t.kind = TaskKind::kMarkov;
  t.alphabet = 2;
  t.classes = 2;
  t.order = 2;
  t.length = 20;
  t.count = count;
  t.seed = seed;
  return gen_markov(t).dataset;
}

TEST(Train, EpochsValidated) {
  const Dataset d = small_markov(4, 1);
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(train({CellKind::kLstm, 1, 4, 2, 2}, cfg, d, d), ConfigError);
}

TEST(Train, SingleEpochReturnsPostEpochModel) {
  const Dataset d = small_markov(6, 2);
  TrainConfig cfg;
  cfg.epochs = 1;
  const TrainResult r = train({CellKind::kLstm, 1, 4, 2, 2}, cfg, d, d);
  EXPECT_EQ(r.best, r.last);
  EXPECT_EQ(r.history.best_epoch, 1u);
  EXPECT_EQ(r.history.update_loss.size(), 6u);
  EXPECT_EQ(r.history.running_loss.size(), 6u);
}

TEST(Train, DeterministicAndBestIsMinimum) {
  const Dataset d = small_markov(10, 3);
  const Dataset dev = small_markov(3, 4);
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.decode = DecodeConfig::batch(4, 1, 2);
  const ModelSpec spec{CellKind::kLstm, 2, 4, 2, 2};
  const TrainResult a = train(spec, cfg, d, dev);
  const TrainResult b = train(spec, cfg, d, dev);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.last, b.last);
  EXPECT_EQ(a.history.update_loss, b.history.update_loss);
  double lo = 1e9;
  for (const auto& e : a.history.epochs) lo = std::min(lo, e.dev_fer);
  EXPECT_EQ(a.history.best_dev_fer(), lo);
  EXPECT_EQ(evaluate_fer(a.best, dev, cfg.decode), lo);
}

TEST(Train, DimensionMismatchBeforeAnyUpdate) {
  const Dataset d = small_markov(2, 5);
  EXPECT_THROW(train({CellKind::kLstm, 1, 4, 3, 2}, TrainConfig{}, d, d), DataError);
}

TEST(Train, RunningLossDecreasesOverFirstEpoch) {
  TaskSpec t;
  t.kind = TaskKind::kMarkov;
  t.alphabet = 2;
  t.classes = 2;
  t.order = 1;
  t.length = 30;
  t.count = 300;
  const Dataset d = gen_markov(t).dataset;
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.step = 0.2;
  cfg.loss_window = 50;
  const TrainResult r = train({CellKind::kLstm, 1, 8, 2, 2}, cfg, d, d);
  const auto& run = r.history.running_loss;
  EXPECT_LT(run.back(), 0.5 * run[cfg.loss_window - 1]);
}

TEST(HistoryTable, Format) {
  TrainHistory h;
  h.epochs.push_back({1, 0.5, 25.0, 0});
  std::ostringstream os;
  write_history_table(os, h);
  EXPECT_EQ(os.str(), "# epoch\tmean_train_loss\tdev_fer\n1\t0.5\t25\n");
}

TEST(Checkpoint, RoundTripIsBitExact) {
  std::mt19937_64 rng(8);
  const ModelParams m = random_model({CellKind::kLstm, 2, 5, 3, 4}, rng);
  const std::string bytes = serialize_checkpoint(m);
  const ModelParams back = deserialize_checkpoint(bytes);
  EXPECT_EQ(back, m);
  EXPECT_EQ(serialize_checkpoint(back), bytes);
}

TEST(Checkpoint, FileRoundTripPreservesFer) {
  const Dataset d = small_markov(5, 9);
  const ModelParams m = init_params({CellKind::kLstm, 2, 4, 2, 2}, 3);
  const auto path = std::filesystem::temp_directory_path() / "rnnlab_ckpt_test.ckpt";
  save_checkpoint(m, path.string());
  const ModelParams back = load_checkpoint(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(evaluate_fer(back, d, DecodeConfig::online()),
            evaluate_fer(m, d, DecodeConfig::online()));
}

TEST(Checkpoint, TruncationAndCorruptionRejected) {
  const std::string bytes = serialize_checkpoint(init_params({CellKind::kVanilla, 1, 3, 2, 2}, 1));
  for (std::size_t n : {std::size_t{0}, std::size_t{5}, std::size_t{20}, bytes.size() - 1})
    EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, n)), DataError) << n;
  EXPECT_THROW(deserialize_checkpoint(bytes + "x"), DataError);
  std::string bad_version = bytes;
  bad_version[8] = 9;
  EXPECT_THROW(deserialize_checkpoint(bad_version), DataError);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_checkpoint(bad_magic), DataError);
  EXPECT_THROW(load_checkpoint("/nonexistent/rnnlab.ckpt"), DataError);
}

}  // namespace
}  // namespace rnnlab
