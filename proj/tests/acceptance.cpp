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

// Acceptance suite: one PASS/FAIL line per criterion. Training experiments
// write their artifacts under the work directory (argv[1], default
// ./acceptance_work); an optional comma-separated id list (argv[2]) limits
// the run. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rnnlab/rnnlab.hpp"
#include "test_util.hpp"

namespace rnnlab {
namespace {

namespace fs = std::filesystem;
using testing::max_param_gradient_error;
using testing::numeric_gradient;
using testing::random_matrix;
using testing::random_model;
using testing::random_utterance;
using testing::random_vector;
using testing::relative_error;

// Pinned tolerances.
constexpr double kGradTol = 1e-5;
constexpr double kChanceBand = 5.0;          // points, criteria 4 and 8
constexpr double kLookaheadAccuracy = 95.0;  // percent, criterion 4
constexpr double kContextDrop = 5.0;         // points, criterion 5
constexpr double kBayesFraction = 0.90;      // criterion 6
constexpr double kOnlineBatchGap = 10.0;     // points, criterion 6
constexpr double kRestoredGap = 3.0;         // points, criterion 7
constexpr double kModsumAccuracy = 90.0;     // percent, criterion 8
constexpr double kOracleSigmas = 3.0;        // criterion 8
constexpr double kGradientRatio = 0.01;      // criterion 9
constexpr std::size_t kProbeDelta = 20;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool same_bits(const Vector& a, const Vector& b) {
  return a.dim() == b.dim() &&
         std::memcmp(a.values().data(), b.values().data(), a.dim() * sizeof(double)) == 0;
}

double accuracy(double fer) { return 100.0 - fer; }

// ---------------------------------------------------------------------------
// 1-3: property suites on random tiny instances.

CellParams random_cell(CellKind kind, std::size_t hidden, std::size_t in, std::mt19937_64& rng) {
  const std::size_t rows = gate_count(kind) * hidden;
  return {random_matrix(rows, in, rng, -1, 1), random_matrix(rows, hidden, rng, -1, 1)};
}

// Single step probed with L = <dh, h'> + <dc, c'>.
double cell_gradient_error(CellKind kind, std::mt19937_64& rng) {
  const bool lstm = kind == CellKind::kLstm;
  const std::size_t h = 1 + rng() % 4, d = 1 + rng() % 3;
  CellParams p = random_cell(kind, h, d, rng);
  CellState st{random_vector(h, rng, -0.9, 0.9), lstm ? random_vector(h, rng) : Vector()};
  Vector x = random_vector(d, rng);
  const Vector dh = random_vector(h, rng);
  const Vector dc = lstm ? random_vector(h, rng) : Vector();
  auto probe = [&] {
    double s = 0.0;
    if (lstm) {
      const CellState n = lstm_step(p, st, x);
      for (std::size_t k = 0; k < h; ++k) s += dh[k] * n.h[k] + dc[k] * n.c[k];
    } else {
      const Vector hn = rnn_step(p, st.h, x);
      for (std::size_t k = 0; k < h; ++k) s += dh[k] * hn[k];
    }
    return s;
  };
  CellParams g{Matrix(p.u.rows(), p.u.cols()), Matrix(p.v.rows(), p.v.cols())};
  const StepCotangents ct = cell_step_vjp(kind, p, st, x, dh, dc, g);
  double worst = relative_error(g.u.values(), numeric_gradient(p.u.values(), probe));
  worst = std::max(worst, relative_error(g.v.values(), numeric_gradient(p.v.values(), probe)));
  worst = std::max(worst, relative_error(ct.dx.values(), numeric_gradient(x.values(), probe)));
  worst = std::max(worst,
                   relative_error(ct.dh_prev.values(), numeric_gradient(st.h.values(), probe)));
  if (lstm) {
    worst = std::max(worst,
                     relative_error(ct.dc_prev.values(), numeric_gradient(st.c.values(), probe)));
  }
  return worst;
}

double loss_gradient_error(CellKind kind, const DecodeConfig& cfg, std::mt19937_64& rng) {
  const std::size_t h = 2 + rng() % 3, d = 1 + rng() % 3, c = 2 + rng() % 3;
  const std::size_t len = cfg.context + 1 + rng() % 4;
  ModelParams m = random_model({kind, 2, h, d, c}, rng);
  const auto u = random_utterance(len, d, c, rng);
  const auto lg = loss_and_grads(m, u, cfg);
  return max_param_gradient_error(m, lg.grads, [&] { return graph_loss(m, u, cfg); });
}

Verdict gradient_correctness() {
  constexpr int kTrials = 20;
  std::mt19937_64 rng(101);
  double cells = 0.0, stacks = 0.0;
  std::size_t n = 0;
  for (CellKind kind : {CellKind::kVanilla, CellKind::kLstm}) {
    for (int i = 0; i < kTrials; ++i, n += 2) {
      cells = std::max(cells, cell_gradient_error(kind, rng));
      stacks = std::max(stacks, loss_gradient_error(kind, DecodeConfig::online(1), rng));
    }
  }
  const DecodeConfig cfgs[] = {DecodeConfig::online(1), DecodeConfig::online(3),
                               DecodeConfig::batch(4, 1, 1), DecodeConfig::batch(5, 1, 3)};
  std::string per;
  bool ok = cells < kGradTol && stacks < kGradTol;
  for (const auto& cfg : cfgs) {
    double worst = 0.0;
    for (int i = 0; i < kTrials; ++i, ++n) {
      worst = std::max(worst, loss_gradient_error(i % 2 ? CellKind::kLstm : CellKind::kVanilla,
                                                  cfg, rng));
    }
    ok = ok && worst < kGradTol;
    per += fmt(" %s=%.1e", cfg.label().c_str(), worst);
  }
  return {ok, fmt("max rel err cells=%.1e stacks=%.1e", cells, stacks) + per +
                  fmt(" (%zu instances, tol %.0e)", n, kGradTol)};
}

Verdict graph_equivalence() {
  std::mt19937_64 rng(202);
  std::size_t mismatched = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t len = 1 + rng() % 50, la = i % 2 ? 5 : 1;
    const std::size_t h = 1 + rng() % 6, d = 1 + rng() % 4, c = 2 + rng() % 4;
    const ModelParams m = random_model({CellKind::kLstm, 2, h, d, c}, rng);
    const auto u = random_utterance(len, d, c, rng);
    const PaddedSequence s(u.frames);
    const std::size_t k = len + la - 1 + (i % 3 ? 0 : rng() % 10);
    const auto on = online_decode(m, s, la);
    const auto ba = batch_decode(m, s, k, la);
    bool same = on.size() == ba.size();
    for (std::size_t t = 0; same && t < on.size(); ++t) same = same_bits(on[t], ba[t]);
    mismatched += same ? 0 : 1;
  }
  return {mismatched == 0, fmt("%zu of 100 utterances differ bitwise", mismatched)};
}

Verdict markov_cut() {
  std::mt19937_64 rng(303);
  std::size_t logit_fail = 0, grad_fail = 0, fd_fail = 0, checked = 0, inside_zero = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t len = 10 + rng() % 31, k = 1 + rng() % 8;
    const std::size_t la = 1 + rng() % std::min<std::size_t>(k, 3);
    const std::size_t h = 2 + rng() % 4, d = 1 + rng() % 3, c = 2 + rng() % 3;
    const ModelParams m = random_model({CellKind::kLstm, 2, h, d, c}, rng);
    auto u = random_utterance(len, d, c, rng);
    const auto base = batch_decode(m, PaddedSequence(u.frames), k, la);

    // A frame and a prediction whose chain excludes it.
    const std::size_t t = rng() % len;
    const auto lo = static_cast<std::ptrdiff_t>(t + la) - static_cast<std::ptrdiff_t>(k);
    std::vector<std::size_t> outside;
    for (std::size_t f = 0; f < len; ++f) {
      const auto ff = static_cast<std::ptrdiff_t>(f);
      if (ff < lo || ff > static_cast<std::ptrdiff_t>(t + la) - 1) outside.push_back(f);
    }
    if (outside.empty()) continue;
    ++checked;
    const std::size_t f = outside[rng() % outside.size()];
    Matrix pert = u.frames;
    for (std::size_t j = 0; j < d; ++j) pert(f, j) += std::normal_distribution<double>(0, 5)(rng);
    if (!same_bits(batch_decode(m, PaddedSequence(pert), k, la)[t], base[t])) ++logit_fail;

    // Analytic probe norms past the chain, and finite differences of the
    // per-frame loss at the perturbed frame.
    const DecodeConfig cfg = DecodeConfig::batch(k, la);
    const auto g = sample_input_gradients(m, u, cfg, 1, len - 1);
    bool nonzero_inside = false;
    for (std::size_t delta = 0; delta <= t; ++delta) {
      const double v = g.norms[t][delta];
      if (delta + la > k && v != 0.0) ++grad_fail;
      if (delta + la <= k && v != 0.0) nonzero_inside = true;
    }
    inside_zero += nonzero_inside ? 0 : 1;
    auto frame_loss = [&] {
      const auto logits = batch_decode(m, PaddedSequence(u.frames), k, la);
      return softmax_xent(logits[t], u.labels[t]).loss;
    };
    std::span<double> row(&u.frames(f, 0), d);
    for (double v : numeric_gradient(row, frame_loss)) fd_fail += v == 0.0 ? 0 : 1;
  }
  const bool ok = checked == 100 && logit_fail == 0 && grad_fail == 0 && fd_fail == 0;
  return {ok, fmt("%zu cases: %zu logit changes, %zu nonzero probe norms, %zu nonzero finite "
                  "differences outside the chain; %zu cases with all-zero in-chain norms",
                  checked, logit_fail, grad_fail, fd_fail, inside_zero)};
}

// ---------------------------------------------------------------------------
// 4-10: training experiments.

struct Experiment {
  fs::path work;

  fs::path data(const TaskSpec& spec, const std::string& name) const {
    const fs::path dir = work / "data" / name;
    run_data_job(spec, dir, true);
    return dir;
  }

  ModelParams train_model(const fs::path& data, const TrainConfig& cfg, const std::string& name,
                          const fs::path& root = {}) const {
    TrainJob job;
    job.train_data = split_path(data, "train");
    job.dev_data = split_path(data, "dev");
    job.config = cfg;
    const fs::path out = (root.empty() ? work : root) / "runs" / name;
    const auto t0 = std::chrono::steady_clock::now();
    auto o = run_train_job(job, out, true);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("    trained %-14s %-32s best epoch %zu dev FER %.2f  [%.0f s]\n", name.c_str(),
                cfg.decode.label().c_str(), o.result.history.best_epoch,
                o.result.history.best_dev_fer(), secs);
    std::fflush(stdout);
    return o.result.best;
  }
};

TrainConfig config(const DecodeConfig& decode, std::size_t epochs, double step = 0.05) {
  TrainConfig c;
  c.decode = decode;
  c.epochs = epochs;
  c.step = step;
  c.seed = 1;
  return c;
}

Dataset test_split(const fs::path& data) { return load_dataset(split_path(data, "test").string()); }

// Future task, true lookahead 3.
TaskSpec future_spec() {
  TaskSpec s;
  s.kind = TaskKind::kFuture;
  s.alphabet = 4;
  s.future_lookahead = 3;
  s.noise = 0.0;
  s.length = 100;
  s.count = 2000;
  s.seed = 31;
  return s;
}

// Markov task of true order 6.
TaskSpec markov_spec() {
  TaskSpec s;
  s.kind = TaskKind::kMarkov;
  s.alphabet = 2;
  s.classes = 4;
  s.order = 6;
  s.noise = 0.1;
  s.length = 100;
  s.count = 2000;
  s.seed = 11;
  return s;
}

// Modular running sum; trained on short sequences, evaluated on long ones.
TaskSpec modsum_spec(std::size_t length, std::size_t count, std::uint64_t seed) {
  TaskSpec s;
  s.kind = TaskKind::kModSum;
  s.classes = 4;
  s.noise = 0.1;
  s.length = length;
  s.count = count;
  s.seed = seed;
  return s;
}

// The lookahead-1 ceiling is position-aware: 1/A plus the pad positions at
// the end, whose label is known.
Verdict lookahead_trend(const Experiment& ex) {
  const TaskSpec spec = future_spec();
  const fs::path data = ex.data(spec, "future");
  const Dataset test = test_split(data);
  const double ceiling =
      100.0 * bayes_oracle(spec, oracle_window(DecodeConfig::online(1))).accuracy;
  const auto m1 = ex.train_model(data, config(DecodeConfig::online(1), 10), "future_la1");
  const double acc1 = accuracy(evaluate_fer(m1, test, DecodeConfig::online(1)));
  bool ok = std::abs(acc1 - ceiling) <= kChanceBand;
  std::string detail = fmt("lookahead 1: acc %.2f vs ceiling %.2f", acc1, ceiling);
  for (std::size_t la : {3u, 4u}) {
    const auto m = ex.train_model(data, config(DecodeConfig::online(la), 10),
                                  "future_la" + std::to_string(la));
    const double acc = accuracy(evaluate_fer(m, test, DecodeConfig::online(la)));
    ok = ok && acc >= kLookaheadAccuracy;
    detail += fmt("; lookahead %zu: acc %.2f", la, acc);
  }
  return {ok, detail};
}

struct MarkovModels {
  fs::path data;
  Dataset test;
  ModelParams online;
  ModelParams batch[3];  // p = 1, 4, 8
};

constexpr std::size_t kPredicts[] = {1, 4, 8};

// Chains of the p = 1, 4, 8 runs keep the past coverage of the kappa = 8,
// p = 1 chain, so only the number of consecutive predictions varies.
DecodeConfig consecutive_config(std::size_t p) { return DecodeConfig::batch(8 + p - 1, 1, p); }

Verdict context_reduction(const MarkovModels& mm) {
  const double f4 = evaluate_fer(mm.online, mm.test, DecodeConfig::batch(4));
  const double f8 = evaluate_fer(mm.online, mm.test, DecodeConfig::batch(8));
  const double fo = evaluate_fer(mm.online, mm.test, DecodeConfig::online(1));
  return {f4 - f8 >= kContextDrop,
          fmt("online-trained FER online %.2f, batch k=8 %.2f, batch k=4 %.2f (drop %.2f)", fo,
              f8, f4, f4 - f8)};
}

// The noiseless ceiling bounds the noisy-data Bayes accuracy from above.
Verdict batch_fails_online(const MarkovModels& mm, const TaskSpec& spec,
                           const std::vector<std::size_t>& table) {
  const DecodeConfig b = DecodeConfig::batch(8);
  TaskSpec clean = spec;
  clean.noise = 0.0;
  const double bayes = 100.0 * bayes_oracle(clean, oracle_window(b), table).accuracy;
  const double fb = evaluate_fer(mm.batch[0], mm.test, b);
  const double fo = evaluate_fer(mm.batch[0], mm.test, DecodeConfig::online(1));
  const bool ok = accuracy(fb) >= kBayesFraction * bayes && fo - fb >= kOnlineBatchGap;
  return {ok, fmt("batch-trained acc %.2f (noiseless ceiling %.2f), FER batch %.2f online %.2f "
                  "(gap %.2f)",
                  accuracy(fb), bayes, fb, fo, fo - fb)};
}

// Signed gap online FER minus batch FER, batch scored with the training chain.
Verdict consecutive_prediction(const MarkovModels& mm) {
  double gaps[3];
  std::string detail = "online-batch gap";
  for (int i = 0; i < 3; ++i) {
    const DecodeConfig d = consecutive_config(kPredicts[i]).for_decoding();
    gaps[i] = evaluate_fer(mm.batch[i], mm.test, DecodeConfig::online(1)) -
              evaluate_fer(mm.batch[i], mm.test, d);
    detail += fmt(" p=%zu %.2f", kPredicts[i], gaps[i]);
  }
  const int inversions = (gaps[1] > gaps[0]) + (gaps[2] > gaps[1]);
  detail += fmt(" (%d inversions)", inversions);
  return {std::abs(gaps[2]) <= kRestoredGap && inversions <= 1, detail};
}

// Online training on T = 100 stays at chance, so the model learns on T = 20
// and is scored on separate T = 100 data. Batch windows are scored on
// interior positions, where the window no longer reaches the sequence start.
Verdict recursive_separation(const Experiment& ex) {
  const fs::path train_data = ex.data(modsum_spec(20, 2000, 41), "modsum_short");
  const TaskSpec eval_spec = modsum_spec(100, 1000, 43);
  const fs::path eval_data = ex.data(eval_spec, "modsum_long");
  const Dataset test = test_split(eval_data);
  const auto m = ex.train_model(train_data, config(DecodeConfig::online(1), 15, 0.5), "modsum");
  const double acc = accuracy(evaluate_fer(m, test, DecodeConfig::online(1)));
  bool ok = acc >= kModsumAccuracy;
  std::string detail = fmt("online acc %.2f; batch interior acc", acc);
  OracleOptions mc;
  mc.monte_carlo = true;
  mc.sequences = 1000;
  for (std::size_t k : {1u, 2u, 4u, 8u, 16u}) {
    const DecodeConfig d = DecodeConfig::batch(k);
    const auto preds = predict_dataset(m, test, d);
    std::size_t hit = 0, n = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      for (std::size_t t = k; t < preds[i].size(); ++t, ++n) {
        hit += preds[i][t] == test.sequences[i].labels[t];
      }
    }
    const double iacc = 100.0 * static_cast<double>(hit) / static_cast<double>(n);
    const OracleResult o = bayes_oracle(eval_spec, oracle_window(d), {}, mc);
    const bool oracle_ok =
        std::abs(o.interior_accuracy - 0.25) <= kOracleSigmas * o.interior_std_error;
    ok = ok && std::abs(iacc - 25.0) <= kChanceBand && oracle_ok;
    detail += fmt(" k=%zu %.2f (oracle %.2f+-%.2f)", k, iacc, 100.0 * o.interior_accuracy,
                  100.0 * o.interior_std_error);
  }
  return {ok, detail};
}

// Judged on the p = 1 batch model; the p = 8 model is reported alongside.
Verdict gradient_histogram_trend(const Experiment& ex, const MarkovModels& mm) {
  const DecodeConfig d = DecodeConfig::online(1);
  GradientReport reps[] = {gradient_histogram(mm.online, mm.test, d, kProbeDelta, 50),
                           gradient_histogram(mm.batch[0], mm.test, d, kProbeDelta, 50),
                           gradient_histogram(mm.batch[2], mm.test, d, kProbeDelta, 50)};
  const char* names[] = {"online", "batch_p1", "batch_p8"};
  // Shared bin edges so the histograms are directly comparable.
  double upper = 0.0;
  for (const auto& r : reps) upper = std::max(upper, r.max);
  for (int i = 0; i < 3; ++i) {
    fill_histogram(reps[i], 50, upper);
    std::ostringstream hist, summary;
    write_histogram(hist, reps[i]);
    write_gradient_summary(summary, reps[i]);
    const std::string stem = std::string("grad_delta20_") + names[i];
    write_text(ex.work / "reports" / (stem + "_hist.tsv"), hist.str());
    write_text(ex.work / "reports" / (stem + "_summary.tsv"), summary.str());
  }
  const double ratio = reps[1].median / reps[0].median;
  return {ratio <= kGradientRatio,
          fmt("median |dl/dx(t-20)| online-trained %.3e, batch p=1 %.3e (ratio %.3e), "
              "batch p=8 %.3e (ratio %.3e)",
              reps[0].median, reps[1].median, ratio, reps[2].median,
              reps[2].median / reps[0].median)};
}

// Reruns the modsum data job and its training run and compares every byte.
Verdict determinism(const Experiment& ex) {
  const Experiment again{ex.work / "rerun"};
  const fs::path data = again.data(modsum_spec(20, 2000, 41), "modsum_short");
  again.train_model(ex.work / "data" / "modsum_short",
                    config(DecodeConfig::online(1), 15, 0.5), "modsum");
  std::size_t files = 0;
  std::vector<std::string> differ;
  for (const auto& [a, b] : {std::pair{ex.work / "data" / "modsum_short", data},
                             std::pair{ex.work / "runs" / "modsum", again.work / "runs" / "modsum"}}) {
    for (const auto& e : fs::recursive_directory_iterator(a)) {
      if (!e.is_regular_file()) continue;
      ++files;
      const fs::path other = b / fs::relative(e.path(), a);
      if (!fs::exists(other) || read_text(e.path()) != read_text(other))
        differ.push_back(fs::relative(e.path(), ex.work).string());
    }
  }
  std::string detail = fmt("%zu files compared, %zu differ", files, differ.size());
  for (const auto& d : differ) detail += " " + d;
  return {files > 0 && differ.empty(), detail};
}

int run(const fs::path& work, const std::set<int>& only) {
  int failed = 0, ran = 0;
  auto report = [&](int id, const char* name, const std::function<Verdict()>& fn) {
    if (!only.empty() && !only.contains(id)) return;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += v.pass ? 0 : 1;
    std::printf("%s %2d %-24s %s  [%.1f s]\n", v.pass ? "PASS" : "FAIL", id, name,
                v.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report(1, "gradient-correctness", gradient_correctness);
  report(2, "graph-equivalence", graph_equivalence);
  report(3, "markov-cut", markov_cut);

  const Experiment ex{work};
  report(4, "lookahead", [&] { return lookahead_trend(ex); });

  const TaskSpec mspec = markov_spec();
  MarkovModels mm;
  std::vector<std::size_t> table;
  bool markov_ready = false;
  auto markov = [&]() -> const MarkovModels& {
    if (markov_ready) return mm;
    markov_ready = true;
    mm.data = ex.data(mspec, "markov");
    table = generate_task(mspec).dataset.table;
    mm.test = test_split(mm.data);
    mm.online = ex.train_model(mm.data, config(DecodeConfig::online(1), 12), "markov_online");
    for (int i = 0; i < 3; ++i) {
      mm.batch[i] = ex.train_model(mm.data, config(consecutive_config(kPredicts[i]), 12),
                                   "markov_p" + std::to_string(kPredicts[i]));
    }
    return mm;
  };
  report(5, "context-reduction", [&] { return context_reduction(markov()); });
  report(6, "batch-fails-online", [&] { return batch_fails_online(markov(), mspec, table); });
  report(7, "consecutive-prediction", [&] { return consecutive_prediction(markov()); });
  report(8, "recursive-separation", [&] { return recursive_separation(ex); });
  report(9, "gradient-histogram", [&] {
    return gradient_histogram_trend(ex, markov());
  });
  report(10, "determinism", [&] { return determinism(ex); });
  std::printf("%d of %d criteria failed\n", failed, ran);
  return failed;
}

}  // namespace
}  // namespace rnnlab

int main(int argc, char** argv) {
  const std::filesystem::path work = argc > 1 ? argv[1] : "acceptance_work";
  std::set<int> only;
  if (argc > 2) {
    std::stringstream ss(argv[2]);
    for (std::string id; std::getline(ss, id, ',');) only.insert(std::stoi(id));
  }
  return rnnlab::run(work, only);
}
