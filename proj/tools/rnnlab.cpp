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

// rnnlab: generate synthetic tasks, train online/batch recurrent models,
// evaluate decode mismatches, probe input gradients and run sweeps.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 numeric failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rnnlab/rnnlab.hpp"

namespace {

using namespace rnnlab;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

void log_line(const std::string& s) {
  std::cerr << "[rnnlab] " << s << std::endl;
}

// --- gen-data --------------------------------------------------------------

struct GenArgs {
  std::string task = "markov";
  TaskSpec spec;
  std::size_t modulus = 0;
  std::string out;
  bool force = false;
};

void add_gen_data(CLI::App& app, GenArgs& a) {
  auto* c = app.add_subcommand("gen-data", "generate a synthetic task and its 80/10/10 splits");
  c->add_option("--task", a.task, "markov, modsum or future")
      ->check(CLI::IsMember({"markov", "modsum", "future"}))
      ->capture_default_str();
  c->add_option("--order", a.spec.order, "markov order")->capture_default_str();
  c->add_option("--modulus", a.modulus, "modsum modulus (sets --classes)");
  c->add_option("--future-lookahead", a.spec.future_lookahead, "future task lookahead")
      ->capture_default_str();
  c->add_option("--alphabet", a.spec.alphabet, "symbol count")->capture_default_str();
  c->add_option("--classes", a.spec.classes, "class count")->capture_default_str();
  c->add_option("--noise", a.spec.noise, "Gaussian frame noise")->capture_default_str();
  c->add_option("--length", a.spec.length, "frames per sequence")->capture_default_str();
  c->add_option("--count", a.spec.count, "sequence count")->capture_default_str();
  c->add_option("--seed", a.spec.seed, "generator seed")->capture_default_str();
  c->add_option("--out", a.out, "output directory")->required();
  c->add_flag("--force", a.force, "overwrite an existing dataset");
}

int run_gen_data(GenArgs& a) {
  a.spec.kind = parse_task_kind(a.task);
  if (a.modulus > 0) a.spec.classes = a.modulus;
  const KeyValueDoc doc = run_data_job(a.spec, a.out, a.force);
  std::cout << doc.str();
  return 0;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string train_data;
  std::string dev_data;
  std::string out;
  std::string cell = "lstm";
  std::size_t layers = 2;
  std::size_t hidden = 32;
  std::string decode = "online";
  std::size_t lookahead = 1;
  std::size_t context = 0;
  std::size_t predict = 1;
  std::string convention = "chain";
  TrainConfig cfg;
  bool force = false;
  bool quiet = false;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* c = app.add_subcommand("train", "train a model and keep the best dev-FER checkpoint");
  c->fallthrough();  // lets --config reach the top-level parser
  c->add_option("--data", a.data, "data directory written by gen-data");
  c->add_option("--train-data", a.train_data, "training split file (overrides --data)");
  c->add_option("--dev-data", a.dev_data, "dev split file (overrides --data)");
  c->add_option("--out", a.out, "output directory")->required();
  c->add_option("--cell", a.cell, "lstm or vanilla")->capture_default_str();
  c->add_option("--layers", a.layers, "stacked layers")->capture_default_str();
  c->add_option("--hidden", a.hidden, "hidden units per layer")->capture_default_str();
  c->add_option("--decode", a.decode, "online, batch, or a full decode spec")
      ->capture_default_str();
  c->add_option("--lookahead", a.lookahead, "lookahead frames")->capture_default_str();
  c->add_option("--context", a.context, "batch context frames");
  c->add_option("--predict", a.predict, "consecutive predictions per chain")
      ->capture_default_str();
  c->add_option("--context-convention", a.convention,
                "chain: --context is the chain length; past: frames before the anchor")
      ->check(CLI::IsMember({"chain", "past"}))
      ->capture_default_str();
  c->add_option("--step", a.cfg.step, "SGD step size")->capture_default_str();
  c->add_option("--clip", a.cfg.clip, "global gradient-norm clip")->capture_default_str();
  c->add_option("--epochs", a.cfg.epochs, "training epochs")->capture_default_str();
  c->add_option("--seed", a.cfg.seed, "initialisation and shuffling seed")->capture_default_str();
  c->add_option("--loss-window", a.cfg.loss_window, "updates in the running-loss average")
      ->capture_default_str();
  c->add_flag("--force", a.force, "overwrite an existing model");
  c->add_flag("--quiet", a.quiet, "no per-epoch log lines");
}

DecodeConfig train_decode(const TrainArgs& a) {
  if (a.decode.find(':') != std::string::npos) {
    const auto specs = parse_decode_specs(a.decode);
    if (specs.size() != 1) throw ConfigError("--decode must name a single configuration");
    return specs[0];
  }
  if (a.decode == "online") return DecodeConfig::online(a.lookahead);
  if (a.decode != "batch") throw ConfigError("--decode must be online or batch");
  if (a.context == 0) throw ConfigError("batch decoding needs --context");
  std::size_t chain = a.context;
  if (a.convention == "past") chain = a.context + a.lookahead + a.predict - 1;
  DecodeConfig d = DecodeConfig::batch(chain, a.lookahead, a.predict);
  d.validate();
  return d;
}

int run_train(TrainArgs& a) {
  TrainJob job;
  if (a.train_data.empty() && a.data.empty()) throw ConfigError("train needs --data or --train-data");
  job.train_data = a.train_data.empty() ? resolve_data(a.data, "train") : fs::path(a.train_data);
  job.dev_data = a.dev_data.empty() ? resolve_data(a.data.empty() ? a.train_data : a.data, "dev")
                                    : fs::path(a.dev_data);
  if (a.dev_data.empty() && a.data.empty())
    throw ConfigError("train needs --dev-data when --data is not given");
  job.cell = parse_cell_kind(a.cell);
  job.layers = a.layers;
  job.hidden = a.hidden;
  job.config = a.cfg;
  job.config.decode = train_decode(a);
  const DecodeConfig& d = job.config.decode;
  std::cout << "decode\t" << d.label() << '\n';
  if (d.mode == DecodeMode::kBatch)
    std::cout << "chain_length\t" << d.context << "\npast_coverage\t" << d.past_coverage() << '\n';
  const auto t0 = std::chrono::steady_clock::now();
  const TrainOutcome o = run_train_job(job, a.out, a.force, [&](const EpochRecord& e) {
    if (a.quiet) return;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[160];
    std::snprintf(buf, sizeof buf, "epoch %zu  train_loss %.5f  dev_fer %.3f  skipped %zu  (%.1fs)",
                  e.epoch, e.mean_train_loss, e.dev_fer, e.skipped_updates, secs);
    log_line(buf);
  });
  const auto& h = o.result.history;
  std::cout << "best_epoch\t" << h.best_epoch << "\nbest_dev_fer\t" << format_double(h.best_dev_fer())
            << '\n';
  return 0;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::vector<std::string> checkpoints;
  std::string data;
  std::string split = "test";
  std::vector<std::string> decodes;
  std::string out;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  auto* c = app.add_subcommand("eval", "FER of checkpoints under decode configurations");
  c->add_option("--checkpoint", a.checkpoints, "checkpoint file (repeatable)")->required();
  c->add_option("--data", a.data, "dataset file or data directory")->required();
  c->add_option("--split", a.split, "split used with a data directory")
      ->check(CLI::IsMember({"train", "dev", "test"}))
      ->capture_default_str();
  c->add_option("--decode", a.decodes,
                "decode spec, e.g. online:lookahead=5 or batch:context=40,35,30 (repeatable)")
      ->required();
  c->add_option("--out", a.out, "also write the table to this file");
}

int run_eval(const EvalArgs& a) {
  std::vector<DecodeConfig> evals;
  for (const auto& s : a.decodes)
    for (const auto& d : parse_decode_specs(s)) evals.push_back(d);
  if (evals.empty()) throw ConfigError("eval needs at least one --decode");
  const Dataset ds = load_dataset(resolve_data(a.data, a.split).string());
  std::vector<NamedModel> models;
  for (const auto& path : a.checkpoints) {
    NamedModel m{path, "-", std::nullopt, ""};
    try {
      m.model = load_checkpoint(path);
      m.train_config = recorded_train_config(path);
    } catch (const std::exception& e) {
      m.error = e.what();
      log_line("cannot load " + path + ": " + e.what());
    }
    models.push_back(std::move(m));
  }
  std::ostringstream os;
  write_mismatch_table(os, mismatch_matrix(models, evals, ds));
  std::cout << os.str();
  if (!a.out.empty()) write_text(a.out, os.str());
  return 0;
}

// --- grad-probe ------------------------------------------------------------

struct ProbeArgs {
  std::string checkpoint;
  std::string data;
  std::string split = "test";
  std::string decode = "online";
  std::size_t delta = 20;
  std::size_t bins = 50;
  std::size_t stride = 5;
  double upper = 0.0;
  std::size_t order_scan = 0;
  std::string out;
};

void add_grad_probe(CLI::App& app, ProbeArgs& a) {
  auto* c = app.add_subcommand("grad-probe", "input-gradient norms at a fixed frame offset");
  c->add_option("--checkpoint", a.checkpoint, "checkpoint file")->required();
  c->add_option("--data", a.data, "dataset file or data directory")->required();
  c->add_option("--split", a.split, "split used with a data directory")
      ->check(CLI::IsMember({"train", "dev", "test"}))
      ->capture_default_str();
  c->add_option("--decode", a.decode, "graph the gradients flow through")->capture_default_str();
  c->add_option("--delta", a.delta, "frame offset")->capture_default_str()->check(
      CLI::PositiveNumber);
  c->add_option("--bins", a.bins, "histogram bins")->capture_default_str();
  c->add_option("--stride", a.stride, "prediction-time sampling stride (1 = every frame)")
      ->capture_default_str();
  c->add_option("--max", a.upper, "histogram upper edge (default: largest norm)");
  c->add_option("--order-scan", a.order_scan,
                "also scan offsets 1..N for the empirical Markov order");
  c->add_option("--out", a.out, "output directory (reports/ is created inside)")->required();
}

int run_grad_probe(const ProbeArgs& a) {
  const auto specs = parse_decode_specs(a.decode);
  if (specs.size() != 1) throw ConfigError("--decode must name a single configuration");
  const ModelParams model = load_checkpoint(a.checkpoint);
  const Dataset ds = load_dataset(resolve_data(a.data, a.split).string());
  const GradientReport r =
      gradient_histogram(model, ds, specs[0], a.delta, a.bins, a.stride,
                         a.upper > 0.0 ? std::optional<double>(a.upper) : std::nullopt);
  const fs::path dir = fs::path(a.out) / "reports";
  const std::string stem = "grad_delta" + std::to_string(a.delta);
  std::ostringstream hist, summary, norms;
  write_histogram(hist, r);
  write_gradient_summary(summary, r);
  write_norms(norms, r);
  write_text(dir / (stem + "_hist.tsv"), hist.str());
  write_text(dir / (stem + "_summary.tsv"), summary.str());
  write_text(dir / (stem + "_norms.tsv"), norms.str());
  std::cout << summary.str();
  if (a.order_scan > 0) {
    MarkovOrderOptions opt;
    opt.max_delta = a.order_scan;
    opt.stride = a.stride;
    const auto mo = empirical_markov_order(model, ds, opt, specs[0].lookahead);
    std::ostringstream os;
    os << "# delta\tmedian_norm\n";
    for (std::size_t d = 0; d < mo.medians.size(); ++d)
      os << d << '\t' << format_double(mo.medians[d]) << '\n';
    write_text(dir / "markov_order.tsv", os.str());
    std::cout << "epsilon\t" << format_double(mo.epsilon) << "\nmarkov_order\t"
              << (mo.order ? std::to_string(*mo.order) : "none<=" + std::to_string(a.order_scan))
              << '\n';
  }
  return 0;
}

// --- sweep -----------------------------------------------------------------

struct SweepArgs {
  std::string plan;
  std::string out;
  std::size_t parallel = 1;
};

void add_sweep(CLI::App& app, SweepArgs& a) {
  auto* c = app.add_subcommand("sweep", "run a plan of data and train/eval cells (resumable)");
  c->add_option("--plan", a.plan, "plan file")->required()->check(CLI::ExistingFile);
  c->add_option("--out", a.out, "output directory")->required();
  c->add_option("--parallel", a.parallel, "cells run concurrently")->capture_default_str();
}

int run_sweep_cmd(const SweepArgs& a) {
  std::ifstream is(a.plan);
  if (!is) throw DataError("cannot open plan '" + a.plan + "'");
  const Plan plan = parse_plan(is, a.plan);
  const SweepSummary s = run_sweep(plan, a.out, a.parallel, log_line);
  std::ostringstream os;
  write_master_table(os, s.rows);
  std::cout << os.str();
  log_line("cells trained " + std::to_string(s.trained) + ", reused " + std::to_string(s.reused) +
           ", failed " + std::to_string(s.failed));
  return s.failed > 0 ? kExitData : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rnnlab: online vs batch decoding for recurrent sequence labelers"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value config file with [train] section");
  app.allow_config_extras(CLI::config_extras_mode::error);

  GenArgs gen;
  TrainArgs tr;
  EvalArgs ev;
  ProbeArgs pr;
  SweepArgs sw;
  add_gen_data(app, gen);
  add_train(app, tr);
  add_eval(app, ev);
  add_grad_probe(app, pr);
  add_sweep(app, sw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (app.got_subcommand("gen-data")) return run_gen_data(gen);
    if (app.got_subcommand("train")) return run_train(tr);
    if (app.got_subcommand("eval")) return run_eval(ev);
    if (app.got_subcommand("grad-probe")) return run_grad_probe(pr);
    if (app.got_subcommand("sweep")) return run_sweep_cmd(sw);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
