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

// Experiment plumbing shared by the command-line tool and the acceptance
// suite: output directory layout, manifests, training jobs and sweep plans.
//
// Layout under an output directory:
//   manifest            key = value text with [section] headers
//   config              effective training config (train jobs only)
//   *.data              dataset splits (data jobs only)
//   checkpoints/        best.ckpt, last.ckpt
//   tables/             delimited text tables, one-line '#' schema header
//   reports/            gradient-probe outputs

#ifndef RNNLAB_EXPERIMENT_HPP_
#define RNNLAB_EXPERIMENT_HPP_

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rnnlab/analysis.hpp"
#include "rnnlab/checkpoint.hpp"
#include "rnnlab/errors.hpp"
#include "rnnlab/graphs.hpp"
#include "rnnlab/metrics.hpp"
#include "rnnlab/parallel.hpp"
#include "rnnlab/tasks.hpp"
#include "rnnlab/training.hpp"

namespace rnnlab {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Small text helpers.

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Shortest decimal form that round-trips.
inline std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string read_text(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw DataError("cannot open '" + p.string() + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

inline void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot open '" + p.string() + "' for writing");
  os << text;
  if (!os) throw DataError("write to '" + p.string() + "' failed");
}

// Ordered key = value document with [section] headers.
class KeyValueDoc {
 public:
  void set(const std::string& section, const std::string& key, const std::string& value) {
    for (auto& s : sections_) {
      if (s.first != section) continue;
      for (auto& kv : s.second)
        if (kv.first == key) {
          kv.second = value;
          return;
        }
      s.second.emplace_back(key, value);
      return;
    }
    sections_.push_back({section, {{key, value}}});
  }

  std::optional<std::string> get(const std::string& section, const std::string& key) const {
    for (const auto& s : sections_)
      if (s.first == section)
        for (const auto& kv : s.second)
          if (kv.first == key) return kv.second;
    return std::nullopt;
  }

  std::string str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < sections_.size(); ++i) {
      if (i) os << '\n';
      os << '[' << sections_[i].first << "]\n";
      for (const auto& [k, v] : sections_[i].second) os << k << " = " << v << '\n';
    }
    return os.str();
  }

  static KeyValueDoc parse(const std::string& text, const std::string& name = "<text>") {
    KeyValueDoc d;
    std::istringstream is(text);
    std::string line, section;
    std::size_t no = 0;
    while (std::getline(is, line)) {
      ++no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#' || line[first] == ';') continue;
      const auto last = line.find_last_not_of(" \t\r");
      line = line.substr(first, last - first + 1);
      if (line.front() == '[') {
        if (line.back() != ']') throw DataError(name + ":" + std::to_string(no) + ": bad section");
        section = line.substr(1, line.size() - 2);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw DataError(name + ":" + std::to_string(no) + ": expected key = value");
      auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t");
        const auto b = s.find_last_not_of(" \t");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      d.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return d;
  }

 private:
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections_;
};

// ---------------------------------------------------------------------------
// Data jobs.

inline void describe_task(KeyValueDoc& doc, const TaskSpec& t) {
  doc.set("task", "kind", to_string(t.kind));
  doc.set("task", "alphabet", std::to_string(t.symbols()));
  doc.set("task", "classes", std::to_string(t.label_count()));
  if (t.kind == TaskKind::kMarkov) doc.set("task", "order", std::to_string(t.order));
  if (t.kind == TaskKind::kModSum) doc.set("task", "modulus", std::to_string(t.classes));
  if (t.kind == TaskKind::kFuture)
    doc.set("task", "future_lookahead", std::to_string(t.future_lookahead));
  doc.set("task", "noise", format_double(t.noise));
  doc.set("task", "length", std::to_string(t.length));
  doc.set("task", "count", std::to_string(t.count));
  doc.set("task", "seed", std::to_string(t.seed));
}

// Visible frames of a decode configuration, as the oracle counts them.
inline OracleWindow oracle_window(const DecodeConfig& cfg) {
  const DecodeConfig d = cfg.for_decoding();
  if (d.mode == DecodeMode::kOnline) return {OracleWindow::kUnbounded, d.lookahead - 1};
  return {d.context - d.lookahead + 1, d.lookahead - 1};
}

struct OracleRow {
  DecodeConfig window;
  OracleResult result;
};

// Noiseless Bayes ceilings for a standard set of decode windows.
inline std::vector<OracleRow> standard_oracles(const TaskSpec& spec,
                                               const std::vector<std::size_t>& table) {
  TaskSpec clean = spec;
  clean.noise = 0.0;
  std::vector<DecodeConfig> windows;
  const std::size_t max_la = spec.kind == TaskKind::kFuture ? spec.future_lookahead + 1 : 1;
  for (std::size_t la = 1; la <= max_la; ++la) windows.push_back(DecodeConfig::online(la));
  for (std::size_t k : {1u, 2u, 4u, 8u, 16u})
    for (std::size_t la = 1; la <= std::min(max_la, k); ++la)
      windows.push_back(DecodeConfig::batch(k, la));
  std::vector<OracleRow> rows;
  for (const auto& w : windows) rows.push_back({w, bayes_oracle(clean, oracle_window(w), table)});
  return rows;
}

// Manifest key for a window: "batch:context=8,lookahead=1" -> "batch_context8_lookahead1".
inline std::string oracle_key(const DecodeConfig& cfg) {
  std::string k;
  for (char ch : cfg.label()) {
    if (ch == ':' || ch == ',') k += '_';
    else if (ch != '=') k += ch;
  }
  return k;
}

inline void write_oracle_table(std::ostream& os, const std::vector<OracleRow>& rows) {
  os << "# window\taccuracy\tinterior_accuracy\n";
  for (const auto& r : rows)
    os << r.window.label() << '\t' << format_double(r.result.accuracy) << '\t'
       << format_double(r.result.interior_accuracy) << '\n';
}

inline const char* kSplitNames[] = {"train", "dev", "test"};

inline fs::path split_path(const fs::path& dir, const std::string& split) {
  return dir / (split + ".data");
}

// Resolves a dataset argument: a file is used as is, a data directory
// contributes its `split` file.
inline fs::path resolve_data(const fs::path& p, const std::string& split) {
  return fs::is_directory(p) ? split_path(p, split) : p;
}

// Generates the task, writes the 80/10/10 splits and a manifest with the
// oracle ceilings. Refuses to overwrite unless `force`.
inline KeyValueDoc run_data_job(const TaskSpec& spec, const fs::path& out, bool force) {
  spec.validate();
  if (fs::exists(out / "manifest") && !force)
    throw ConfigError("'" + out.string() + "' already holds a dataset (use --force)");
  const GeneratedTask g = generate_task(spec);
  const DatasetSplits s = split_dataset(g.dataset);
  KeyValueDoc doc;
  describe_task(doc, spec);
  const Dataset* parts[] = {&s.train, &s.dev, &s.test};
  fs::create_directories(out);
  for (int i = 0; i < 3; ++i) {
    std::ostringstream os;
    write_dataset(os, *parts[i]);
    write_text(split_path(out, kSplitNames[i]), os.str());
    doc.set("splits", kSplitNames[i], std::string(kSplitNames[i]) + ".data");
    doc.set("splits", std::string(kSplitNames[i]) + "_sequences",
            std::to_string(parts[i]->sequences.size()));
  }
  const auto rows = standard_oracles(spec, g.dataset.table);
  for (const auto& r : rows)
    doc.set("oracle", oracle_key(r.window),
            format_double(r.result.accuracy) + " interior " +
                format_double(r.result.interior_accuracy));
  std::ostringstream ot;
  write_oracle_table(ot, rows);
  write_text(out / "tables" / "oracle.tsv", ot.str());
  write_text(out / "manifest", doc.str());
  return doc;
}

// ---------------------------------------------------------------------------
// Training jobs.

struct TrainJob {
  fs::path train_data;
  fs::path dev_data;
  CellKind cell = CellKind::kLstm;
  std::size_t layers = 2;
  std::size_t hidden = 32;
  TrainConfig config;
};

// The round-trippable [train] section of a job.
inline KeyValueDoc describe_job(const TrainJob& job) {
  KeyValueDoc doc;
  const auto& c = job.config;
  doc.set("train", "train-data", job.train_data.string());
  doc.set("train", "dev-data", job.dev_data.string());
  doc.set("train", "cell", to_string(job.cell));
  doc.set("train", "layers", std::to_string(job.layers));
  doc.set("train", "hidden", std::to_string(job.hidden));
  doc.set("train", "decode", c.decode.mode == DecodeMode::kOnline ? "online" : "batch");
  doc.set("train", "lookahead", std::to_string(c.decode.lookahead));
  if (c.decode.mode == DecodeMode::kBatch) {
    doc.set("train", "context", std::to_string(c.decode.context));
    doc.set("train", "predict", std::to_string(c.decode.predict));
  }
  doc.set("train", "step", format_double(c.step));
  doc.set("train", "clip", format_double(c.clip));
  doc.set("train", "epochs", std::to_string(c.epochs));
  doc.set("train", "seed", std::to_string(c.seed));
  doc.set("train", "loss-window", std::to_string(c.loss_window));
  return doc;
}

struct TrainOutcome {
  TrainResult result;
  ModelSpec spec;
};

inline TrainOutcome run_train_job(const TrainJob& job, const fs::path& out, bool force,
                                  const EpochCallback& on_epoch = {}) {
  job.config.validate();
  if (fs::exists(out / "checkpoints" / "best.ckpt") && !force)
    throw ConfigError("'" + out.string() + "' already holds a trained model (use --force)");
  const Dataset train_set = load_dataset(job.train_data.string());
  const Dataset dev_set = load_dataset(job.dev_data.string());
  TrainOutcome o;
  o.spec = {job.cell, job.layers, job.hidden, train_set.dim,
            std::max(train_set.classes, dev_set.classes)};
  o.result = train(o.spec, job.config, train_set, dev_set, on_epoch);
  if (o.result.history.skipped_updates == job.config.epochs * train_set.sequences.size())
    throw NumericError("every update had a non-finite gradient");

  const auto& h = o.result.history;
  fs::create_directories(out / "checkpoints");
  save_checkpoint(o.result.best, (out / "checkpoints" / "best.ckpt").string());
  save_checkpoint(o.result.last, (out / "checkpoints" / "last.ckpt").string());
  std::ostringstream hist, upd;
  write_history_table(hist, h);
  write_update_table(upd, h);
  write_text(out / "tables" / "history.tsv", hist.str());
  write_text(out / "tables" / "updates.tsv", upd.str());
  write_text(out / "config", describe_job(job).str());

  KeyValueDoc m;
  m.set("model", "cell", to_string(o.spec.kind));
  m.set("model", "layers", std::to_string(o.spec.layers));
  m.set("model", "hidden", std::to_string(o.spec.hidden));
  m.set("model", "input_dim", std::to_string(o.spec.input_dim));
  m.set("model", "labels", std::to_string(o.spec.labels));
  const DecodeConfig& d = job.config.decode;
  m.set("train", "decode", d.label());
  if (d.mode == DecodeMode::kBatch) {
    m.set("train", "chain_length", std::to_string(d.context));
    m.set("train", "past_coverage", std::to_string(d.past_coverage()));
  }
  m.set("result", "best_epoch", std::to_string(h.best_epoch));
  m.set("result", "best_dev_fer", format_double(h.best_dev_fer()));
  m.set("result", "updates", std::to_string(h.update_loss.size()));
  m.set("result", "skipped_updates", std::to_string(h.skipped_updates));
  write_text(out / "manifest", m.str());
  return o;
}

// Training decode label recorded next to a checkpoint, if any.
inline std::string recorded_train_config(const fs::path& checkpoint) {
  const fs::path manifest = checkpoint.parent_path().parent_path() / "manifest";
  if (!fs::exists(manifest)) return "-";
  const auto doc = KeyValueDoc::parse(read_text(manifest), manifest.string());
  return doc.get("train", "decode").value_or("-");
}

// ---------------------------------------------------------------------------
// Sweep plans.
//
//   # comment
//   data <name> task=markov order=6 alphabet=2 classes=4 length=100 count=500 seed=11
//   cell <name> data=<name> train=<decode spec> eval=<decode spec> [eval=...]
//        [cell=lstm layers=2 hidden=32 step=0.05 clip=5 epochs=20 seed=1 split=test]
//        [eval-data=<name>]
//
// Each data line becomes <out>/data/<name>; each cell line trains into
// <out>/cells/<name> and evaluates its best checkpoint under every eval spec,
// on the `split` of eval-data (default: the training data).

struct PlanData {
  std::string name;
  TaskSpec spec;
  std::string canonical;
};

struct PlanCell {
  std::string name;
  std::string data;
  std::string eval_data;  // defaults to `data`
  TrainJob job;
  std::vector<DecodeConfig> evals;
  std::string split = "test";
  std::string canonical;
};

struct Plan {
  std::vector<PlanData> datasets;
  std::vector<PlanCell> cells;
};

namespace detail {

inline std::size_t plan_count(const std::string& key, const std::string& v, const std::string& where) {
  std::size_t pos = 0;
  long long n = -1;
  try {
    n = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || n < 0) throw ConfigError(where + ": bad value for " + key + ": '" + v + "'");
  return static_cast<std::size_t>(n);
}

inline double plan_real(const std::string& key, const std::string& v, const std::string& where) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size()) throw ConfigError(where + ": bad value for " + key + ": '" + v + "'");
  return x;
}

}  // namespace detail

inline Plan parse_plan(std::istream& is, const std::string& name = "<plan>") {
  Plan plan;
  std::string line;
  std::size_t no = 0;
  while (std::getline(is, line)) {
    ++no;
    const std::string where = name + ":" + std::to_string(no);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() < 2 || (tok[0] != "data" && tok[0] != "cell"))
      throw ConfigError(where + ": expected 'data <name> ...' or 'cell <name> ...'");
    std::string canonical = tok[0];
    std::vector<std::pair<std::string, std::string>> kv;
    for (std::size_t i = 1; i < tok.size(); ++i) {
      canonical += ' ' + tok[i];
      if (i == 1) continue;
      const auto eq = tok[i].find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError(where + ": expected key=value, got '" + tok[i] + "'");
      kv.emplace_back(tok[i].substr(0, eq), tok[i].substr(eq + 1));
    }
    if (tok[0] == "data") {
      PlanData d{tok[1], {}, canonical};
      std::optional<std::size_t> modulus;
      for (const auto& [k, v] : kv) {
        if (k == "task") d.spec.kind = parse_task_kind(v);
        else if (k == "order") d.spec.order = detail::plan_count(k, v, where);
        else if (k == "modulus") modulus = detail::plan_count(k, v, where);
        else if (k == "future-lookahead") d.spec.future_lookahead = detail::plan_count(k, v, where);
        else if (k == "alphabet") d.spec.alphabet = detail::plan_count(k, v, where);
        else if (k == "classes") d.spec.classes = detail::plan_count(k, v, where);
        else if (k == "noise") d.spec.noise = detail::plan_real(k, v, where);
        else if (k == "length") d.spec.length = detail::plan_count(k, v, where);
        else if (k == "count") d.spec.count = detail::plan_count(k, v, where);
        else if (k == "seed") d.spec.seed = detail::plan_count(k, v, where);
        else throw ConfigError(where + ": unknown data key '" + k + "'");
      }
      if (modulus) d.spec.classes = *modulus;
      d.spec.validate();
      for (const auto& other : plan.datasets)
        if (other.name == d.name) throw ConfigError(where + ": duplicate data '" + d.name + "'");
      plan.datasets.push_back(std::move(d));
      continue;
    }
    PlanCell c;
    c.name = tok[1];
    c.canonical = canonical;
    bool has_train = false;
    for (const auto& [k, v] : kv) {
      auto& cfg = c.job.config;
      if (k == "data") c.data = v;
      else if (k == "eval-data") c.eval_data = v;
      else if (k == "train") {
        const auto specs = parse_decode_specs(v);
        if (specs.size() != 1) throw ConfigError(where + ": train= must name one decode config");
        cfg.decode = specs[0];
        has_train = true;
      } else if (k == "eval") {
        for (const auto& e : parse_decode_specs(v)) c.evals.push_back(e);
      } else if (k == "cell") c.job.cell = parse_cell_kind(v);
      else if (k == "layers") c.job.layers = detail::plan_count(k, v, where);
      else if (k == "hidden") c.job.hidden = detail::plan_count(k, v, where);
      else if (k == "step") cfg.step = detail::plan_real(k, v, where);
      else if (k == "clip") cfg.clip = detail::plan_real(k, v, where);
      else if (k == "epochs") cfg.epochs = detail::plan_count(k, v, where);
      else if (k == "seed") cfg.seed = detail::plan_count(k, v, where);
      else if (k == "split") c.split = v;
      else throw ConfigError(where + ": unknown cell key '" + k + "'");
    }
    if (!has_train) throw ConfigError(where + ": cell needs train=<decode spec>");
    if (c.evals.empty()) throw ConfigError(where + ": cell needs at least one eval=<decode spec>");
    if (c.split != "train" && c.split != "dev" && c.split != "test")
      throw ConfigError(where + ": split must be train, dev or test");
    c.job.config.validate();
    if (c.eval_data.empty()) c.eval_data = c.data;
    for (const std::string* ref : {&c.data, &c.eval_data}) {
      const PlanData* data = nullptr;
      for (const auto& d : plan.datasets)
        if (d.name == *ref) data = &d;
      if (data == nullptr) throw ConfigError(where + ": cell refers to unknown data '" + *ref + "'");
      c.canonical += '\n' + data->canonical;
    }
    for (const auto& other : plan.cells)
      if (other.name == c.name) throw ConfigError(where + ": duplicate cell '" + c.name + "'");
    plan.cells.push_back(std::move(c));
  }
  return plan;
}

struct SweepRow {
  std::string cell;
  std::string data;
  std::string train_config;
  std::string eval_config;
  double fer = 0.0;
  std::string error;
};

struct SweepSummary {
  std::vector<SweepRow> rows;
  std::size_t trained = 0;
  std::size_t reused = 0;
  std::size_t failed = 0;
};

inline void write_master_table(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "# cell\tdata\ttrain_config\teval_config\tfer\n";
  char buf[40];
  for (const auto& r : rows) {
    os << r.cell << '\t' << r.data << '\t' << r.train_config << '\t' << r.eval_config << '\t';
    if (r.error.empty()) {
      std::snprintf(buf, sizeof buf, "%.6f", r.fer);
      os << buf << '\n';
    } else {
      os << "ERROR\n";
    }
  }
}

using SweepLog = std::function<void(const std::string&)>;

// Runs every cell of the plan. A cell whose recorded hash matches its plan
// line is not retrained; its checkpoint is re-evaluated. Failures are
// recorded per cell and the sweep continues.
inline SweepSummary run_sweep(const Plan& plan, const fs::path& out, std::size_t parallel = 1,
                              const SweepLog& log = {}) {
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  for (const auto& d : plan.datasets) {
    const fs::path dir = out / "data" / d.name;
    const std::string hash = hex64(fnv1a64(d.canonical));
    if (fs::exists(dir / "hash") && read_text(dir / "hash") == hash) continue;
    say("data " + d.name);
    run_data_job(d.spec, dir, true);
    write_text(dir / "hash", hash);
  }

  SweepSummary summary;
  std::vector<std::vector<SweepRow>> rows(plan.cells.size());
  std::vector<int> status(plan.cells.size(), 0);  // 1 trained, 2 reused, 3 failed
  parallel_for(
      plan.cells.size(),
      [&](std::size_t i) {
        const PlanCell& c = plan.cells[i];
        const fs::path dir = out / "cells" / c.name;
        const fs::path data = out / "data" / c.data;
        const std::string data_label =
            c.eval_data == c.data ? c.data : c.data + ">" + c.eval_data;
        const std::string hash = hex64(fnv1a64(c.canonical));
        const std::string train_label = c.job.config.decode.label();
        try {
          const fs::path ckpt = dir / "checkpoints" / "best.ckpt";
          if (fs::exists(dir / "hash") && fs::exists(ckpt) && read_text(dir / "hash") == hash) {
            status[i] = 2;
          } else {
            fs::remove(dir / "hash");
            fs::remove(dir / "error");
            TrainJob job = c.job;
            job.train_data = split_path(data, "train");
            job.dev_data = split_path(data, "dev");
            say("train " + c.name + " (" + train_label + ")");
            run_train_job(job, dir, true);
            write_text(dir / "hash", hash);
            status[i] = 1;
          }
          const ModelParams model = load_checkpoint(ckpt.string());
          const Dataset eval_set =
              load_dataset(split_path(out / "data" / c.eval_data, c.split).string());
          for (const auto& e : c.evals) {
            SweepRow r{c.name, data_label, train_label, e.label(), 0.0, ""};
            try {
              r.fer = evaluate_fer(model, eval_set, e);
            } catch (const std::exception& ex) {
              r.error = ex.what();
            }
            rows[i].push_back(std::move(r));
          }
        } catch (const std::exception& ex) {
          status[i] = 3;
          write_text(dir / "error", std::string(ex.what()) + "\n");
          say("cell " + c.name + " failed: " + ex.what());
          for (const auto& e : c.evals)
            rows[i].push_back({c.name, data_label, train_label, e.label(), 0.0, ex.what()});
        }
      },
      std::max<std::size_t>(1, parallel));
  for (std::size_t i = 0; i < plan.cells.size(); ++i) {
    summary.trained += status[i] == 1;
    summary.reused += status[i] == 2;
    summary.failed += status[i] == 3;
    for (auto& r : rows[i]) summary.rows.push_back(std::move(r));
  }
  std::ostringstream os;
  write_master_table(os, summary.rows);
  write_text(out / "tables" / "master.tsv", os.str());
  return summary;
}

}  // namespace rnnlab

#endif  // RNNLAB_EXPERIMENT_HPP_
