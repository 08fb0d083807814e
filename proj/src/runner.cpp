// src/runner.cpp

// Copyright 2026  CRP-Kit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "dataset.hpp"
#include "errors.hpp"
#include "json.hpp"
#include "metrics.hpp"
#include "network.hpp"
#include "sampler.hpp"
#include "sde.hpp"
#include "spectral.hpp"
#include "wav.hpp"

namespace crpkit {

namespace {

namespace fs = std::filesystem;

std::string ensure_out_dir(const std::string& out_dir) {
  if (out_dir.empty()) {
    throw config_error("out directory must not be empty");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw io_error("cannot create output directory: " + out_dir);
  }
  return out_dir;
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_resolved(const RunConfig& cfg, const std::string& out_dir,
                    const std::string& command_tag) {
  write_run_config(cfg, join(out_dir, "resolved_" + command_tag + ".json"));
}

CompressedSpec analyze(const TimeSignal& sig, const StftMeta& meta,
                       const Compression& comp) {
  return compress(stft(sig, meta.window_length, meta.hop), comp.alpha,
                  comp.beta, meta);
}

TimeSignal synthesize(const CompressedSpec& spec) {
  return istft(decompress(spec), spec.meta.window_length, spec.meta.hop,
               spec.meta.sample_rate);
}

// The held-out tail of the pair list; the front is the training split.
std::vector<TrainPair> test_split(const std::vector<TrainPair>& all,
                                  int test_pairs) {
  if (test_pairs < 1 || static_cast<std::size_t>(test_pairs) >= all.size()) {
    throw config_error("config: data.test_pairs leaves no usable split");
  }
  return {all.end() - test_pairs, all.end()};
}

std::vector<TrainPair> train_split(const std::vector<TrainPair>& all,
                                   int test_pairs) {
  return {all.begin(), all.end() - test_pairs};
}

}  // namespace

std::vector<TrainPair> assemble_pairs(const RunConfig& cfg) {
  std::vector<GeneratedPair> raw;
  if (!cfg.data.manifest.empty()) {
    raw = load_dataset(cfg.data.manifest);
  } else {
    raw = generate_pairs(cfg.data.mixture(cfg.seed));
  }
  return make_train_pairs(raw, cfg.stft_meta(), cfg.comp);
}

GenerateResult cmd_generate(const RunConfig& cfg, const std::string& out_dir) {
  if (!cfg.data.manifest.empty()) {
    throw config_error(
        "config: data.manifest must be empty when generating a dataset");
  }
  ensure_out_dir(out_dir);
  const MixtureSpec ms = cfg.data.mixture(cfg.seed);
  const std::vector<GeneratedPair> pairs = generate_pairs(ms);
  GenerateResult res;
  res.manifest_path = write_dataset(out_dir, ms, pairs);
  res.pairs_written = static_cast<int>(pairs.size());
  write_resolved(cfg, out_dir, "generate");
  return res;
}

TrainRunResult cmd_train(const RunConfig& cfg, Stage stage,
                         const std::string& from_checkpoint,
                         const std::string& out_dir) {
  if (stage == Stage::kCrp && from_checkpoint.empty()) {
    throw config_error(
        "train: stage crp requires --from with the first-stage checkpoint");
  }
  if (stage != Stage::kCrp && !from_checkpoint.empty()) {
    throw config_error("train: --from is only meaningful for stage crp");
  }
  ensure_out_dir(out_dir);

  const std::vector<TrainPair> all = assemble_pairs(cfg);
  const std::vector<TrainPair> train = train_split(all, cfg.data.test_pairs);
  const TrainConfig tc = cfg.train_config(stage);

  TrainResult result;
  switch (stage) {
    case Stage::kDsm:
      result = train_dsm(train, tc);
      break;
    case Stage::kCrp:
      result = train_crp(train, tc, load_checkpoint(from_checkpoint));
      break;
    case Stage::kPredictive:
      result = train_predictive(train, tc);
      break;
  }

  TrainRunResult out;
  out.checkpoint_path =
      join(out_dir, std::string(stage_name(stage)) + ".ckpt");
  out.log_path =
      join(out_dir, std::string(stage_name(stage)) + "_train_log.csv");
  save_checkpoint(result.checkpoint, out.checkpoint_path);
  write_training_log(result.log, out.log_path);
  out.best_val = result.checkpoint.best_val;
  out.steps = result.log.empty() ? 0 : result.log.back().step;
  write_resolved(cfg, out_dir, std::string("train_") + stage_name(stage));
  return out;
}

EnhanceOutput enhance_signal(const Checkpoint& ck, const TimeSignal& noisy,
                             int n_steps, const std::string& mode,
                             const CorrectorConfig& corrector,
                             std::uint64_t seed) {
  if (n_steps < 1) {
    throw config_error("enhance: n_steps must be >= 1");
  }
  if (mode != "em" && mode != "pc") {
    throw config_error("enhance: mode must be \"em\" or \"pc\"");
  }
  if (noisy.sample_rate != ck.stft.sample_rate) {
    throw config_error("enhance: input sample rate does not match the model");
  }
  if (static_cast<int>(noisy.samples.size()) < ck.stft.window_length) {
    throw config_error("enhance: input shorter than one analysis window");
  }
  const CompressedSpec y = analyze(noisy, ck.stft, ck.comp);

  Rng ctor_rng(0);
  ScoreNetwork net(ck.net, &ctor_rng);
  if (ck.theta.size() != net.param_count()) {
    throw usage_error("enhance: checkpoint parameter count mismatch");
  }
  const std::vector<double>& params = ck.eval_params();

  EnhanceOutput res;
  CompressedSpec estimate;
  if (ck.stage == "predictive") {
    net.forward_with(params, y, y, 0.0, &estimate);
    res.nfe = 1;
  } else {
    res.schedule = build_schedule(ck.sde.t_rsp, ck.sde.t_eps, n_steps);
    const BbedSde sde(ck.sde);
    SolveOptions opts;
    opts.mode = mode == "pc" ? SamplerMode::kPc : SamplerMode::kEm;
    opts.corrector = corrector;
    Rng rng(seed);
    const ScoreFn score = network_score_with(&net, &params);
    const ReverseResult r =
        solve_reverse(sde, y, score, res.schedule, &rng, opts);
    estimate = r.estimate;
    res.nfe = r.nfe;
    res.schedule_match =
        ck.stage == "crp" ? res.schedule.hash() == ck.schedule_hash : true;
  }

  res.enhanced = synthesize(estimate);
  res.enhanced.samples.resize(noisy.samples.size(), 0.0);
  return res;
}

EnhanceResult cmd_enhance(const RunConfig& cfg, const std::string& out_dir) {
  if (cfg.enhance.checkpoint.empty()) {
    throw config_error("config: enhance.checkpoint is required");
  }
  if (cfg.enhance.input_wav.empty()) {
    throw config_error("config: enhance.input_wav is required");
  }
  ensure_out_dir(out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  const Checkpoint ck = load_checkpoint(cfg.enhance.checkpoint);
  const TimeSignal noisy = read_wav(cfg.enhance.input_wav);
  const EnhanceOutput out = enhance_signal(
      ck, noisy, cfg.enhance.n_steps, cfg.enhance.mode, cfg.corrector,
      cfg.seed);

  EnhanceResult res;
  res.nfe = out.nfe;
  res.schedule_match = out.schedule_match;
  res.wav_path = join(out_dir, "enhanced.wav");
  write_wav(res.wav_path, out.enhanced);
  const Schedule& sched = out.schedule;

  const auto t1 = std::chrono::steady_clock::now();
  res.runtime_seconds = std::chrono::duration<double>(t1 - t0).count();

  const nlohmann::json report = {
      {"schema_version", 1},
      {"checkpoint_stage", ck.stage},
      {"mode", ck.stage == "predictive" ? "forward" : cfg.enhance.mode},
      {"nfe", res.nfe},
      {"schedule", sched.times},
      {"schedule_match", res.schedule_match},
      {"seed", cfg.seed},
      {"runtime_seconds", res.runtime_seconds}};
  res.report_path = join(out_dir, "enhance_report.json");
  std::ofstream report_out(res.report_path, std::ios::binary);
  if (!report_out.good()) {
    throw io_error("enhance: cannot write " + res.report_path);
  }
  report_out << report.dump(2) << "\n";
  write_resolved(cfg, out_dir, "enhance");
  return res;
}

SweepResult cmd_sweep(const RunConfig& cfg, const std::string& out_dir) {
  ensure_out_dir(out_dir);
  const std::vector<TrainPair> all = assemble_pairs(cfg);
  const std::vector<TrainPair> test = test_split(all, cfg.data.test_pairs);

  EvalOptions opts;
  opts.mode = cfg.sweep.mode == "pc" ? SamplerMode::kPc : SamplerMode::kEm;
  opts.corrector = cfg.corrector;

  struct MethodSlot {
    const char* method;
    const std::string& path;
  };
  const MethodSlot slots[] = {{"baseline_dsm", cfg.sweep.checkpoint_dsm},
                              {"crp", cfg.sweep.checkpoint_crp},
                              {"predictive", cfg.sweep.checkpoint_predictive}};

  SweepResult res;
  std::vector<EvalRecord> records;
  for (const MethodSlot& slot : slots) {
    if (slot.path.empty() || !fs::exists(slot.path)) {
      const std::string why = slot.path.empty()
                                  ? "no checkpoint configured"
                                  : "checkpoint missing: " + slot.path;
      EvalRecord skip;
      skip.pair_id = -1;
      skip.method = slot.method;
      skip.warning = why;
      records.push_back(skip);
      res.warnings.push_back(std::string(slot.method) + " skipped: " + why);
      continue;
    }
    const Checkpoint ck = load_checkpoint(slot.path);
    if (ck.stage == "predictive") {
      // One fixed forward pass; the grid does not apply.
      const auto recs =
          evaluate_method(ck, test, Schedule{}, opts, cfg.sweep.eval_seeds);
      records.insert(records.end(), recs.begin(), recs.end());
    } else {
      for (const int nfe : cfg.sweep.nfe_grid) {
        const Schedule sched =
            build_schedule(ck.sde.t_rsp, ck.sde.t_eps, nfe);
        const auto recs =
            evaluate_method(ck, test, sched, opts, cfg.sweep.eval_seeds);
        records.insert(records.end(), recs.begin(), recs.end());
      }
    }
    ++res.methods_evaluated;
  }

  res.results_csv = join(out_dir, "results.csv");
  res.summary_json = join(out_dir, "summary.json");
  res.curves_csv = join(out_dir, "curves.csv");
  write_results_csv(records, res.results_csv);
  write_summary_json(records, res.summary_json);
  write_curves_csv(records, res.curves_csv);
  write_resolved(cfg, out_dir, "sweep");
  return res;
}

}  // namespace crpkit
