// src/runner.hpp

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

#ifndef CRPKIT_RUNNER_HPP_
#define CRPKIT_RUNNER_HPP_

#include <string>
#include <vector>

#include "runconfig.hpp"
#include "training.hpp"

namespace crpkit {

// Command implementations behind the CLI. Each creates out_dir if needed,
// writes its outputs plus the fully resolved config there, and throws crpkit
// errors on failure (config_error / usage_error for bad requests, the rest
// for runtime trouble). Data artifacts (WAV, CSV, checkpoints) are byte
// deterministic under an identical resolved config; the enhance report's
// runtime field is the one declared exception.

struct GenerateResult {
  std::string manifest_path;
  int pairs_written = 0;
};

struct TrainRunResult {
  std::string checkpoint_path;
  std::string log_path;
  double best_val = 0.0;
  int steps = 0;
};

struct EnhanceResult {
  std::string wav_path;
  std::string report_path;
  int nfe = 0;
  bool schedule_match = true;
  double runtime_seconds = 0.0;
};

struct SweepResult {
  std::string results_csv;
  std::string summary_json;
  std::string curves_csv;
  std::vector<std::string> warnings;  // one line per skipped method
  int methods_evaluated = 0;
};

// One enhancement in memory: analysis in the checkpoint's compressed domain,
// a reverse solve (or a single predictive pass), synthesis back to the time
// domain, trimmed to the input length. mode is "em" or "pc".
struct EnhanceOutput {
  TimeSignal enhanced;
  int nfe = 0;
  Schedule schedule;  // empty for predictive models
  bool schedule_match = true;
};

EnhanceOutput enhance_signal(const Checkpoint& ck, const TimeSignal& noisy,
                             int n_steps, const std::string& mode,
                             const CorrectorConfig& corrector,
                             std::uint64_t seed);

GenerateResult cmd_generate(const RunConfig& cfg, const std::string& out_dir);

// stage selects the loop; crp requires the stage-1 checkpoint path.
TrainRunResult cmd_train(const RunConfig& cfg, Stage stage,
                         const std::string& from_checkpoint,
                         const std::string& out_dir);

EnhanceResult cmd_enhance(const RunConfig& cfg, const std::string& out_dir);

SweepResult cmd_sweep(const RunConfig& cfg, const std::string& out_dir);

// The train/sweep data pipeline: load the manifest when configured, else
// synthesize pairs in memory, then lift everything into the compressed
// domain. Exposed for tests and the acceptance harness.
std::vector<TrainPair> assemble_pairs(const RunConfig& cfg);

}  // namespace crpkit

#endif  // CRPKIT_RUNNER_HPP_
