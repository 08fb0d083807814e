// src/runconfig.hpp

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

#ifndef CRPKIT_RUNCONFIG_HPP_
#define CRPKIT_RUNCONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "sampler.hpp"
#include "sde.hpp"
#include "spectral.hpp"
#include "training.hpp"

namespace crpkit {

// Everything a run needs, in one versioned record. Parsing is strict: an
// unknown key anywhere is a config_error naming the key, so typos fail fast
// instead of silently running with defaults. Missing keys take the defaults
// below, and the fully resolved record is written next to every command's
// outputs so any run can be replayed bit for bit from that file alone.

struct DataSection {
  int num_pairs = 8;
  int test_pairs = 2;  // held-out tail of the pair list
  int signal_length = 528;
  int sample_rate = 8000;
  double snr_lo_db = 0.0;
  double snr_hi_db = 20.0;
  int tone_count = 3;
  double noise_ar_coefficient = 0.8;
  std::string manifest;  // when set, load this dataset instead of generating

  MixtureSpec mixture(std::uint64_t seed) const;
};

struct StftSection {
  int window_length = 64;
  int hop = 16;
};

struct TrainSection {
  int batch_size = 16;
  int epochs = 30;
  double lr = 1e-4;
  double weight_decay = 1e-6;
  double ema_decay = 0.999;
  int validation_every = 50;
  int validation_pairs = 10;
  // Accepted under train_crp only: length of the tuned solver schedule the
  // fine-tune unrolls, and whether intermediate steps inject noise.
  int n_steps = 5;
  bool stochastic_rollout = true;
};

struct EnhanceSection {
  std::string checkpoint;
  std::string input_wav;
  int n_steps = 5;
  std::string mode = "em";  // em | pc
};

struct SweepSection {
  std::vector<int> nfe_grid = {1, 2, 3, 4, 5, 8, 16, 32};
  std::string mode = "em";  // em | pc
  std::vector<std::uint64_t> eval_seeds = {0};
  std::string checkpoint_dsm;
  std::string checkpoint_crp;
  std::string checkpoint_predictive;
};

struct RunConfig {
  std::uint64_t seed = 0;
  DataSection data;
  StftSection stft;
  Compression comp;
  BbedParams sde;
  NetConfig net;  // time_conditioned is implied by the stage, not configured
  TrainSection train_dsm;
  TrainSection train_crp;
  TrainSection train_predictive;
  CorrectorConfig corrector;
  EnhanceSection enhance;
  SweepSection sweep;

  StftMeta stft_meta() const;
  // Assembles the training module's config for one stage. For crp the tuned
  // schedule is built from the sde times and train_crp.n_steps.
  TrainConfig train_config(Stage stage) const;

  // Cross-field checks with config-path diagnostics ("data.snr_lo_db ...").
  void validate() const;
};

// Strict parse of the JSON text; requires schema_version = 1.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Fully resolved record, every field explicit; reparsing reproduces `cfg`.
std::string serialize_run_config(const RunConfig& cfg);
void write_run_config(const RunConfig& cfg, const std::string& path);

}  // namespace crpkit

#endif  // CRPKIT_RUNCONFIG_HPP_
