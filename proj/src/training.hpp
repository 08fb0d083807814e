// src/training.hpp

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

#ifndef CRPKIT_TRAINING_HPP_
#define CRPKIT_TRAINING_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "network.hpp"
#include "optim.hpp"
#include "sampler.hpp"
#include "sde.hpp"
#include "spectral.hpp"

namespace crpkit {

enum class Stage { kDsm, kCrp, kPredictive };

const char* stage_name(Stage stage);
Stage stage_from_name(const std::string& name);

// One training example in the compressed STFT domain.
struct TrainPair {
  CompressedSpec x0;
  CompressedSpec y;
};

// STFT + magnitude compression of a generated time-domain pair list.
std::vector<TrainPair> make_train_pairs(const std::vector<GeneratedPair>& raw,
                                        const StftMeta& meta,
                                        const Compression& compression);

struct TrainConfig {
  Stage stage = Stage::kDsm;
  int batch_size = 16;
  int epochs = 30;
  double lr = 1e-4;
  double weight_decay = 1e-6;
  double ema_decay = 0.999;
  int validation_every = 50;  // steps between validation passes
  int validation_pairs = 10;  // held out from the tail of the pair list
  std::uint64_t seed = 0;
  NetConfig net;
  BbedParams sde;
  Schedule crp_schedule;              // stage crp only
  bool crp_stochastic_rollout = true;

  void validate() const;
};

// Self-contained model snapshot: layout, parameters, optimizer and EMA
// state, the stage tag, the SDE constants it was trained against, and (for
// fine-tuned models) the schedule it was tuned for.
struct Checkpoint {
  std::string stage;
  NetConfig net;
  BbedParams sde;
  // The compressed domain the model was trained in; enhancement rebuilds the
  // exact same analysis front end from these.
  StftMeta stft;
  Compression comp;
  std::vector<double> theta;
  AdamState adam;
  std::vector<double> ema_shadow;  // empty for predictive models
  double ema_decay = 0.999;
  Schedule schedule;               // crp only; empty otherwise
  std::uint64_t schedule_hash = 0;
  double best_val = 0.0;

  // Weights to evaluate with: the EMA shadow when tracked, else theta.
  const std::vector<double>& eval_params() const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

struct TrainLogRow {
  int step = 0;
  int epoch = 0;
  std::string stage;
  double loss = 0.0;
  double val_metric = 0.0;  // NaN when this step ran no validation
  double ema_gap = 0.0;     // L2 distance between theta and the shadow
};

void write_training_log(const std::vector<TrainLogRow>& rows,
                        const std::string& path);

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<TrainLogRow> log;
};

// Denoising loss for one pair: draws (X_t, Z) from the kernel at time t,
// records the network on the tape and returns the node holding
// ||s_theta(X_t, Y, t) + Z / sigma(t)||^2 * scale.
NodeId dsm_loss(const ScoreNetwork& net, const Sde& sde,
                const CompressedSpec& x0, const CompressedSpec& y, double t,
                Rng* rng, Tape* tape, double scale = 1.0);

// Stage 1: denoising score matching with Adam and an EMA shadow; returns the
// best-validation checkpoint (validated with the shadow weights).
TrainResult train_dsm(const std::vector<TrainPair>& data,
                      const TrainConfig& cfg);

// Inference rollout for fine-tuning: prior draw, tape-free prefix steps with
// noise per `stochastic`, and the final step (t_1 -> 0, noiseless) with its
// score call recorded on the tape. x0 is used for shape checking only; the
// rollout never sees the clean target.
struct CrpRollout {
  NodeId estimate_node = -1;
  CompressedSpec estimate;
  int score_calls = 0;
  int taped_score_calls = 0;
};

CrpRollout crp_rollout(const CompressedSpec& x0, const CompressedSpec& y,
                       const ScoreNetwork& net, const Schedule& sched,
                       const BbedSde& sde, NoiseStream* noise, bool stochastic,
                       Tape* tape);

// Squared distance in the compressed domain (sum over entries, not mean).
double crp_loss(const CompressedSpec& x_tilde0, const CompressedSpec& x0);

// Same quantity as a tape node: scale * sum |estimate - x0|^2. The estimate
// node carries flattened rows, so the check is on the entry count.
NodeId crp_loss_node(Tape* tape, NodeId estimate_node,
                     const CompressedSpec& x0, double scale);

// Stage 2: fine-tunes a stage-1 checkpoint over full rollouts, gradients
// restricted to the final score call; fresh Adam and EMA state.
TrainResult train_crp(const std::vector<TrainPair>& data,
                      const TrainConfig& cfg, const Checkpoint& stage1);

// Baseline: time-unconditioned network mapping Y directly to X_0; no EMA.
TrainResult train_predictive(const std::vector<TrainPair>& data,
                             const TrainConfig& cfg);

// Gaussian prior task with a closed-form marginal score, used to measure
// absolute score accuracy: X_0 ~ N(mean, gamma^2 I) per complex entry, fixed
// mixture y.
struct GaussianToyTask {
  std::vector<double> mean;
  double gamma = 0.5;
  std::vector<double> y;
  std::size_t frames = 1;

  void validate() const;
  CompressedSpec mean_spec() const;
  CompressedSpec y_spec() const;
};

std::vector<TrainPair> sample_toy_pairs(const GaussianToyTask& task, int count,
                                        Rng* rng);

// -(xt - ((1-t) mean + t y)) / ((1-t)^2 gamma^2 + sigma(t)^2).
CompressedSpec analytic_score(const GaussianToyTask& task,
                              const CompressedSpec& xt, double t,
                              const BbedSde& sde);

// Mean over draws of ||s_net - s_exact|| / ||s_exact|| at random (x0, t, xt).
double toy_score_error(const GaussianToyTask& task, const ScoreNetwork& net,
                       const std::vector<double>& params, const BbedSde& sde,
                       int samples, Rng* rng);

}  // namespace crpkit

#endif  // CRPKIT_TRAINING_HPP_
