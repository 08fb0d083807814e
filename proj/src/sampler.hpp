// src/sampler.hpp

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

#ifndef CRPKIT_SAMPLER_HPP_
#define CRPKIT_SAMPLER_HPP_

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "network.hpp"
#include "rng.hpp"
#include "sde.hpp"
#include "spectral.hpp"
#include "tape.hpp"

namespace crpkit {

// Discretization times (t_N, ..., t_1, 0); one solver step per consecutive
// pair, so n_steps = times.size() - 1.
struct Schedule {
  std::vector<double> times;

  int n_steps() const { return static_cast<int>(times.size()) - 1; }
  void validate() const;  // strictly decreasing, ends exactly at 0
  std::uint64_t hash() const;
};

// n >= 2: n points uniformly from t_rsp down to t_eps, then 0 appended;
// n = 1: the single step goes straight from t_rsp to 0.
Schedule build_schedule(double t_rsp, double t_eps, int n_steps);

// Tape-free score evaluation; wraps the network in production and analytic
// stubs in solver tests.
using ScoreFn = std::function<void(const CompressedSpec& x,
                                   const CompressedSpec& y, double t,
                                   CompressedSpec* out)>;

// Lifetimes: the wrapped objects must outlive the returned callable.
ScoreFn network_score(const ScoreNetwork* net);
ScoreFn network_score_with(const ScoreNetwork* net,
                           const std::vector<double>* params);

// Sequential complex-normal noise: draws from an rng (optionally recording
// every draw) or replays a previously recorded stream, so a solve can be
// reproduced draw for draw.
class NoiseStream {
 public:
  explicit NoiseStream(Rng* rng,
                       std::vector<std::complex<double>>* record = nullptr);
  explicit NoiseStream(const std::vector<std::complex<double>>* replay);

  std::complex<double> next();

 private:
  Rng* rng_ = nullptr;
  std::vector<std::complex<double>>* record_ = nullptr;
  const std::vector<std::complex<double>>* replay_ = nullptr;
  std::size_t cursor_ = 0;
};

// Which time the diffusion coefficient and the score see during one reverse
// step from t_hi to t_lo. The printed update uses the lower time for both
// while the drift keeps the state's time; the alternate evaluates everything
// at the state's time.
enum class TimeConvention { kPrintedEq4, kStateTime };

struct EmStepOptions {
  bool add_noise = true;
  TimeConvention convention = TimeConvention::kPrintedEq4;
};

// One reverse Euler-Maruyama update:
//   x_lo = [x - (f(x, y, t_hi) - g^2 s(x, y, t_s)) dt] + g sqrt(dt) Z
// with g and t_s placed per the convention. Exactly one score call.
CompressedSpec em_step(const Sde& sde, const CompressedSpec& x,
                       const CompressedSpec& y, double t_hi, double t_lo,
                       const ScoreFn& score, NoiseStream* noise,
                       const EmStepOptions& opts);

// Same update with the score call recorded on the tape (everything else is
// constant); returns the node holding x_lo as a rows x 2 real matrix. Used
// by fine-tuning, where only the final score call carries gradient.
NodeId em_step_taped(const Sde& sde, const CompressedSpec& x,
                     const CompressedSpec& y, double t_hi, double t_lo,
                     const ScoreNetwork& net, Tape* tape, NoiseStream* noise,
                     const EmStepOptions& opts);

struct CorrectorConfig {
  int steps = 1;
  double snr = 0.5;  // r in eps = 2 (r ||Z|| / ||s||)^2
};

// One annealed Langevin correction x <- x + eps s + sqrt(2 eps) Z at fixed t.
// A zero score leaves x unchanged (the step size is undefined there).
CompressedSpec langevin_correct(const CompressedSpec& x,
                                const CompressedSpec& y, double t,
                                const ScoreFn& score, NoiseStream* noise,
                                const CorrectorConfig& cfg);

enum class SamplerMode { kEm, kPc };

struct SolveOptions {
  SamplerMode mode = SamplerMode::kEm;
  CorrectorConfig corrector;
  TimeConvention convention = TimeConvention::kPrintedEq4;
  // Noise on the final step into t = 0 is off by default: sigma(0) = 0, so
  // terminal noise has no kernel counterpart.
  bool final_step_noise = false;
  bool intermediate_noise = true;
  bool record_trajectory = false;
  bool record_rng_draws = false;
  // When nonempty, a non-finite state writes the trace here before throwing.
  std::string abort_dump_path;
  // Replay a recorded draw sequence instead of consuming the rng.
  const std::vector<std::complex<double>>* replay_draws = nullptr;
};

struct TracePoint {
  int step = 0;
  double t = 0.0;
  double mean_abs = 0.0;
  int nfe = 0;
};

struct ReverseResult {
  CompressedSpec estimate;
  int nfe = 0;
  std::vector<TracePoint> trace;                 // always populated
  std::vector<CompressedSpec> trajectory;        // opt-in, one per trace row
  std::vector<std::complex<double>> rng_draws;   // opt-in replay record
};

// Runs the reverse process from sample_prior(y, t_N) over the schedule.
// EM mode: one score call per step. PC mode: corrector.steps Langevin
// corrections after every predictor step, at the time just reached.
ReverseResult solve_reverse(const Sde& sde, const CompressedSpec& y,
                            const ScoreFn& score, const Schedule& sched,
                            Rng* rng, const SolveOptions& opts);

// Trace rows as CSV: step,t,mean_abs_state,nfe.
void write_trace_csv(const std::vector<TracePoint>& trace,
                     const std::string& path);

}  // namespace crpkit

#endif  // CRPKIT_SAMPLER_HPP_
