// src/sampler.cpp

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

#include "sampler.hpp"

#include <bit>
#include <cmath>
#include <cstdio>

#include "errors.hpp"

namespace crpkit {

namespace {

bool all_finite(const CompressedSpec& spec) {
  for (const auto& v : spec.grid.values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

double mean_abs(const CompressedSpec& spec) {
  if (spec.grid.values.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& v : spec.grid.values) acc += std::abs(v);
  return acc / static_cast<double>(spec.grid.values.size());
}

double norm2(const std::vector<std::complex<double>>& v) {
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return std::sqrt(acc);
}

double norm2(const CompressedSpec& spec) {
  double acc = 0.0;
  for (const auto& z : spec.grid.values) acc += std::norm(z);
  return std::sqrt(acc);
}

}  // namespace

void Schedule::validate() const {
  if (times.size() < 2) {
    throw config_error("schedule: need at least one step");
  }
  if (times.back() != 0.0) {
    throw config_error("schedule: must end exactly at t = 0");
  }
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    if (!(times[i] > times[i + 1])) {
      throw config_error("schedule: times must be strictly decreasing");
    }
  }
  if (!(times.front() > 0.0)) {
    throw config_error("schedule: start time must be positive");
  }
}

std::uint64_t Schedule::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the raw doubles
  for (double t : times) {
    h ^= std::bit_cast<std::uint64_t>(t);
    h *= 0x100000001b3ULL;
  }
  return h;
}

Schedule build_schedule(double t_rsp, double t_eps, int n_steps) {
  if (n_steps < 1) throw config_error("build_schedule: n_steps must be >= 1");
  if (!(t_eps > 0.0) || !(t_eps < t_rsp)) {
    throw config_error("build_schedule: need 0 < t_eps < t_rsp");
  }
  Schedule sched;
  if (n_steps == 1) {
    sched.times = {t_rsp, 0.0};
    return sched;
  }
  sched.times.resize(static_cast<std::size_t>(n_steps) + 1);
  const double dt = (t_rsp - t_eps) / static_cast<double>(n_steps - 1);
  for (int j = 0; j < n_steps; ++j) {
    sched.times[j] = t_rsp - static_cast<double>(j) * dt;
  }
  sched.times[n_steps - 1] = t_eps;  // exact endpoint, no rounding residue
  sched.times[n_steps] = 0.0;
  sched.validate();
  return sched;
}

ScoreFn network_score(const ScoreNetwork* net) {
  return [net](const CompressedSpec& x, const CompressedSpec& y, double t,
               CompressedSpec* out) { net->forward(x, y, t, out); };
}

ScoreFn network_score_with(const ScoreNetwork* net,
                           const std::vector<double>* params) {
  return [net, params](const CompressedSpec& x, const CompressedSpec& y,
                       double t, CompressedSpec* out) {
    net->forward_with(*params, x, y, t, out);
  };
}

NoiseStream::NoiseStream(Rng* rng, std::vector<std::complex<double>>* record)
    : rng_(rng), record_(record) {}

NoiseStream::NoiseStream(const std::vector<std::complex<double>>* replay)
    : replay_(replay) {}

std::complex<double> NoiseStream::next() {
  if (replay_ != nullptr) {
    if (cursor_ >= replay_->size()) {
      throw usage_error("noise stream: replay record exhausted");
    }
    return (*replay_)[cursor_++];
  }
  const std::complex<double> z = rng_->cnormal();
  if (record_ != nullptr) record_->push_back(z);
  return z;
}

CompressedSpec em_step(const Sde& sde, const CompressedSpec& x,
                       const CompressedSpec& y, double t_hi, double t_lo,
                       const ScoreFn& score, NoiseStream* noise,
                       const EmStepOptions& opts) {
  const double dt = t_hi - t_lo;
  if (!(dt > 0.0)) {
    throw config_error("em_step: step must move to a strictly smaller time");
  }
  if (!x.grid.same_shape(y.grid)) {
    throw shape_error("em_step: state and mixture shape mismatch");
  }
  const double t_eval =
      opts.convention == TimeConvention::kPrintedEq4 ? t_lo : t_hi;
  const double g = sde.diffusion(t_eval);

  CompressedSpec f;
  sde.drift(x, y, t_hi, &f);
  CompressedSpec s;
  score(x, y, t_eval, &s);

  CompressedSpec out = x;
  const double g_dt = g * std::sqrt(dt);
  const double g2_dt = g * g * dt;
  // Grouped as (x - f dt + noise) + g^2 dt s, matching the taped variant's
  // constant-plus-score association bit for bit.
  for (std::size_t i = 0; i < out.grid.values.size(); ++i) {
    std::complex<double> c = x.grid.values[i] - f.grid.values[i] * dt;
    if (opts.add_noise) c += g_dt * noise->next();
    out.grid.values[i] = c + g2_dt * s.grid.values[i];
  }
  return out;
}

NodeId em_step_taped(const Sde& sde, const CompressedSpec& x,
                     const CompressedSpec& y, double t_hi, double t_lo,
                     const ScoreNetwork& net, Tape* tape, NoiseStream* noise,
                     const EmStepOptions& opts) {
  const double dt = t_hi - t_lo;
  if (!(dt > 0.0)) {
    throw config_error("em_step: step must move to a strictly smaller time");
  }
  if (!x.grid.same_shape(y.grid)) {
    throw shape_error("em_step: state and mixture shape mismatch");
  }
  const double t_eval =
      opts.convention == TimeConvention::kPrintedEq4 ? t_lo : t_hi;
  const double g = sde.diffusion(t_eval);

  CompressedSpec f;
  sde.drift(x, y, t_hi, &f);

  const double g_dt = g * std::sqrt(dt);
  const double g2_dt = g * g * dt;
  Mat constant(x.grid.values.size(), 2);
  for (std::size_t i = 0; i < x.grid.values.size(); ++i) {
    std::complex<double> c = x.grid.values[i] - f.grid.values[i] * dt;
    if (opts.add_noise) c += g_dt * noise->next();
    constant.at(i, 0) = c.real();
    constant.at(i, 1) = c.imag();
  }
  const NodeId score_node =
      net.forward_tape(tape, net.assemble_input(x, y, t_eval));
  return tape->axpb(score_node, g2_dt, std::move(constant));
}

CompressedSpec langevin_correct(const CompressedSpec& x,
                                const CompressedSpec& y, double t,
                                const ScoreFn& score, NoiseStream* noise,
                                const CorrectorConfig& cfg) {
  std::vector<std::complex<double>> z(x.grid.values.size());
  for (auto& v : z) v = noise->next();

  CompressedSpec s;
  score(x, y, t, &s);
  const double s_norm = norm2(s);
  if (s_norm == 0.0) return x;  // step size undefined; leave the state alone

  const double ratio = cfg.snr * norm2(z) / s_norm;
  const double eps = 2.0 * ratio * ratio;
  const double noise_scale = std::sqrt(2.0 * eps);

  CompressedSpec out = x;
  for (std::size_t i = 0; i < out.grid.values.size(); ++i) {
    out.grid.values[i] += eps * s.grid.values[i] + noise_scale * z[i];
  }
  return out;
}

ReverseResult solve_reverse(const Sde& sde, const CompressedSpec& y,
                            const ScoreFn& score, const Schedule& sched,
                            Rng* rng, const SolveOptions& opts) {
  sched.validate();
  if (y.grid.values.empty()) {
    throw shape_error("solve_reverse: empty mixture grid");
  }
  if (sched.times.front() > sde.max_time()) {
    throw config_error("solve_reverse: schedule starts beyond the horizon");
  }
  if (opts.mode == SamplerMode::kPc && opts.corrector.steps < 1) {
    throw config_error("solve_reverse: pc mode needs corrector steps >= 1");
  }

  ReverseResult result;
  NoiseStream stream =
      opts.replay_draws != nullptr
          ? NoiseStream(opts.replay_draws)
          : NoiseStream(rng, opts.record_rng_draws ? &result.rng_draws
                                                   : nullptr);

  const double t_start = sched.times.front();
  const double sigma_start = sde.kernel_sigma(t_start);
  CompressedSpec x = y;
  for (auto& v : x.grid.values) v += sigma_start * stream.next();

  int step_index = 0;
  auto visit = [&](const CompressedSpec& state, double t) {
    result.trace.push_back(
        {step_index, t, mean_abs(state), result.nfe});
    if (opts.record_trajectory) result.trajectory.push_back(state);
    ++step_index;
    if (!all_finite(state)) {
      if (!opts.abort_dump_path.empty()) {
        write_trace_csv(result.trace, opts.abort_dump_path);
      }
      char msg[128];
      std::snprintf(msg, sizeof(msg),
                    "solve_reverse: non-finite state at t = %g (nfe %d)", t,
                    result.nfe);
      throw numeric_error(msg);
    }
  };
  visit(x, t_start);

  const int n = sched.n_steps();
  EmStepOptions em_opts;
  em_opts.convention = opts.convention;
  for (int i = 0; i < n; ++i) {
    const double t_hi = sched.times[i];
    const double t_lo = sched.times[i + 1];
    const bool last = (i + 1 == n);
    em_opts.add_noise = last ? opts.final_step_noise : opts.intermediate_noise;
    x = em_step(sde, x, y, t_hi, t_lo, score, &stream, em_opts);
    ++result.nfe;
    visit(x, t_lo);
    if (opts.mode == SamplerMode::kPc) {
      for (int j = 0; j < opts.corrector.steps; ++j) {
        x = langevin_correct(x, y, t_lo, score, &stream, opts.corrector);
        ++result.nfe;
        visit(x, t_lo);
      }
    }
  }
  result.estimate = std::move(x);
  return result;
}

void write_trace_csv(const std::vector<TracePoint>& trace,
                     const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) {
    throw io_error("write_trace_csv: cannot open " + path);
  }
  std::fprintf(f, "step,t,mean_abs_state,nfe\n");
  for (const auto& p : trace) {
    std::fprintf(f, "%d,%.17g,%.17g,%d\n", p.step, p.t, p.mean_abs, p.nfe);
  }
  std::fclose(f);
}

}  // namespace crpkit
