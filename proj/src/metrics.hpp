// src/metrics.hpp

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

#ifndef CRPKIT_METRICS_HPP_
#define CRPKIT_METRICS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sampler.hpp"
#include "spectral.hpp"
#include "training.hpp"

namespace crpkit {

struct EvalRecord {
  int pair_id = 0;
  std::string method;  // baseline_dsm | crp | predictive
  int nfe = 0;
  double si_sdr_db = 0.0;
  double compressed_mse = 0.0;
  std::uint64_t seed = 0;
  std::string warning;  // empty when nothing was off about the run
};

// Scale-invariant SDR in dB: 10 log10(|a s|^2 / |a s - e|^2) with the
// projection a = <e, s>/|s|^2, clamped to [-100, 100] so degenerate error or
// target energies stay finite. No time alignment is attempted.
double si_sdr(const TimeSignal& reference, const TimeSignal& estimate);

// Mean over entries of the squared complex modulus of the difference.
double compressed_mse(const CompressedSpec& a, const CompressedSpec& b);

struct EvalOptions {
  SamplerMode mode = SamplerMode::kEm;
  CorrectorConfig corrector;  // used in pc mode only
};

// Enhances every pair once per seed and records both metrics. Diffusion
// checkpoints run the reverse solver on `sched` with their EMA weights;
// predictive checkpoints use a single forward pass (nfe = 1, schedule
// ignored). A crp checkpoint evaluated off its tuned schedule gets a warning
// on each record rather than an abort. SI-SDR compares istft reconstructions
// of the clean and enhanced compressed grids so both pass the same synthesis
// path. Records are ordered seed-major, then by pair index.
std::vector<EvalRecord> evaluate_method(
    const Checkpoint& ckpt, const std::vector<TrainPair>& test_pairs,
    const Schedule& sched, const EvalOptions& opts,
    const std::vector<std::uint64_t>& seeds);

// One row per record, in order; doubles at full precision.
void write_results_csv(const std::vector<EvalRecord>& records,
                       const std::string& path);

// Per (method, nfe) group: count, mean and sample standard deviation of both
// metrics, groups in lexicographic order. Records with a negative pair_id
// mark skipped work (e.g. a missing checkpoint) and are left out of the
// statistics here and in the curve file; the results CSV keeps them.
void write_summary_json(const std::vector<EvalRecord>& records,
                        const std::string& path);

// The same grouping as flat CSV, one row per (method, nfe): ready-to-plot
// mean curves over the sweep grid.
void write_curves_csv(const std::vector<EvalRecord>& records,
                      const std::string& path);

}  // namespace crpkit

#endif  // CRPKIT_METRICS_HPP_
