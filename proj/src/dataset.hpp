// src/dataset.hpp

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

#ifndef CRPKIT_DATASET_HPP_
#define CRPKIT_DATASET_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "spectral.hpp"

namespace crpkit {

// Synthetic clean/noisy generator settings: harmonic tones under a slow
// envelope for the target, AR(1)-filtered Gaussian noise for the interferer,
// mixed at a per-pair SNR drawn uniformly from [snr_lo_db, snr_hi_db].
struct MixtureSpec {
  double snr_lo_db = 0.0;
  double snr_hi_db = 20.0;
  int num_pairs = 1;
  std::uint64_t seed = 0;
  int tone_count = 3;
  double noise_ar_coefficient = 0.8;
  int signal_length = 528;
  int sample_rate = 8000;
};

struct GeneratedPair {
  TimeSignal clean;
  TimeSignal noisy;
  double snr_db = 0.0;
  std::uint64_t pair_seed = 0;
};

// Deterministic under (cfg.seed); pair i depends only on seed and i, so the
// list is order-independent and can be produced by parallel workers.
std::vector<GeneratedPair> generate_pairs(const MixtureSpec& cfg);

// Writes clean_%04d.wav / noisy_%04d.wav plus manifest.json into dir (which
// must exist). Returns the manifest path.
std::string write_dataset(const std::string& dir, const MixtureSpec& cfg,
                          const std::vector<GeneratedPair>& pairs);

// Loads the WAV pairs listed in a manifest written by write_dataset.
std::vector<GeneratedPair> load_dataset(const std::string& manifest_path);

}  // namespace crpkit

#endif  // CRPKIT_DATASET_HPP_
