// src/network.hpp

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

#ifndef CRPKIT_NETWORK_HPP_
#define CRPKIT_NETWORK_HPP_

#include <vector>

#include "rng.hpp"
#include "spectral.hpp"
#include "tape.hpp"

namespace crpkit {

// [sin(2 pi f_j t) ..., cos(2 pi f_j t) ...] over dim/2 log-spaced
// frequencies f_j in [1, 1000]; dim 2 degenerates to f = 1.
std::vector<double> time_embedding(double t, int dim);

struct NetConfig {
  int hidden_width = 128;
  int hidden_layers = 3;
  int time_embed_dim = 2;
  bool time_conditioned = true;

  void validate() const;
};

// Pointwise score model: every time-frequency tile is mapped independently
// through a shared MLP over channels [re xt, im xt, re y, im y] plus the
// time embedding; 3 hidden GELU layers, linear output (re, im). The final
// layer is zero-initialized so the untrained score is exactly 0. Predictive
// mode (time_conditioned = false) drops the embedding columns and is meant
// to be fed the mixture for both inputs.
class ScoreNetwork {
 public:
  struct Layer {
    std::size_t w_offset;
    std::size_t b_offset;
    std::size_t in_dim;
    std::size_t out_dim;
  };

  ScoreNetwork(const NetConfig& cfg, Rng* init_rng);

  const NetConfig& config() const { return cfg_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::size_t param_count() const { return theta_.size(); }
  std::vector<double>& theta() { return theta_; }
  const std::vector<double>& theta() const { return theta_; }
  int input_channels() const;

  // Rows = tiles of the grids (batch entries simply stack rows); columns =
  // 4 signal channels plus the embedding of this t when time-conditioned.
  Mat assemble_input(const CompressedSpec& xt, const CompressedSpec& y,
                     double t) const;

  // Tape-free inference with an arbitrary parameter vector (live theta or an
  // EMA shadow).
  void forward_raw(const std::vector<double>& params, const Mat& input,
                   Mat* out) const;

  // Score evaluation: complex grid in, complex grid out.
  void forward(const CompressedSpec& xt, const CompressedSpec& y, double t,
               CompressedSpec* out) const;
  void forward_with(const std::vector<double>& params,
                    const CompressedSpec& xt, const CompressedSpec& y,
                    double t, CompressedSpec* out) const;

  // Records the MLP on the tape (which must be backed by this->theta());
  // returns the output node (rows x 2).
  NodeId forward_tape(Tape* tape, Mat input) const;

  // Unpacks a rows x 2 real matrix into a complex grid with like's shape.
  static void unpack_output(const Mat& out, const CompressedSpec& like,
                            CompressedSpec* spec);

 private:
  NetConfig cfg_;
  std::vector<Layer> layers_;
  std::vector<double> theta_;
};

}  // namespace crpkit

#endif  // CRPKIT_NETWORK_HPP_
