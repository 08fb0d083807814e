// src/network.cpp

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

#include "network.hpp"

#include <cmath>

#include "errors.hpp"

namespace crpkit {

std::vector<double> time_embedding(double t, int dim) {
  if (dim <= 0 || dim % 2 != 0) {
    throw config_error("time_embedding: dim must be even and positive");
  }
  const int half = dim / 2;
  std::vector<double> emb(dim);
  for (int j = 0; j < half; ++j) {
    const double frac = half > 1 ? static_cast<double>(j) / (half - 1) : 0.0;
    const double freq = std::pow(10.0, 3.0 * frac);  // log-spaced 1..1000
    emb[j] = std::sin(2.0 * M_PI * freq * t);
    emb[half + j] = std::cos(2.0 * M_PI * freq * t);
  }
  return emb;
}

void NetConfig::validate() const {
  if (hidden_width < 1 || hidden_layers < 1) {
    throw config_error("NetConfig: need at least one hidden layer and unit");
  }
  if (time_conditioned && (time_embed_dim <= 0 || time_embed_dim % 2 != 0)) {
    throw config_error("NetConfig: time_embed_dim must be even and positive");
  }
}

int ScoreNetwork::input_channels() const {
  return 4 + (cfg_.time_conditioned ? cfg_.time_embed_dim : 0);
}

ScoreNetwork::ScoreNetwork(const NetConfig& cfg, Rng* init_rng) : cfg_(cfg) {
  cfg_.validate();
  std::vector<std::size_t> dims;
  dims.push_back(static_cast<std::size_t>(input_channels()));
  for (int i = 0; i < cfg_.hidden_layers; ++i) {
    dims.push_back(static_cast<std::size_t>(cfg_.hidden_width));
  }
  dims.push_back(2);

  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.in_dim = dims[l];
    layer.out_dim = dims[l + 1];
    layer.w_offset = offset;
    offset += layer.in_dim * layer.out_dim;
    layer.b_offset = offset;
    offset += layer.out_dim;
    layers_.push_back(layer);
  }
  theta_.assign(offset, 0.0);

  // Xavier-uniform hidden weights; the output layer stays zero so the
  // initial score vanishes identically.
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layer.in_dim + layer.out_dim));
    for (std::size_t i = 0; i < layer.in_dim * layer.out_dim; ++i) {
      theta_[layer.w_offset + i] = init_rng->uniform(-limit, limit);
    }
  }
}

Mat ScoreNetwork::assemble_input(const CompressedSpec& xt,
                                 const CompressedSpec& y, double t) const {
  if (!xt.grid.same_shape(y.grid)) {
    throw shape_error("assemble_input: xt and y shape mismatch");
  }
  const std::size_t rows = xt.grid.values.size();
  const std::size_t cols = static_cast<std::size_t>(input_channels());
  Mat input(rows, cols);
  std::vector<double> emb;
  if (cfg_.time_conditioned) emb = time_embedding(t, cfg_.time_embed_dim);
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = input.data.data() + r * cols;
    const auto& xv = xt.grid.values[r];
    const auto& yv = y.grid.values[r];
    if (!std::isfinite(xv.real()) || !std::isfinite(xv.imag()) ||
        !std::isfinite(yv.real()) || !std::isfinite(yv.imag())) {
      throw numeric_error("assemble_input: non-finite network input");
    }
    row[0] = xv.real();
    row[1] = xv.imag();
    row[2] = yv.real();
    row[3] = yv.imag();
    for (std::size_t j = 0; j < emb.size(); ++j) row[4 + j] = emb[j];
  }
  return input;
}

void ScoreNetwork::forward_raw(const std::vector<double>& params,
                               const Mat& input, Mat* out) const {
  if (params.size() != theta_.size()) {
    throw shape_error("forward_raw: parameter vector length mismatch");
  }
  Mat cur = input;
  Mat next, act;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    if (cur.cols != layer.in_dim) {
      throw shape_error("forward_raw: input width mismatch");
    }
    Mat w(layer.in_dim, layer.out_dim);
    std::copy(params.begin() + layer.w_offset,
              params.begin() + layer.w_offset + w.size(), w.data.begin());
    matmul(cur, w, &next);
    for (std::size_t r = 0; r < next.rows; ++r) {
      for (std::size_t c = 0; c < layer.out_dim; ++c) {
        next.at(r, c) += params[layer.b_offset + c];
      }
    }
    if (l + 1 < layers_.size()) {
      gelu_forward(next, &act);
      cur = act;
    } else {
      cur = next;
    }
  }
  *out = std::move(cur);
}

void ScoreNetwork::forward(const CompressedSpec& xt, const CompressedSpec& y,
                           double t, CompressedSpec* out) const {
  forward_with(theta_, xt, y, t, out);
}

void ScoreNetwork::forward_with(const std::vector<double>& params,
                                const CompressedSpec& xt,
                                const CompressedSpec& y, double t,
                                CompressedSpec* out) const {
  Mat result;
  forward_raw(params, assemble_input(xt, y, t), &result);
  unpack_output(result, xt, out);
}

NodeId ScoreNetwork::forward_tape(Tape* tape, Mat input) const {
  NodeId node = tape->constant(std::move(input));
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    node = tape->affine(node, layer.w_offset, layer.b_offset, layer.in_dim,
                        layer.out_dim);
    if (l + 1 < layers_.size()) node = tape->gelu(node);
  }
  return node;
}

void ScoreNetwork::unpack_output(const Mat& out, const CompressedSpec& like,
                                 CompressedSpec* spec) {
  if (out.cols != 2 || out.rows != like.grid.values.size()) {
    throw shape_error("unpack_output: expected rows x 2 output");
  }
  *spec = like;
  for (std::size_t r = 0; r < out.rows; ++r) {
    spec->grid.values[r] = {out.at(r, 0), out.at(r, 1)};
  }
}

}  // namespace crpkit
