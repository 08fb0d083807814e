// src/tape.cpp

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

#include "tape.hpp"

#include <cmath>

#include "errors.hpp"

namespace crpkit {

namespace {
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluCubic = 0.044715;
}  // namespace

void gelu_forward(const Mat& x, Mat* out) {
  out->rows = x.rows;
  out->cols = x.cols;
  out->data.resize(x.data.size());
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    const double v = x.data[i];
    const double u = kGeluC * (v + kGeluCubic * v * v * v);
    out->data[i] = 0.5 * v * (1.0 + std::tanh(u));
  }
}

void gelu_backward(const Mat& x, const Mat& dy, Mat* dx) {
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    const double v = x.data[i];
    const double u = kGeluC * (v + kGeluCubic * v * v * v);
    const double th = std::tanh(u);
    const double du = kGeluC * (1.0 + 3.0 * kGeluCubic * v * v);
    const double deriv = 0.5 * (1.0 + th) + 0.5 * v * (1.0 - th * th) * du;
    dx->data[i] += dy.data[i] * deriv;
  }
}

Tape::Tape(const std::vector<double>* theta) : theta_(theta) {}

NodeId Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

NodeId Tape::constant(Mat value) {
  Node n;
  n.op = Op::kConst;
  n.value = std::move(value);
  return push(std::move(n));
}

NodeId Tape::affine(NodeId x, std::size_t w_offset, std::size_t b_offset,
                    std::size_t in_dim, std::size_t out_dim) {
  const Mat& in = value(x);
  if (in.cols != in_dim) throw shape_error("tape affine: input width mismatch");
  if (w_offset + in_dim * out_dim > theta_->size() ||
      b_offset + out_dim > theta_->size()) {
    throw shape_error("tape affine: parameter slice out of range");
  }
  Node n;
  n.op = Op::kAffine;
  n.input = x;
  n.w_offset = w_offset;
  n.b_offset = b_offset;
  n.in_dim = in_dim;
  n.out_dim = out_dim;
  Mat w(in_dim, out_dim);
  std::copy(theta_->begin() + w_offset,
            theta_->begin() + w_offset + in_dim * out_dim, w.data.begin());
  matmul(in, w, &n.value);
  for (std::size_t r = 0; r < n.value.rows; ++r) {
    for (std::size_t c = 0; c < out_dim; ++c) {
      n.value.at(r, c) += (*theta_)[b_offset + c];
    }
  }
  return push(std::move(n));
}

NodeId Tape::gelu(NodeId x) {
  Node n;
  n.op = Op::kGelu;
  n.input = x;
  gelu_forward(value(x), &n.value);
  return push(std::move(n));
}

NodeId Tape::axpb(NodeId x, double a, Mat b) {
  const Mat& in = value(x);
  if (b.rows != in.rows || b.cols != in.cols) {
    throw shape_error("tape axpb: constant shape mismatch");
  }
  Node n;
  n.op = Op::kAxpb;
  n.input = x;
  n.scalar = a;
  n.value = b;
  for (std::size_t i = 0; i < in.data.size(); ++i) {
    n.value.data[i] += a * in.data[i];
  }
  return push(std::move(n));
}

NodeId Tape::sumsq_scaled(NodeId x, double scale) {
  const Mat& in = value(x);
  double acc = 0.0;
  for (double v : in.data) acc += v * v;
  Node n;
  n.op = Op::kSumsqScaled;
  n.input = x;
  n.scalar = scale;
  n.value = Mat(1, 1);
  n.value.data[0] = scale * acc;
  return push(std::move(n));
}

const Mat& Tape::value(NodeId id) const {
  if (id < 0 || id >= static_cast<NodeId>(nodes_.size())) {
    throw usage_error("tape: node id out of range");
  }
  return nodes_[id].value;
}

double Tape::scalar_value(NodeId id) const {
  const Mat& v = value(id);
  if (v.size() != 1) throw usage_error("tape: node is not scalar");
  return v.data[0];
}

void Tape::backward(NodeId scalar_node, std::vector<double>* grad) const {
  if (nodes_.empty()) throw usage_error("tape backward: tape is empty");
  const Mat& v = value(scalar_node);
  if (v.size() != 1) {
    throw usage_error("tape backward: target node is not scalar");
  }
  Mat seed(1, 1);
  seed.data[0] = 1.0;
  backward_from(scalar_node, seed, grad);
}

void Tape::backward_from(NodeId node, const Mat& cotangent,
                         std::vector<double>* grad) const {
  if (nodes_.empty()) throw usage_error("tape backward: tape is empty");
  const Mat& v = value(node);
  if (cotangent.rows != v.rows || cotangent.cols != v.cols) {
    throw shape_error("tape backward: cotangent shape mismatch");
  }
  std::vector<Mat> cotangents(nodes_.size());
  cotangents[node] = cotangent;
  sweep(&cotangents, node, grad);
}

void Tape::sweep(std::vector<Mat>* cotangents, NodeId start,
                 std::vector<double>* grad) const {
  grad->assign(theta_->size(), 0.0);
  auto ensure = [this, cotangents](NodeId id) -> Mat& {
    Mat& m = (*cotangents)[id];
    if (m.size() == 0) {
      const Mat& v = nodes_[id].value;
      m = Mat(v.rows, v.cols);
    }
    return m;
  };

  for (NodeId id = start; id >= 0; --id) {
    const Node& n = nodes_[id];
    const Mat& dy = (*cotangents)[id];
    if (dy.size() == 0) continue;  // node not on the path to the target
    switch (n.op) {
      case Op::kConst:
        break;
      case Op::kAffine: {
        const Mat& in = nodes_[n.input].value;
        Mat w(n.in_dim, n.out_dim);
        std::copy(theta_->begin() + n.w_offset,
                  theta_->begin() + n.w_offset + n.in_dim * n.out_dim,
                  w.data.begin());
        Mat& dx = ensure(n.input);
        matmul_nt(dy, w, &dx, /*accumulate=*/true);
        Mat dw;
        matmul_tn(in, dy, &dw);
        double* gw = grad->data() + n.w_offset;
        for (std::size_t i = 0; i < dw.data.size(); ++i) gw[i] += dw.data[i];
        double* gb = grad->data() + n.b_offset;
        for (std::size_t r = 0; r < dy.rows; ++r) {
          for (std::size_t c = 0; c < n.out_dim; ++c) {
            gb[c] += dy.at(r, c);
          }
        }
        break;
      }
      case Op::kGelu: {
        Mat& dx = ensure(n.input);
        gelu_backward(nodes_[n.input].value, dy, &dx);
        break;
      }
      case Op::kAxpb: {
        Mat& dx = ensure(n.input);
        for (std::size_t i = 0; i < dy.data.size(); ++i) {
          dx.data[i] += n.scalar * dy.data[i];
        }
        break;
      }
      case Op::kSumsqScaled: {
        const Mat& in = nodes_[n.input].value;
        Mat& dx = ensure(n.input);
        const double w = 2.0 * n.scalar * dy.data[0];
        for (std::size_t i = 0; i < in.data.size(); ++i) {
          dx.data[i] += w * in.data[i];
        }
        break;
      }
    }
  }
}

}  // namespace crpkit
