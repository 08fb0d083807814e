// src/tape.hpp

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

#ifndef CRPKIT_TAPE_HPP_
#define CRPKIT_TAPE_HPP_

#include <cstddef>
#include <vector>

#include "mat.hpp"

namespace crpkit {

using NodeId = int;

// Reverse-mode tape over matrix-valued primitives. Forward values are stored
// per node; backward walks the node list once in reverse, accumulating
// parameter gradients into a flat vector laid out like theta. Operations are
// deliberately few: they cover an MLP plus the quadratic losses built on top
// of it.
class Tape {
 public:
  // theta backs every affine node recorded on this tape; it must outlive the
  // tape and stay unmodified between forward and backward.
  explicit Tape(const std::vector<double>* theta);

  NodeId constant(Mat value);

  // out = X W + 1 b^T with W (in_dim x out_dim) at theta[w_offset] row-major
  // and b (out_dim) at theta[b_offset].
  NodeId affine(NodeId x, std::size_t w_offset, std::size_t b_offset,
                std::size_t in_dim, std::size_t out_dim);

  // Elementwise tanh-form GELU.
  NodeId gelu(NodeId x);

  // out = a * X + B, with B a constant matrix of X's shape.
  NodeId axpb(NodeId x, double a, Mat b);

  // Scalar node: scale * sum of squared entries of X.
  NodeId sumsq_scaled(NodeId x, double scale);

  const Mat& value(NodeId id) const;
  double scalar_value(NodeId id) const;
  bool empty() const { return nodes_.empty(); }
  std::size_t num_nodes() const { return nodes_.size(); }

  // d(scalar node)/d(theta), accumulated into grad (resized and zeroed).
  void backward(NodeId scalar_node, std::vector<double>* grad) const;

  // Reverse sweep seeded with an explicit cotangent at an arbitrary node;
  // used by gradient-truncation checks that inject d(loss)/d(subgraph output)
  // by hand.
  void backward_from(NodeId node, const Mat& cotangent,
                     std::vector<double>* grad) const;

 private:
  enum class Op { kConst, kAffine, kGelu, kAxpb, kSumsqScaled };

  struct Node {
    Op op;
    NodeId input = -1;
    std::size_t w_offset = 0;
    std::size_t b_offset = 0;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    double scalar = 0.0;
    Mat value;
  };

  NodeId push(Node node);
  void sweep(std::vector<Mat>* cotangents, NodeId start,
             std::vector<double>* grad) const;

  const std::vector<double>* theta_;
  std::vector<Node> nodes_;
};

// Elementwise tanh-approximation GELU, shared by tape and tape-free forward
// passes: 0.5 x (1 + tanh(sqrt(2/pi)(x + 0.044715 x^3))).
void gelu_forward(const Mat& x, Mat* out);

// dX += dY .* gelu'(x), given the pre-activation x.
void gelu_backward(const Mat& x, const Mat& dy, Mat* dx);

}  // namespace crpkit

#endif  // CRPKIT_TAPE_HPP_
