// src/mat.hpp

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

#ifndef CRPKIT_MAT_HPP_
#define CRPKIT_MAT_HPP_

#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace crpkit {

// Dense row-major matrix of doubles. Thin wrapper: the training tape and the
// network own the semantics, this owns storage and BLAS dispatch.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::size_t size() const { return rows * cols; }

  void set_zero() { std::fill(data.begin(), data.end(), 0.0); }
};

// out (+)= a * b.  accumulate=false overwrites out (and resizes it),
// accumulate=true requires out to already have the right shape.
void matmul(const Mat& a, const Mat& b, Mat* out, bool accumulate = false);

// out (+)= a^T * b
void matmul_tn(const Mat& a, const Mat& b, Mat* out, bool accumulate = false);

// out (+)= a * b^T
void matmul_nt(const Mat& a, const Mat& b, Mat* out, bool accumulate = false);

}  // namespace crpkit

#endif  // CRPKIT_MAT_HPP_
