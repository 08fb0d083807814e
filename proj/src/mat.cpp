// src/mat.cpp

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

#include "mat.hpp"

#include <cblas.h>

namespace crpkit {

namespace {

void prepare_out(Mat* out, std::size_t r, std::size_t c, bool accumulate) {
  if (!accumulate) {
    out->rows = r;
    out->cols = c;
    out->data.assign(r * c, 0.0);
    return;
  }
  if (out->rows != r || out->cols != c) {
    throw shape_error("matmul accumulate: output shape mismatch");
  }
}

}  // namespace

void matmul(const Mat& a, const Mat& b, Mat* out, bool accumulate) {
  if (a.cols != b.rows) throw shape_error("matmul: inner dimension mismatch");
  prepare_out(out, a.rows, b.cols, accumulate);
  if (a.rows == 0 || b.cols == 0 || a.cols == 0) return;
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans,
              static_cast<int>(a.rows), static_cast<int>(b.cols),
              static_cast<int>(a.cols), 1.0, a.data.data(),
              static_cast<int>(a.cols), b.data.data(),
              static_cast<int>(b.cols), accumulate ? 1.0 : 0.0,
              out->data.data(), static_cast<int>(out->cols));
}

void matmul_tn(const Mat& a, const Mat& b, Mat* out, bool accumulate) {
  if (a.rows != b.rows) throw shape_error("matmul_tn: inner dimension mismatch");
  prepare_out(out, a.cols, b.cols, accumulate);
  if (a.cols == 0 || b.cols == 0 || a.rows == 0) return;
  cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans,
              static_cast<int>(a.cols), static_cast<int>(b.cols),
              static_cast<int>(a.rows), 1.0, a.data.data(),
              static_cast<int>(a.cols), b.data.data(),
              static_cast<int>(b.cols), accumulate ? 1.0 : 0.0,
              out->data.data(), static_cast<int>(out->cols));
}

void matmul_nt(const Mat& a, const Mat& b, Mat* out, bool accumulate) {
  if (a.cols != b.cols) throw shape_error("matmul_nt: inner dimension mismatch");
  prepare_out(out, a.rows, b.rows, accumulate);
  if (a.rows == 0 || b.rows == 0 || a.cols == 0) return;
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans,
              static_cast<int>(a.rows), static_cast<int>(b.rows),
              static_cast<int>(a.cols), 1.0, a.data.data(),
              static_cast<int>(a.cols), b.data.data(),
              static_cast<int>(b.cols), accumulate ? 1.0 : 0.0,
              out->data.data(), static_cast<int>(out->cols));
}

}  // namespace crpkit
