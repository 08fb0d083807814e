// tests/unit_mat.cpp

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

#include <cmath>

#include "doctest.h"
#include "rng.hpp"

using crpkit::Mat;
using crpkit::Rng;

namespace {

Mat random_mat(std::size_t r, std::size_t c, Rng* rng) {
  Mat m(r, c);
  for (auto& v : m.data) v = rng->normal();
  return m;
}

// Naive triple loop used as the reference for the BLAS paths.
Mat ref_matmul(const Mat& a, const Mat& b) {
  Mat out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k)
      for (std::size_t j = 0; j < b.cols; ++j)
        out.at(i, j) += a.at(i, k) * b.at(k, j);
  return out;
}

Mat transpose(const Mat& a) {
  Mat t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
  return t;
}

double max_abs_diff(const Mat& a, const Mat& b) {
  REQUIRE(a.rows == b.rows);
  REQUIRE(a.cols == b.cols);
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace

TEST_CASE("matmul fixed example") {
  Mat a(2, 3), b(3, 2);
  a.data = {1, 2, 3, 4, 5, 6};
  b.data = {7, 8, 9, 10, 11, 12};
  Mat out;
  crpkit::matmul(a, b, &out);
  CHECK(out.rows == 2);
  CHECK(out.cols == 2);
  CHECK(out.at(0, 0) == doctest::Approx(58));
  CHECK(out.at(0, 1) == doctest::Approx(64));
  CHECK(out.at(1, 0) == doctest::Approx(139));
  CHECK(out.at(1, 1) == doctest::Approx(154));
}

TEST_CASE("matmul variants agree with naive reference on random shapes") {
  Rng rng(3);
  const std::size_t shapes[][3] = {{5, 7, 3}, {16, 128, 33}, {1, 4, 9}};
  for (auto& s : shapes) {
    Mat a = random_mat(s[0], s[1], &rng);
    Mat b = random_mat(s[1], s[2], &rng);
    Mat out;
    crpkit::matmul(a, b, &out);
    CHECK(max_abs_diff(out, ref_matmul(a, b)) < 1e-12);

    Mat at = transpose(a);
    Mat out_tn;
    crpkit::matmul_tn(at, b, &out_tn);
    CHECK(max_abs_diff(out_tn, ref_matmul(a, b)) < 1e-12);

    Mat bt = transpose(b);
    Mat out_nt;
    crpkit::matmul_nt(a, bt, &out_nt);
    CHECK(max_abs_diff(out_nt, ref_matmul(a, b)) < 1e-12);
  }
}

TEST_CASE("matmul accumulate adds into the output") {
  Rng rng(4);
  Mat a = random_mat(6, 5, &rng);
  Mat b = random_mat(5, 4, &rng);
  Mat base = random_mat(6, 4, &rng);
  Mat expected = ref_matmul(a, b);
  for (std::size_t i = 0; i < expected.data.size(); ++i)
    expected.data[i] += base.data[i];
  Mat out = base;
  crpkit::matmul(a, b, &out, /*accumulate=*/true);
  CHECK(max_abs_diff(out, expected) < 1e-12);
}

TEST_CASE("matmul rejects mismatched shapes") {
  Mat a(2, 3), b(4, 2), out(9, 9);
  CHECK_THROWS_AS(crpkit::matmul(a, b, &out), crpkit::shape_error);
  Mat c(3, 2);
  CHECK_THROWS_AS(crpkit::matmul(a, c, &out, /*accumulate=*/true),
                  crpkit::shape_error);
}
