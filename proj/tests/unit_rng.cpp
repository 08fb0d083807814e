// tests/unit_rng.cpp

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

#include "rng.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"

using crpkit::Rng;

TEST_CASE("same seed reproduces the exact draw sequence") {
  Rng a(1234), b(1234);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  for (int i = 0; i < 100; ++i) {
    CHECK(a.normal() == b.normal());
  }
}

TEST_CASE("uniform moments and range") {
  Rng rng(7);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean - 0.5) < 0.005);
  CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("normal moments") {
  Rng rng(11);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(s1 / n) < 0.02);
  CHECK(std::abs(s2 / n - 1.0) < 0.03);
  // Gaussian excess kurtosis is zero, so the fourth moment sits near 3.
  CHECK(std::abs(s4 / n - 3.0) < 0.2);
}

TEST_CASE("complex normal is circular with unit second moment") {
  Rng rng(42);
  const int n = 200000;
  double sre = 0.0, sim = 0.0, vre = 0.0, vim = 0.0, cross = 0.0, mod2 = 0.0;
  for (int i = 0; i < n; ++i) {
    auto z = rng.cnormal();
    sre += z.real();
    sim += z.imag();
    vre += z.real() * z.real();
    vim += z.imag() * z.imag();
    cross += z.real() * z.imag();
    mod2 += std::norm(z);
  }
  CHECK(std::abs(sre / n) < 0.01);
  CHECK(std::abs(sim / n) < 0.01);
  CHECK(std::abs(vre / n - 0.5) < 0.01);
  CHECK(std::abs(vim / n - 0.5) < 0.01);
  CHECK(std::abs(cross / n) < 0.01);
  CHECK(std::abs(mod2 / n - 1.0) < 0.01);
}

TEST_CASE("streams with distinct ids decorrelate") {
  Rng base(99);
  Rng s0 = base.stream(0);
  Rng s1 = base.stream(1);
  const int n = 100000;
  double dot = 0.0;
  bool any_diff = false;
  for (int i = 0; i < n; ++i) {
    double a = s0.normal();
    double b = s1.normal();
    dot += a * b;
    if (a != b) any_diff = true;
  }
  CHECK(any_diff);
  // Sample correlation of independent unit normals is O(1/sqrt(n)).
  CHECK(std::abs(dot / n) < 0.02);
}

TEST_CASE("stream derivation depends on base seed, not parent state") {
  Rng base(5);
  Rng s_before = base.stream(3);
  base.normal();
  base.normal();
  Rng s_after = base.stream(3);
  for (int i = 0; i < 100; ++i) {
    CHECK(s_before.next_u64() == s_after.next_u64());
  }
}

TEST_CASE("uniform_open never yields zero") {
  Rng rng(17);
  for (int i = 0; i < 100000; ++i) {
    CHECK(rng.uniform_open() > 0.0);
    CHECK(rng.uniform_open() <= 1.0);
  }
}
