// tests/unit_spectral.cpp

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

#include "spectral.hpp"

#include <cmath>

#include "doctest.h"
#include "rng.hpp"

using namespace crpkit;

namespace {

TimeSignal random_signal(int len, int sr, Rng* rng) {
  TimeSignal sig;
  sig.sample_rate = sr;
  sig.samples.resize(len);
  for (auto& s : sig.samples) s = rng->normal();
  return sig;
}

}  // namespace

TEST_CASE("stft shape and linearity zero case") {
  TimeSignal zeros;
  zeros.samples.assign(528, 0.0);
  ComplexGrid grid = stft(zeros, 64, 16);
  CHECK(grid.frames == 30);
  CHECK(grid.bins == 33);
  for (const auto& v : grid.values) {
    CHECK(std::abs(v) == 0.0);
  }
}

TEST_CASE("bin-center cosine concentrates in one bin per frame") {
  const int w = 64, bin = 5;
  TimeSignal sig;
  sig.samples.resize(256);
  for (int n = 0; n < 256; ++n) {
    sig.samples[n] = std::cos(2.0 * M_PI * bin * n / w);
  }
  ComplexGrid grid = stft(sig, w, 16, Window::kRectangular);
  for (std::size_t k = 0; k < grid.frames; ++k) {
    CHECK(std::abs(grid.at(k, bin)) == doctest::Approx(w / 2.0).epsilon(1e-9));
    for (std::size_t f = 0; f < grid.bins; ++f) {
      if (f == static_cast<std::size_t>(bin)) continue;
      CHECK(std::abs(grid.at(k, f)) < 1e-9);
    }
  }
}

TEST_CASE("istft inverts stft away from the zero-weight first sample") {
  Rng rng(21);
  TimeSignal sig = random_signal(528, 8000, &rng);
  for (int hop : {16, 32}) {
    ComplexGrid grid = stft(sig, 64, hop);
    TimeSignal rec = istft(grid, 64, hop, 8000);
    // Frames never extend past the input, so synthesis covers
    // (K-1)*hop + 64 samples; at hop 32 that drops an uncovered tail.
    const std::size_t covered = (grid.frames - 1) * hop + 64;
    REQUIRE(rec.samples.size() == covered);
    double max_err = 0.0;
    for (std::size_t n = 1; n < covered; ++n) {
      max_err = std::max(max_err, std::abs(rec.samples[n] - sig.samples[n]));
    }
    CHECK(max_err < 1e-9);
  }
}

TEST_CASE("impulse roundtrip") {
  TimeSignal sig;
  sig.samples.assign(528, 0.0);
  sig.samples[200] = 1.0;
  TimeSignal rec = istft(stft(sig, 64, 16), 64, 16, 8000);
  for (std::size_t n = 1; n < sig.samples.size(); ++n) {
    CHECK(std::abs(rec.samples[n] - sig.samples[n]) < 1e-9);
  }
}

TEST_CASE("single-frame grid is a one-term overlap-add") {
  Rng rng(33);
  TimeSignal sig = random_signal(64, 8000, &rng);
  ComplexGrid grid = stft(sig, 64, 16);
  REQUIRE(grid.frames == 1);
  TimeSignal rec = istft(grid, 64, 16, 8000);
  REQUIRE(rec.samples.size() == 64);
  // Periodic Hann weight is zero at sample 0, so that sample is defined as 0.
  CHECK(rec.samples[0] == 0.0);
  for (std::size_t n = 1; n < 64; ++n) {
    CHECK(std::abs(rec.samples[n] - sig.samples[n]) < 1e-9);
  }
}

TEST_CASE("zero grid synthesizes silence") {
  ComplexGrid grid(4, 33);
  TimeSignal rec = istft(grid, 64, 16, 8000);
  for (double s : rec.samples) CHECK(s == 0.0);
}

TEST_CASE("framing preconditions") {
  TimeSignal sig;
  sig.samples.assign(40, 0.0);
  CHECK_THROWS_AS(stft(sig, 64, 16), shape_error);
  sig.samples.assign(528, 0.0);
  CHECK_THROWS_AS(stft(sig, 60, 15), config_error);
  CHECK_THROWS_AS(stft(sig, 64, 24), config_error);
  ComplexGrid bad(4, 20);
  CHECK_THROWS_AS(istft(bad, 64, 16, 8000), shape_error);
}

TEST_CASE("compression fixed points") {
  ComplexGrid grid(1, 3);
  grid.at(0, 0) = {1.0, 0.0};
  grid.at(0, 1) = {0.0, 0.0};
  grid.at(0, 2) = {0.0, 4.0};
  CompressedSpec spec = compress(grid, 0.5, 0.15, StftMeta{});
  CHECK(spec.grid.at(0, 0).real() == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(spec.grid.at(0, 0).imag() == 0.0);
  CHECK(std::abs(spec.grid.at(0, 1)) == 0.0);
  CHECK(spec.grid.at(0, 2).real() == doctest::Approx(0.0));
  CHECK(spec.grid.at(0, 2).imag() == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("compress preserves phase and decompress inverts") {
  Rng rng(8);
  ComplexGrid grid(6, 33);
  for (auto& v : grid.values) v = rng.cnormal() * rng.uniform(1e-4, 20.0);
  CompressedSpec spec = compress(grid, 0.5, 0.15, StftMeta{});
  ComplexGrid back = decompress(spec);
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const double mag = std::abs(grid.values[i]);
    CHECK(std::abs(std::arg(spec.grid.values[i]) - std::arg(grid.values[i])) <
          1e-12);
    CHECK(std::abs(spec.grid.values[i]) ==
          doctest::Approx(0.15 * std::pow(mag, 0.5)).epsilon(1e-12));
    CHECK(std::abs(back.values[i] - grid.values[i]) <= 1e-9 * mag);
  }
}

TEST_CASE("compress rejects nonpositive parameters") {
  ComplexGrid grid(1, 1);
  CHECK_THROWS_AS(compress(grid, 0.0, 0.15, StftMeta{}), config_error);
  CHECK_THROWS_AS(compress(grid, 0.5, -1.0, StftMeta{}), config_error);
}
