// src/spectral.hpp

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

#ifndef CRPKIT_SPECTRAL_HPP_
#define CRPKIT_SPECTRAL_HPP_

#include <complex>
#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace crpkit {

struct TimeSignal {
  std::vector<double> samples;
  int sample_rate = 8000;
};

// K frames x F one-sided bins, frame-major storage.
struct ComplexGrid {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<std::complex<double>> values;

  ComplexGrid() = default;
  ComplexGrid(std::size_t k, std::size_t f)
      : frames(k), bins(f), values(k * f, {0.0, 0.0}) {}

  std::complex<double>& at(std::size_t k, std::size_t f) {
    return values[k * bins + f];
  }
  const std::complex<double>& at(std::size_t k, std::size_t f) const {
    return values[k * bins + f];
  }
  std::size_t size() const { return frames * bins; }
  bool same_shape(const ComplexGrid& o) const {
    return frames == o.frames && bins == o.bins;
  }
};

struct Compression {
  double alpha = 0.5;
  double beta = 0.15;
};

struct StftMeta {
  int window_length = 64;
  int hop = 16;
  int sample_rate = 8000;
};

// Complex grid in the magnitude-compressed domain; the space where the clean
// target X_0, the mixture Y and the diffused state X_t live.
struct CompressedSpec {
  ComplexGrid grid;
  Compression compression;
  StftMeta meta;

  std::size_t size() const { return grid.size(); }
};

enum class Window { kPeriodicHann, kRectangular };

std::vector<double> make_window(Window kind, int length);

// Left-aligned frames, K = floor((len - window_length)/hop) + 1, one-sided
// spectrum with F = window_length/2 + 1 bins. window_length must be a power
// of two and hop must divide it.
ComplexGrid stft(const TimeSignal& sig, int window_length, int hop,
                 Window window = Window::kPeriodicHann);

// Weighted overlap-add synthesis with the analysis window, normalized by the
// accumulated squared-window envelope per sample. Exact inverse of stft
// wherever at least one window covers the sample with nonzero weight; samples
// with zero envelope (the very first sample under a periodic Hann) come back
// as 0. Output length is (K-1)*hop + window_length.
TimeSignal istft(const ComplexGrid& grid, int window_length, int hop,
                 int sample_rate, Window window = Window::kPeriodicHann);

// Magnitude compression c -> beta*|c|^alpha * e^{i angle(c)}; zero maps to
// zero (phase of zero taken as 0).
CompressedSpec compress(const ComplexGrid& grid, double alpha, double beta,
                        const StftMeta& meta);

ComplexGrid decompress(const CompressedSpec& spec);

}  // namespace crpkit

#endif  // CRPKIT_SPECTRAL_HPP_
