// src/spectral.cpp

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

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace crpkit {

namespace {

// FFTW plan creation is not thread-safe; execution of a private plan is.
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_framing(int window_length, int hop) {
  if (!is_power_of_two(window_length)) {
    throw config_error("stft: window_length must be a power of two");
  }
  if (hop <= 0 || window_length % hop != 0) {
    throw config_error("stft: hop must divide window_length");
  }
}

}  // namespace

std::vector<double> make_window(Window kind, int length) {
  std::vector<double> w(length, 1.0);
  if (kind == Window::kPeriodicHann) {
    for (int n = 0; n < length; ++n) {
      w[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / length);
    }
  }
  return w;
}

ComplexGrid stft(const TimeSignal& sig, int window_length, int hop,
                 Window window) {
  check_framing(window_length, hop);
  const std::size_t len = sig.samples.size();
  if (len < static_cast<std::size_t>(window_length)) {
    throw shape_error("stft: signal shorter than one window");
  }
  const std::size_t frames = (len - window_length) / hop + 1;
  const std::size_t bins = window_length / 2 + 1;
  const std::vector<double> w = make_window(window, window_length);

  double* in = fftw_alloc_real(window_length);
  fftw_complex* out = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_r2c_1d(window_length, in, out, FFTW_ESTIMATE);
  }

  ComplexGrid grid(frames, bins);
  for (std::size_t k = 0; k < frames; ++k) {
    const double* seg = sig.samples.data() + k * hop;
    for (int n = 0; n < window_length; ++n) in[n] = seg[n] * w[n];
    fftw_execute(plan);
    for (std::size_t f = 0; f < bins; ++f) {
      grid.at(k, f) = {out[f][0], out[f][1]};
    }
  }

  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return grid;
}

TimeSignal istft(const ComplexGrid& grid, int window_length, int hop,
                 int sample_rate, Window window) {
  check_framing(window_length, hop);
  const std::size_t bins = window_length / 2 + 1;
  if (grid.bins != bins || grid.frames == 0) {
    throw shape_error("istft: grid shape inconsistent with window_length");
  }
  const std::size_t len = (grid.frames - 1) * hop + window_length;
  const std::vector<double> w = make_window(window, window_length);

  fftw_complex* in = fftw_alloc_complex(bins);
  double* out = fftw_alloc_real(window_length);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_c2r_1d(window_length, in, out, FFTW_ESTIMATE);
  }

  TimeSignal sig;
  sig.sample_rate = sample_rate;
  sig.samples.assign(len, 0.0);
  std::vector<double> envelope(len, 0.0);
  for (std::size_t k = 0; k < grid.frames; ++k) {
    for (std::size_t f = 0; f < bins; ++f) {
      in[f][0] = grid.at(k, f).real();
      in[f][1] = grid.at(k, f).imag();
    }
    fftw_execute(plan);
    const std::size_t base = k * hop;
    for (int n = 0; n < window_length; ++n) {
      // FFTW's c2r transform is unnormalized; divide by the length here.
      sig.samples[base + n] += w[n] * out[n] / window_length;
      envelope[base + n] += w[n] * w[n];
    }
  }

  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);

  for (std::size_t i = 0; i < len; ++i) {
    sig.samples[i] = envelope[i] > 1e-12 ? sig.samples[i] / envelope[i] : 0.0;
  }
  return sig;
}

CompressedSpec compress(const ComplexGrid& grid, double alpha, double beta,
                        const StftMeta& meta) {
  if (alpha <= 0.0 || beta <= 0.0) {
    throw config_error("compress: alpha and beta must be positive");
  }
  CompressedSpec spec;
  spec.grid = ComplexGrid(grid.frames, grid.bins);
  spec.compression = {alpha, beta};
  spec.meta = meta;
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const std::complex<double> c = grid.values[i];
    const double mag = std::abs(c);
    // c * beta * |c|^(alpha-1) preserves the phase bit-exactly.
    spec.grid.values[i] =
        mag > 0.0 ? c * (beta * std::pow(mag, alpha - 1.0))
                  : std::complex<double>(0.0, 0.0);
  }
  return spec;
}

ComplexGrid decompress(const CompressedSpec& spec) {
  const double alpha = spec.compression.alpha;
  const double beta = spec.compression.beta;
  ComplexGrid grid(spec.grid.frames, spec.grid.bins);
  const double inv_alpha = 1.0 / alpha;
  const double beta_scale = std::pow(beta, -inv_alpha);
  for (std::size_t i = 0; i < spec.grid.values.size(); ++i) {
    const std::complex<double> cbar = spec.grid.values[i];
    const double mag = std::abs(cbar);
    grid.values[i] =
        mag > 0.0 ? cbar * (beta_scale * std::pow(mag, inv_alpha - 1.0))
                  : std::complex<double>(0.0, 0.0);
  }
  return grid;
}

}  // namespace crpkit
