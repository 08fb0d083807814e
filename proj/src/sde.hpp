// src/sde.hpp

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

#ifndef CRPKIT_SDE_HPP_
#define CRPKIT_SDE_HPP_

#include "rng.hpp"
#include "spectral.hpp"

namespace crpkit {

// Bridge SDE constants plus the reverse starting point. Complex-normal
// convention throughout: a unit draw Z has E|Z|^2 = 1 (real and imaginary
// parts N(0, 1/2) each), so kernel_sigma_sq is the per-coordinate E|.|^2.
// With that pairing, the score -(x - mu)/sigma^2 drops into the reverse
// update with a plain g^2 factor (no 1/2), which is what the solver uses.
struct BbedParams {
  double c = 0.51;
  double k = 2.6;
  double T = 0.999;
  double t_eps = 0.03;
  double t_rsp = 0.5;

  void validate() const;
};

struct OuTestParams {
  double theta = 1.0;
  double g0 = 1.0;
};

// Shared face of the bridge SDE and the linear test SDE so samplers and
// training code never branch on which process they are driving.
class Sde {
 public:
  virtual ~Sde() = default;

  // Largest valid diffusion time (exclusive for processes with a finite
  // horizon; the bridge blows up at t = 1).
  virtual double max_time() const = 0;

  virtual void drift(const CompressedSpec& x, const CompressedSpec& y,
                     double t, CompressedSpec* out) const = 0;
  virtual double diffusion(double t) const = 0;
  virtual void kernel_mean(const CompressedSpec& x0, const CompressedSpec& y,
                           double t, CompressedSpec* out) const = 0;
  virtual double kernel_sigma_sq(double t) const = 0;

  double kernel_sigma(double t) const;
};

// Brownian bridge with exponentially growing diffusion: drift (y - x)/(1 - t),
// diffusion c k^t, Gaussian kernel with mean (1-t) x0 + t y and a variance
// in closed form via the exponential integral.
class BbedSde : public Sde {
 public:
  explicit BbedSde(const BbedParams& p);

  double max_time() const override { return p_.T; }
  void drift(const CompressedSpec& x, const CompressedSpec& y, double t,
             CompressedSpec* out) const override;
  double diffusion(double t) const override;
  void kernel_mean(const CompressedSpec& x0, const CompressedSpec& y, double t,
                   CompressedSpec* out) const override;
  double kernel_sigma_sq(double t) const override;

  const BbedParams& params() const { return p_; }

 private:
  BbedParams p_;
};

// dX = -theta X dt + g0 dW, analytically solvable; used to pin the solver's
// weak order. The mixture input y is ignored.
class OuTestSde : public Sde {
 public:
  explicit OuTestSde(const OuTestParams& p);

  double max_time() const override { return 1e9; }
  void drift(const CompressedSpec& x, const CompressedSpec& y, double t,
             CompressedSpec* out) const override;
  double diffusion(double t) const override;
  void kernel_mean(const CompressedSpec& x0, const CompressedSpec& y, double t,
                   CompressedSpec* out) const override;
  double kernel_sigma_sq(double t) const override;

  const OuTestParams& params() const { return p_; }

 private:
  OuTestParams p_;
};

// Exact OU moments from x0 at time t: mean x0 e^{-theta t}, var (as E|.|^2)
// g0^2 (1 - e^{-2 theta t}) / (2 theta).
void ou_moments(double x0, double t, const OuTestParams& p, double* mean,
                double* var);

// Draws z (unit complex normal per entry) and returns xt = mean + sigma(t) z.
// z is returned so the denoising loss can reuse the exact draw.
void sample_forward(const Sde& sde, const CompressedSpec& x0,
                    const CompressedSpec& y, double t, Rng* rng,
                    CompressedSpec* xt, CompressedSpec* z);

// Reverse-process starting point: y + sigma(t_start) Z.
CompressedSpec sample_prior(const Sde& sde, const CompressedSpec& y,
                            double t_start, Rng* rng);

}  // namespace crpkit

#endif  // CRPKIT_SDE_HPP_
