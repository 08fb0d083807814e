// src/sde.cpp

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

#include "sde.hpp"

#include <cassert>
#include <cmath>

#include "special.hpp"

namespace crpkit {

namespace {

void check_same_shape(const CompressedSpec& a, const CompressedSpec& b,
                      const char* who) {
  if (!a.grid.same_shape(b.grid)) {
    throw shape_error(std::string(who) + ": operand shape mismatch");
  }
}

}  // namespace

void BbedParams::validate() const {
  if (c <= 0.0 || k <= 0.0) {
    throw config_error("BbedParams: c and k must be positive");
  }
  if (!(0.0 < t_eps && t_eps < t_rsp && t_rsp <= T && T < 1.0)) {
    throw config_error("BbedParams: need 0 < t_eps < t_rsp <= T < 1");
  }
}

double Sde::kernel_sigma(double t) const {
  const double v = kernel_sigma_sq(t);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

BbedSde::BbedSde(const BbedParams& p) : p_(p) { p_.validate(); }

void BbedSde::drift(const CompressedSpec& x, const CompressedSpec& y, double t,
                    CompressedSpec* out) const {
  check_same_shape(x, y, "drift");
  if (t >= 1.0) throw domain_error("drift: bridge drift undefined for t >= 1");
  const double inv = 1.0 / (1.0 - t);
  *out = x;
  for (std::size_t i = 0; i < x.grid.values.size(); ++i) {
    out->grid.values[i] = (y.grid.values[i] - x.grid.values[i]) * inv;
  }
}

double BbedSde::diffusion(double t) const {
  return p_.c * std::pow(p_.k, t);
}

void BbedSde::kernel_mean(const CompressedSpec& x0, const CompressedSpec& y,
                          double t, CompressedSpec* out) const {
  check_same_shape(x0, y, "kernel_mean");
  *out = x0;
  for (std::size_t i = 0; i < x0.grid.values.size(); ++i) {
    out->grid.values[i] =
        (1.0 - t) * x0.grid.values[i] + t * y.grid.values[i];
  }
}

double BbedSde::kernel_sigma_sq(double t) const {
  if (t >= 1.0) throw domain_error("kernel_sigma_sq: t must be < 1");
  if (t < 0.0) throw domain_error("kernel_sigma_sq: t must be >= 0");
  const double c = p_.c, k = p_.k;
  const double logk = std::log(k);
  // k = 1 collapses to constant diffusion; the closed form below would hit
  // the Ei singularity at 0, but the variance integral is elementary.
  if (std::abs(logk) < 1e-12) return c * c * t * (1.0 - t);
  const double e_term =
      expint_ei(2.0 * (t - 1.0) * logk) - expint_ei(-2.0 * logk);
  const double bracket = (std::pow(k, 2.0 * t) - 1.0 + t) +
                         (2.0 * k * k * logk) * (1.0 - t) * e_term;
  const double v = (1.0 - t) * c * c * bracket;
  // The closed form is analytically nonnegative; only rounding can dip below.
  assert(v > -1e-12);
  return v > 0.0 ? v : 0.0;
}

OuTestSde::OuTestSde(const OuTestParams& p) : p_(p) {
  // g0 = 0 is allowed: the diffusion-free process exercises pure drift
  // integration in solver tests.
  if (p_.theta <= 0.0 || p_.g0 < 0.0) {
    throw config_error("OuTestParams: theta must be positive, g0 nonnegative");
  }
}

void OuTestSde::drift(const CompressedSpec& x, const CompressedSpec& y,
                      double t, CompressedSpec* out) const {
  (void)y;
  (void)t;
  *out = x;
  for (auto& v : out->grid.values) v *= -p_.theta;
}

double OuTestSde::diffusion(double t) const {
  (void)t;
  return p_.g0;
}

void OuTestSde::kernel_mean(const CompressedSpec& x0, const CompressedSpec& y,
                            double t, CompressedSpec* out) const {
  (void)y;
  const double decay = std::exp(-p_.theta * t);
  *out = x0;
  for (auto& v : out->grid.values) v *= decay;
}

double OuTestSde::kernel_sigma_sq(double t) const {
  if (t < 0.0) throw domain_error("kernel_sigma_sq: t must be >= 0");
  return p_.g0 * p_.g0 * (1.0 - std::exp(-2.0 * p_.theta * t)) /
         (2.0 * p_.theta);
}

void ou_moments(double x0, double t, const OuTestParams& p, double* mean,
                double* var) {
  *mean = x0 * std::exp(-p.theta * t);
  *var = p.g0 * p.g0 * (1.0 - std::exp(-2.0 * p.theta * t)) / (2.0 * p.theta);
}

void sample_forward(const Sde& sde, const CompressedSpec& x0,
                    const CompressedSpec& y, double t, Rng* rng,
                    CompressedSpec* xt, CompressedSpec* z) {
  sde.kernel_mean(x0, y, t, xt);
  *z = x0;
  const double sigma = sde.kernel_sigma(t);
  for (std::size_t i = 0; i < z->grid.values.size(); ++i) {
    z->grid.values[i] = rng->cnormal();
    xt->grid.values[i] += sigma * z->grid.values[i];
  }
}

CompressedSpec sample_prior(const Sde& sde, const CompressedSpec& y,
                            double t_start, Rng* rng) {
  CompressedSpec x = y;
  const double sigma = sde.kernel_sigma(t_start);
  for (auto& v : x.grid.values) v += sigma * rng->cnormal();
  return x;
}

}  // namespace crpkit
