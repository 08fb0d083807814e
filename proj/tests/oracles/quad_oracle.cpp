// tests/oracles/quad_oracle.cpp

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

#include "quad_oracle.hpp"

#include <cmath>

namespace crpkit_oracle {

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa,
             double b, double fb, double fm, double whole, double eps,
             int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, flm);
  const double right = simpson(f, m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
    return left + right + delta / 15.0;
  }
  return adapt(f, a, fa, m, fm, flm, left, eps / 2.0, depth - 1) +
         adapt(f, m, fm, b, fb, frm, right, eps / 2.0, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson(f, a, fa, b, fb, fm);
  return adapt(f, a, fa, b, fb, fm, whole, abs_tol, 50);
}

double bridge_sigma_sq_quadrature(double c, double k, double t) {
  if (t == 0.0) return 0.0;
  const auto integrand = [c, k](double s) {
    const double g = c * std::pow(k, s);
    const double denom = 1.0 - s;
    return g * g / (denom * denom);
  };
  // Integrand is bounded by c^2 k^{2t} / (1-t)^2; scale the tolerance so the
  // result carries ~12 accurate digits.
  const double bound = integrand(t) * t;
  const double integral = integrate(integrand, 0.0, t, 1e-13 * (bound + 1.0));
  return (1.0 - t) * (1.0 - t) * integral;
}

}  // namespace crpkit_oracle
