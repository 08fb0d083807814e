// tests/oracles/ei_oracle.hpp

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

#ifndef CRPKIT_TESTS_ORACLES_EI_ORACLE_HPP_
#define CRPKIT_TESTS_ORACLES_EI_ORACLE_HPP_

namespace crpkit_oracle {

// Reference Ei(x) from the defining power series
//   Ei(x) = gamma + ln|x| + sum_{n>=1} x^n/(n n!)
// summed to convergence in 384-bit arithmetic, then rounded to double. The
// extended precision absorbs the catastrophic cancellation the alternating
// series suffers for large negative x (ratio ~3e22 at x = -30, i.e. ~75 bits),
// which a double-precision 50-term sum cannot represent.
double ei_series(double x);

// Independent cross-check: the library exponential integral from MPFR.
double ei_mpfr(double x);

}  // namespace crpkit_oracle

#endif  // CRPKIT_TESTS_ORACLES_EI_ORACLE_HPP_
