// tests/oracles/ei_oracle.cpp

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

#include "ei_oracle.hpp"

#include <mpfr.h>

#include <cmath>
#include <stdexcept>

namespace crpkit_oracle {

namespace {
constexpr mpfr_prec_t kPrec = 384;
}

double ei_series(double x) {
  if (x == 0.0 || std::isnan(x)) {
    throw std::invalid_argument("ei_series oracle: x must be nonzero finite");
  }
  mpfr_t sum, term, contrib, result;
  mpfr_inits2(kPrec, sum, term, contrib, result, (mpfr_ptr)nullptr);
  mpfr_set_d(sum, 0.0, MPFR_RNDN);
  mpfr_set_d(term, 1.0, MPFR_RNDN);
  const double guard = 2.0 * std::abs(x) + 8.0;
  for (long n = 1; n < 5000; ++n) {
    mpfr_mul_d(term, term, x, MPFR_RNDN);
    mpfr_div_si(term, term, n, MPFR_RNDN);
    mpfr_div_si(contrib, term, n, MPFR_RNDN);
    mpfr_add(sum, sum, contrib, MPFR_RNDN);
    if (static_cast<double>(n) > guard &&
        (mpfr_zero_p(contrib) || mpfr_get_exp(contrib) < -480)) {
      break;
    }
  }
  // result = gamma + ln|x| + sum
  mpfr_const_euler(result, MPFR_RNDN);
  mpfr_t lx;
  mpfr_init2(lx, kPrec);
  mpfr_set_d(lx, std::abs(x), MPFR_RNDN);
  mpfr_log(lx, lx, MPFR_RNDN);
  mpfr_add(result, result, lx, MPFR_RNDN);
  mpfr_add(result, result, sum, MPFR_RNDN);
  const double out = mpfr_get_d(result, MPFR_RNDN);
  mpfr_clears(sum, term, contrib, result, lx, (mpfr_ptr)nullptr);
  return out;
}

double ei_mpfr(double x) {
  mpfr_t v;
  mpfr_init2(v, kPrec);
  mpfr_set_d(v, x, MPFR_RNDN);
  mpfr_eint(v, v, MPFR_RNDN);
  const double out = mpfr_get_d(v, MPFR_RNDN);
  mpfr_clear(v);
  return out;
}

}  // namespace crpkit_oracle
