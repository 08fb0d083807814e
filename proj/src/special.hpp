// src/special.hpp

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

#ifndef CRPKIT_SPECIAL_HPP_
#define CRPKIT_SPECIAL_HPP_

namespace crpkit {

// Principal-value exponential integral Ei(x). Throws domain_error at x = 0
// (logarithmic singularity). Relative accuracy is better than 1e-12 on
// [-30, 30] and degrades gracefully outside.
double expint_ei(double x);

}  // namespace crpkit

#endif  // CRPKIT_SPECIAL_HPP_
