// src/optim.cpp

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

#include "optim.hpp"

#include <cmath>

#include "errors.hpp"

namespace crpkit {

void adam_step(std::vector<double>* theta, const std::vector<double>& grad,
               AdamState* state) {
  if (theta->size() != grad.size() || state->m.size() != grad.size() ||
      state->v.size() != grad.size()) {
    throw shape_error("adam_step: vector length mismatch");
  }
  for (double g : grad) {
    if (!std::isfinite(g)) {
      throw numeric_error("adam_step: non-finite gradient, update rejected");
    }
  }
  state->step += 1;
  const double bc1 = 1.0 - std::pow(state->beta1, state->step);
  const double bc2 = 1.0 - std::pow(state->beta2, state->step);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    state->m[i] = state->beta1 * state->m[i] + (1.0 - state->beta1) * grad[i];
    state->v[i] =
        state->beta2 * state->v[i] + (1.0 - state->beta2) * grad[i] * grad[i];
    const double mhat = state->m[i] / bc1;
    const double vhat = state->v[i] / bc2;
    (*theta)[i] -= state->lr * mhat / (std::sqrt(vhat) + state->eps_adam) +
                   state->lr * state->weight_decay * (*theta)[i];
  }
}

void ema_update(EmaState* ema, const std::vector<double>& theta) {
  if (ema->shadow.size() != theta.size()) {
    throw shape_error("ema_update: shadow length mismatch");
  }
  const double d = ema->decay;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    ema->shadow[i] = d * ema->shadow[i] + (1.0 - d) * theta[i];
  }
}

}  // namespace crpkit
