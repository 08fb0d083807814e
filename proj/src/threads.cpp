// src/threads.cpp

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

#include "threads.hpp"

#include <cblas.h>

#include <cstdlib>
#include <string>

namespace crpkit {

void set_num_threads(int n) {
  if (n > 0) openblas_set_num_threads(n);
}

int apply_thread_env() {
  const char* env = std::getenv("CRP_KIT_THREADS");
  if (env == nullptr) return 0;
  int n = 0;
  try {
    n = std::stoi(env);
  } catch (...) {
    return 0;
  }
  if (n <= 0) return 0;
  set_num_threads(n);
  return n;
}

}  // namespace crpkit
