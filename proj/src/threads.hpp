// src/threads.hpp

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

#ifndef CRPKIT_THREADS_HPP_
#define CRPKIT_THREADS_HPP_

namespace crpkit {

// Caps BLAS worker threads. n <= 0 leaves the library default in place.
void set_num_threads(int n);

// Applies the CRP_KIT_THREADS environment variable if set; returns the
// applied count, or 0 when unset/invalid.
int apply_thread_env();

}  // namespace crpkit

#endif  // CRPKIT_THREADS_HPP_
