// src/wav.hpp

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

#ifndef CRPKIT_WAV_HPP_
#define CRPKIT_WAV_HPP_

#include <string>

#include "spectral.hpp"

namespace crpkit {

// Canonical 44-byte-header 16-bit PCM mono little-endian WAV. Samples are
// clamped to [-1, 1] and quantized with round(x * 32767).
void write_wav(const std::string& path, const TimeSignal& sig);

// Reads files produced by write_wav (and any canonical mono 16-bit PCM file
// whose fmt chunk precedes data). Samples are scaled back by 1/32767.
TimeSignal read_wav(const std::string& path);

}  // namespace crpkit

#endif  // CRPKIT_WAV_HPP_
