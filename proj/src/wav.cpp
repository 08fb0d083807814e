// src/wav.cpp

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

#include "wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "errors.hpp"

namespace crpkit {

namespace {

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
  b.push_back((v >> 16) & 0xff);
  b.push_back((v >> 24) & 0xff);
}

void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
}

void put_tag(std::vector<std::uint8_t>& b, const char* tag) {
  b.insert(b.end(), tag, tag + 4);
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

void write_wav(const std::string& path, const TimeSignal& sig) {
  const std::uint32_t n = static_cast<std::uint32_t>(sig.samples.size());
  const std::uint32_t data_bytes = n * 2;
  std::vector<std::uint8_t> buf;
  buf.reserve(44 + data_bytes);
  put_tag(buf, "RIFF");
  put_u32(buf, 36 + data_bytes);
  put_tag(buf, "WAVE");
  put_tag(buf, "fmt ");
  put_u32(buf, 16);
  put_u16(buf, 1);  // PCM
  put_u16(buf, 1);  // mono
  put_u32(buf, static_cast<std::uint32_t>(sig.sample_rate));
  put_u32(buf, static_cast<std::uint32_t>(sig.sample_rate) * 2);
  put_u16(buf, 2);   // block align
  put_u16(buf, 16);  // bits per sample
  put_tag(buf, "data");
  put_u32(buf, data_bytes);
  for (double x : sig.samples) {
    const double clamped = std::clamp(x, -1.0, 1.0);
    const auto q = static_cast<std::int16_t>(
        std::lrint(std::clamp(clamped * 32767.0, -32768.0, 32767.0)));
    put_u16(buf, static_cast<std::uint16_t>(q));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("write_wav: cannot open " + path);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw io_error("write_wav: short write to " + path);
}

TimeSignal read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("read_wav: cannot open " + path);
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (buf.size() < 44 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw io_error("read_wav: not a RIFF/WAVE file: " + path);
  }
  // Walk chunks; require a 16-bit mono PCM fmt chunk before data.
  std::size_t pos = 12;
  int sample_rate = 0;
  bool have_fmt = false;
  while (pos + 8 <= buf.size()) {
    const std::uint32_t chunk_size = get_u32(buf.data() + pos + 4);
    const std::uint8_t* body = buf.data() + pos + 8;
    if (std::memcmp(buf.data() + pos, "fmt ", 4) == 0) {
      if (chunk_size < 16 || pos + 8 + chunk_size > buf.size()) {
        throw io_error("read_wav: truncated fmt chunk: " + path);
      }
      if (get_u16(body) != 1) throw io_error("read_wav: not PCM: " + path);
      if (get_u16(body + 2) != 1) throw io_error("read_wav: not mono: " + path);
      if (get_u16(body + 14) != 16) {
        throw io_error("read_wav: not 16-bit: " + path);
      }
      sample_rate = static_cast<int>(get_u32(body + 4));
      have_fmt = true;
    } else if (std::memcmp(buf.data() + pos, "data", 4) == 0) {
      if (!have_fmt) throw io_error("read_wav: data before fmt: " + path);
      if (pos + 8 + chunk_size > buf.size()) {
        throw io_error("read_wav: truncated data chunk: " + path);
      }
      TimeSignal sig;
      sig.sample_rate = sample_rate;
      const std::size_t n = chunk_size / 2;
      sig.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto q = static_cast<std::int16_t>(get_u16(body + 2 * i));
        sig.samples[i] = static_cast<double>(q) / 32767.0;
      }
      return sig;
    }
    pos += 8 + chunk_size + (chunk_size & 1);
  }
  throw io_error("read_wav: no data chunk: " + path);
}

}  // namespace crpkit
