// src/dataset.cpp

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

#include "dataset.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "errors.hpp"
#include "rng.hpp"
#include "wav.hpp"

namespace crpkit {

namespace {

double energy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

GeneratedPair generate_one(const MixtureSpec& cfg, Rng pair_rng,
                           std::uint64_t pair_seed) {
  const int len = cfg.signal_length;
  const double sr = cfg.sample_rate;

  // Clean: tone_count sinusoids with random frequency/amplitude/phase under
  // one slow sinusoidal envelope per pair.
  std::vector<double> clean(len, 0.0);
  const double env_freq = pair_rng.uniform(3.0, 10.0);
  const double env_phase = pair_rng.uniform(0.0, 2.0 * M_PI);
  const double env_depth = pair_rng.uniform(0.2, 0.5);
  for (int tone = 0; tone < cfg.tone_count; ++tone) {
    const double freq = pair_rng.uniform(200.0, 3600.0);
    const double amp = pair_rng.uniform(0.3, 1.0);
    const double phase = pair_rng.uniform(0.0, 2.0 * M_PI);
    for (int n = 0; n < len; ++n) {
      clean[n] += amp * std::sin(2.0 * M_PI * freq * n / sr + phase);
    }
  }
  for (int n = 0; n < len; ++n) {
    clean[n] *= 1.0 + env_depth * std::sin(2.0 * M_PI * env_freq * n / sr +
                                           env_phase);
  }

  // Noise: stationary AR(1) process v[n] = a v[n-1] + e[n].
  const double a = cfg.noise_ar_coefficient;
  std::vector<double> noise(len);
  double v = pair_rng.normal() / std::sqrt(1.0 - a * a);
  for (int n = 0; n < len; ++n) {
    v = a * v + pair_rng.normal();
    noise[n] = v;
  }

  const double snr_db = pair_rng.uniform(cfg.snr_lo_db, cfg.snr_hi_db);
  const double clean_e = energy(clean);
  const double noise_e = energy(noise);
  if (noise_e <= 0.0 || clean_e <= 0.0) {
    throw numeric_error("generate_pairs: degenerate signal energy");
  }
  const double scale =
      std::sqrt(clean_e / noise_e) * std::pow(10.0, -snr_db / 20.0);

  GeneratedPair pair;
  pair.snr_db = snr_db;
  pair.pair_seed = pair_seed;
  pair.clean.sample_rate = cfg.sample_rate;
  pair.noisy.sample_rate = cfg.sample_rate;
  pair.clean.samples = clean;
  pair.noisy.samples.resize(len);
  double peak = 0.0;
  for (int n = 0; n < len; ++n) {
    pair.noisy.samples[n] = clean[n] + scale * noise[n];
    peak = std::max(peak, std::abs(pair.noisy.samples[n]));
    peak = std::max(peak, std::abs(clean[n]));
  }
  // Joint gain so 16-bit export cannot clip; scaling both sides preserves
  // the drawn SNR exactly.
  const double gain = 0.5 / std::max(peak, 1e-12);
  for (int n = 0; n < len; ++n) {
    pair.clean.samples[n] *= gain;
    pair.noisy.samples[n] *= gain;
  }
  return pair;
}

}  // namespace

std::vector<GeneratedPair> generate_pairs(const MixtureSpec& cfg) {
  if (cfg.snr_lo_db > cfg.snr_hi_db) {
    throw config_error("generate_pairs: snr_range low > high");
  }
  if (cfg.num_pairs < 1) {
    throw config_error("generate_pairs: num_pairs must be >= 1");
  }
  if (cfg.tone_count < 1 || cfg.signal_length < 1 || cfg.sample_rate < 1) {
    throw config_error("generate_pairs: degenerate generator settings");
  }
  if (cfg.noise_ar_coefficient <= -1.0 || cfg.noise_ar_coefficient >= 1.0) {
    throw config_error("generate_pairs: AR coefficient must be in (-1, 1)");
  }
  Rng root(cfg.seed);
  std::vector<GeneratedPair> pairs;
  pairs.reserve(cfg.num_pairs);
  for (int i = 0; i < cfg.num_pairs; ++i) {
    pairs.push_back(generate_one(cfg, root.stream(i), cfg.seed ^ i));
  }
  return pairs;
}

std::string write_dataset(const std::string& dir, const MixtureSpec& cfg,
                          const std::vector<GeneratedPair>& pairs) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw io_error("write_dataset: not a directory: " + dir);
  }
  nlohmann::ordered_json manifest;
  manifest["schema_version"] = 1;
  manifest["sample_rate"] = cfg.sample_rate;
  manifest["signal_length"] = cfg.signal_length;
  manifest["num_pairs"] = static_cast<int>(pairs.size());
  manifest["seed"] = cfg.seed;
  manifest["snr_range_db"] = {cfg.snr_lo_db, cfg.snr_hi_db};
  manifest["pairs"] = nlohmann::ordered_json::array();
  char name[32];
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::snprintf(name, sizeof(name), "clean_%04zu.wav", i);
    const std::string clean_name = name;
    std::snprintf(name, sizeof(name), "noisy_%04zu.wav", i);
    const std::string noisy_name = name;
    write_wav((fs::path(dir) / clean_name).string(), pairs[i].clean);
    write_wav((fs::path(dir) / noisy_name).string(), pairs[i].noisy);
    nlohmann::ordered_json entry;
    entry["id"] = static_cast<int>(i);
    entry["clean"] = clean_name;
    entry["noisy"] = noisy_name;
    entry["seed"] = pairs[i].pair_seed;
    entry["snr_db"] = pairs[i].snr_db;
    manifest["pairs"].push_back(entry);
  }
  const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
  std::ofstream out(manifest_path, std::ios::trunc);
  if (!out) throw io_error("write_dataset: cannot open " + manifest_path);
  out << manifest.dump(2) << "\n";
  return manifest_path;
}

std::vector<GeneratedPair> load_dataset(const std::string& manifest_path) {
  namespace fs = std::filesystem;
  std::ifstream in(manifest_path);
  if (!in) throw io_error("load_dataset: cannot open " + manifest_path);
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const std::exception& e) {
    throw io_error("load_dataset: bad manifest JSON: " + std::string(e.what()));
  }
  if (!manifest.contains("pairs") || !manifest["pairs"].is_array()) {
    throw io_error("load_dataset: manifest has no pairs array");
  }
  const fs::path base = fs::path(manifest_path).parent_path();
  std::vector<GeneratedPair> pairs;
  for (const auto& entry : manifest["pairs"]) {
    GeneratedPair p;
    p.clean = read_wav((base / entry.at("clean").get<std::string>()).string());
    p.noisy = read_wav((base / entry.at("noisy").get<std::string>()).string());
    p.snr_db = entry.at("snr_db").get<double>();
    p.pair_seed = entry.value("seed", 0ULL);
    if (p.clean.samples.size() != p.noisy.samples.size()) {
      throw io_error("load_dataset: clean/noisy length mismatch in pair");
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace crpkit
