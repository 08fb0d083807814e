// src/runconfig.cpp

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

#include "runconfig.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"

namespace crpkit {

namespace {

using nlohmann::json;

// Wraps one JSON object for strict reading: every key must be consumed by a
// read_* call before finish(), otherwise the leftover is reported by its
// dotted path.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw config_error("config: " +
                         (path_.empty() ? std::string("document") : path_) +
                         " must be a JSON object");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <typename T>
  void read(const char* key, T* out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    try {
      *out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw config_error("config: bad value type for " + dotted(key));
    }
  }

  // Marks a subsection consumed and returns it for recursive parsing.
  const json& section(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string dotted(const char* key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (seen_.find(item.key()) == seen_.end()) {
        throw config_error("config: unknown key " + dotted(item.key().c_str()));
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void parse_data(const json& j, DataSection* out) {
  StrictObject o(j, "data");
  o.read("num_pairs", &out->num_pairs);
  o.read("test_pairs", &out->test_pairs);
  o.read("signal_length", &out->signal_length);
  o.read("sample_rate", &out->sample_rate);
  o.read("snr_lo_db", &out->snr_lo_db);
  o.read("snr_hi_db", &out->snr_hi_db);
  o.read("tone_count", &out->tone_count);
  o.read("noise_ar_coefficient", &out->noise_ar_coefficient);
  o.read("manifest", &out->manifest);
  o.finish();
}

void parse_stft(const json& j, StftSection* out) {
  StrictObject o(j, "stft");
  o.read("window_length", &out->window_length);
  o.read("hop", &out->hop);
  o.finish();
}

void parse_compression(const json& j, Compression* out) {
  StrictObject o(j, "compression");
  o.read("alpha", &out->alpha);
  o.read("beta", &out->beta);
  o.finish();
}

void parse_sde(const json& j, BbedParams* out) {
  StrictObject o(j, "sde");
  o.read("c", &out->c);
  o.read("k", &out->k);
  o.read("T", &out->T);
  o.read("t_eps", &out->t_eps);
  o.read("t_rsp", &out->t_rsp);
  o.finish();
}

void parse_net(const json& j, NetConfig* out) {
  StrictObject o(j, "net");
  o.read("hidden_width", &out->hidden_width);
  o.read("hidden_layers", &out->hidden_layers);
  o.read("time_embed_dim", &out->time_embed_dim);
  o.finish();
}

void parse_train(const json& j, const std::string& name, bool crp,
                 TrainSection* out) {
  StrictObject o(j, name);
  o.read("batch_size", &out->batch_size);
  o.read("epochs", &out->epochs);
  o.read("lr", &out->lr);
  o.read("weight_decay", &out->weight_decay);
  o.read("ema_decay", &out->ema_decay);
  o.read("validation_every", &out->validation_every);
  o.read("validation_pairs", &out->validation_pairs);
  if (crp) {
    o.read("n_steps", &out->n_steps);
    o.read("stochastic_rollout", &out->stochastic_rollout);
  }
  o.finish();
}

void parse_corrector(const json& j, CorrectorConfig* out) {
  StrictObject o(j, "corrector");
  o.read("steps", &out->steps);
  o.read("snr", &out->snr);
  o.finish();
}

void parse_enhance(const json& j, EnhanceSection* out) {
  StrictObject o(j, "enhance");
  o.read("checkpoint", &out->checkpoint);
  o.read("input_wav", &out->input_wav);
  o.read("n_steps", &out->n_steps);
  o.read("mode", &out->mode);
  o.finish();
}

void parse_sweep(const json& j, SweepSection* out) {
  StrictObject o(j, "sweep");
  o.read("nfe_grid", &out->nfe_grid);
  o.read("mode", &out->mode);
  o.read("eval_seeds", &out->eval_seeds);
  o.read("checkpoint_dsm", &out->checkpoint_dsm);
  o.read("checkpoint_crp", &out->checkpoint_crp);
  o.read("checkpoint_predictive", &out->checkpoint_predictive);
  o.finish();
}

void check_mode(const std::string& mode, const char* where) {
  if (mode != "em" && mode != "pc") {
    throw config_error(std::string("config: ") + where +
                       " must be \"em\" or \"pc\"");
  }
}

}  // namespace

MixtureSpec DataSection::mixture(std::uint64_t seed) const {
  MixtureSpec ms;
  ms.num_pairs = num_pairs;
  ms.signal_length = signal_length;
  ms.sample_rate = sample_rate;
  ms.snr_lo_db = snr_lo_db;
  ms.snr_hi_db = snr_hi_db;
  ms.tone_count = tone_count;
  ms.noise_ar_coefficient = noise_ar_coefficient;
  ms.seed = seed;
  return ms;
}

StftMeta RunConfig::stft_meta() const {
  StftMeta meta;
  meta.window_length = stft.window_length;
  meta.hop = stft.hop;
  meta.sample_rate = data.sample_rate;
  return meta;
}

TrainConfig RunConfig::train_config(Stage stage) const {
  const TrainSection* s = nullptr;
  switch (stage) {
    case Stage::kDsm:
      s = &train_dsm;
      break;
    case Stage::kCrp:
      s = &train_crp;
      break;
    case Stage::kPredictive:
      s = &train_predictive;
      break;
  }
  TrainConfig tc;
  tc.stage = stage;
  tc.batch_size = s->batch_size;
  tc.epochs = s->epochs;
  tc.lr = s->lr;
  tc.weight_decay = s->weight_decay;
  tc.ema_decay = s->ema_decay;
  tc.validation_every = s->validation_every;
  tc.validation_pairs = s->validation_pairs;
  tc.seed = seed;
  tc.net = net;
  tc.net.time_conditioned = (stage != Stage::kPredictive);
  tc.sde = sde;
  if (stage == Stage::kCrp) {
    tc.crp_schedule = build_schedule(sde.t_rsp, sde.t_eps, s->n_steps);
    tc.crp_stochastic_rollout = s->stochastic_rollout;
  }
  return tc;
}

void RunConfig::validate() const {
  if (data.num_pairs < 1) {
    throw config_error("config: data.num_pairs must be >= 1");
  }
  if (data.test_pairs < 0 || data.test_pairs >= data.num_pairs) {
    throw config_error(
        "config: data.test_pairs must be in [0, data.num_pairs)");
  }
  if (data.snr_lo_db > data.snr_hi_db) {
    throw config_error(
        "config: data.snr_lo_db must not exceed data.snr_hi_db");
  }
  if (data.signal_length < stft.window_length) {
    throw config_error(
        "config: data.signal_length shorter than stft.window_length");
  }
  check_mode(enhance.mode, "enhance.mode");
  check_mode(sweep.mode, "sweep.mode");
  if (enhance.n_steps < 1) {
    throw config_error("config: enhance.n_steps must be >= 1");
  }
  if (sweep.nfe_grid.empty()) {
    throw config_error("config: sweep.nfe_grid must not be empty");
  }
  for (const int n : sweep.nfe_grid) {
    if (n < 1) throw config_error("config: sweep.nfe_grid entries must be >= 1");
  }
  if (sweep.eval_seeds.empty()) {
    throw config_error("config: sweep.eval_seeds must not be empty");
  }
  if (train_crp.n_steps < 1) {
    throw config_error("config: train_crp.n_steps must be >= 1");
  }
  sde.validate();
}

RunConfig parse_run_config(const std::string& json_text) {
  const json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) {
    throw config_error("config: not valid JSON");
  }
  StrictObject root(j, "");
  if (!root.has("schema_version")) {
    throw config_error("config: missing schema_version");
  }
  int version = 0;
  root.read("schema_version", &version);
  if (version != 1) {
    throw config_error("config: unsupported schema_version (want 1)");
  }

  RunConfig cfg;
  root.read("seed", &cfg.seed);
  if (root.has("data")) parse_data(root.section("data"), &cfg.data);
  if (root.has("stft")) parse_stft(root.section("stft"), &cfg.stft);
  if (root.has("compression")) {
    parse_compression(root.section("compression"), &cfg.comp);
  }
  if (root.has("sde")) parse_sde(root.section("sde"), &cfg.sde);
  if (root.has("net")) parse_net(root.section("net"), &cfg.net);
  if (root.has("train_dsm")) {
    parse_train(root.section("train_dsm"), "train_dsm", false, &cfg.train_dsm);
  }
  if (root.has("train_crp")) {
    parse_train(root.section("train_crp"), "train_crp", true, &cfg.train_crp);
  }
  if (root.has("train_predictive")) {
    parse_train(root.section("train_predictive"), "train_predictive", false,
                &cfg.train_predictive);
  }
  if (root.has("corrector")) {
    parse_corrector(root.section("corrector"), &cfg.corrector);
  }
  if (root.has("enhance")) parse_enhance(root.section("enhance"), &cfg.enhance);
  if (root.has("sweep")) parse_sweep(root.section("sweep"), &cfg.sweep);
  root.finish();

  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) {
    throw io_error("config: cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string serialize_run_config(const RunConfig& cfg) {
  json train_dsm = {{"batch_size", cfg.train_dsm.batch_size},
                    {"epochs", cfg.train_dsm.epochs},
                    {"lr", cfg.train_dsm.lr},
                    {"weight_decay", cfg.train_dsm.weight_decay},
                    {"ema_decay", cfg.train_dsm.ema_decay},
                    {"validation_every", cfg.train_dsm.validation_every},
                    {"validation_pairs", cfg.train_dsm.validation_pairs}};
  json train_crp = {{"batch_size", cfg.train_crp.batch_size},
                    {"epochs", cfg.train_crp.epochs},
                    {"lr", cfg.train_crp.lr},
                    {"weight_decay", cfg.train_crp.weight_decay},
                    {"ema_decay", cfg.train_crp.ema_decay},
                    {"validation_every", cfg.train_crp.validation_every},
                    {"validation_pairs", cfg.train_crp.validation_pairs},
                    {"n_steps", cfg.train_crp.n_steps},
                    {"stochastic_rollout", cfg.train_crp.stochastic_rollout}};
  json train_pred = {{"batch_size", cfg.train_predictive.batch_size},
                     {"epochs", cfg.train_predictive.epochs},
                     {"lr", cfg.train_predictive.lr},
                     {"weight_decay", cfg.train_predictive.weight_decay},
                     {"ema_decay", cfg.train_predictive.ema_decay},
                     {"validation_every", cfg.train_predictive.validation_every},
                     {"validation_pairs", cfg.train_predictive.validation_pairs}};

  const json doc = {
      {"schema_version", 1},
      {"seed", cfg.seed},
      {"data",
       {{"num_pairs", cfg.data.num_pairs},
        {"test_pairs", cfg.data.test_pairs},
        {"signal_length", cfg.data.signal_length},
        {"sample_rate", cfg.data.sample_rate},
        {"snr_lo_db", cfg.data.snr_lo_db},
        {"snr_hi_db", cfg.data.snr_hi_db},
        {"tone_count", cfg.data.tone_count},
        {"noise_ar_coefficient", cfg.data.noise_ar_coefficient},
        {"manifest", cfg.data.manifest}}},
      {"stft",
       {{"window_length", cfg.stft.window_length}, {"hop", cfg.stft.hop}}},
      {"compression", {{"alpha", cfg.comp.alpha}, {"beta", cfg.comp.beta}}},
      {"sde",
       {{"c", cfg.sde.c},
        {"k", cfg.sde.k},
        {"T", cfg.sde.T},
        {"t_eps", cfg.sde.t_eps},
        {"t_rsp", cfg.sde.t_rsp}}},
      {"net",
       {{"hidden_width", cfg.net.hidden_width},
        {"hidden_layers", cfg.net.hidden_layers},
        {"time_embed_dim", cfg.net.time_embed_dim}}},
      {"train_dsm", train_dsm},
      {"train_crp", train_crp},
      {"train_predictive", train_pred},
      {"corrector",
       {{"steps", cfg.corrector.steps}, {"snr", cfg.corrector.snr}}},
      {"enhance",
       {{"checkpoint", cfg.enhance.checkpoint},
        {"input_wav", cfg.enhance.input_wav},
        {"n_steps", cfg.enhance.n_steps},
        {"mode", cfg.enhance.mode}}},
      {"sweep",
       {{"nfe_grid", cfg.sweep.nfe_grid},
        {"mode", cfg.sweep.mode},
        {"eval_seeds", cfg.sweep.eval_seeds},
        {"checkpoint_dsm", cfg.sweep.checkpoint_dsm},
        {"checkpoint_crp", cfg.sweep.checkpoint_crp},
        {"checkpoint_predictive", cfg.sweep.checkpoint_predictive}}}};
  return doc.dump(2) + "\n";
}

void write_run_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) {
    throw io_error("config: cannot write " + path);
  }
  out << serialize_run_config(cfg);
}

}  // namespace crpkit
