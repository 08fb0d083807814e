// src/capi.cpp

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

#include "crpkit/crpkit.h"

#include <exception>
#include <string>

#include "errors.hpp"
#include "json.hpp"
#include "runconfig.hpp"
#include "runner.hpp"
#include "threads.hpp"
#include "training.hpp"
#include "wav.hpp"

struct crp_ctx {
  std::string last_error;
  std::string last_warnings;
  std::string last_summary;
};

struct crp_model {
  crpkit::Checkpoint ck;
};

namespace {

void reset(crp_ctx* ctx) {
  ctx->last_error.clear();
  ctx->last_warnings.clear();
  ctx->last_summary.clear();
}

// Runs the body, mapping exceptions onto the status codes the CLI reuses as
// exit codes: config/usage problems are 2, everything else that throws is 1.
template <typename Fn>
crp_status guarded(crp_ctx* ctx, Fn&& body) {
  if (ctx == nullptr) return CRP_ERR_CONFIG;
  reset(ctx);
  try {
    body();
    return CRP_OK;
  } catch (const crpkit::config_error& e) {
    ctx->last_error = e.what();
    return CRP_ERR_CONFIG;
  } catch (const crpkit::usage_error& e) {
    ctx->last_error = e.what();
    return CRP_ERR_CONFIG;
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return CRP_ERR_RUNTIME;
  } catch (...) {
    ctx->last_error = "unknown error";
    return CRP_ERR_RUNTIME;
  }
}

std::string require_arg(const char* value, const char* name) {
  if (value == nullptr || value[0] == '\0') {
    throw crpkit::config_error(std::string("missing required argument: ") +
                               name);
  }
  return value;
}

crpkit::RunConfig load_config_arg(const char* config_path, int has_seed,
                                  uint64_t seed, bool seed_replaces_eval) {
  crpkit::RunConfig cfg;
  if (config_path != nullptr && config_path[0] != '\0') {
    cfg = crpkit::load_run_config(config_path);
  }
  if (has_seed != 0) {
    cfg.seed = seed;
    if (seed_replaces_eval) cfg.sweep.eval_seeds = {seed};
  }
  return cfg;
}

}  // namespace

extern "C" {

const char* crp_version(void) { return CRPKIT_VERSION; }

crp_ctx* crp_ctx_create(void) { return new (std::nothrow) crp_ctx(); }

void crp_ctx_destroy(crp_ctx* ctx) { delete ctx; }

const char* crp_last_error(const crp_ctx* ctx) {
  return ctx == nullptr ? "" : ctx->last_error.c_str();
}

const char* crp_last_warnings(const crp_ctx* ctx) {
  return ctx == nullptr ? "" : ctx->last_warnings.c_str();
}

const char* crp_last_summary(const crp_ctx* ctx) {
  return ctx == nullptr ? "" : ctx->last_summary.c_str();
}

crp_status crp_set_threads(crp_ctx* ctx, int n) {
  return guarded(ctx, [&] {
    if (n > 0) {
      crpkit::set_num_threads(n);
    } else {
      crpkit::apply_thread_env();
    }
  });
}

crp_status crp_generate(crp_ctx* ctx, const char* config_path,
                        const char* out_dir, int has_seed, uint64_t seed) {
  return guarded(ctx, [&] {
    const std::string out = require_arg(out_dir, "--out");
    require_arg(config_path, "--config");
    const crpkit::RunConfig cfg =
        load_config_arg(config_path, has_seed, seed, false);
    const crpkit::GenerateResult res = crpkit::cmd_generate(cfg, out);
    ctx->last_summary = nlohmann::json{{"command", "generate"},
                                       {"manifest", res.manifest_path},
                                       {"pairs", res.pairs_written}}
                            .dump();
  });
}

crp_status crp_train(crp_ctx* ctx, const char* config_path,
                     const char* out_dir, const char* stage,
                     const char* from_checkpoint, int has_seed,
                     uint64_t seed) {
  return guarded(ctx, [&] {
    const std::string out = require_arg(out_dir, "--out");
    require_arg(config_path, "--config");
    const crpkit::Stage st =
        crpkit::stage_from_name(require_arg(stage, "--stage"));
    const std::string from =
        from_checkpoint == nullptr ? "" : from_checkpoint;
    const crpkit::RunConfig cfg =
        load_config_arg(config_path, has_seed, seed, false);
    const crpkit::TrainRunResult res = crpkit::cmd_train(cfg, st, from, out);
    ctx->last_summary = nlohmann::json{{"command", "train"},
                                       {"stage", crpkit::stage_name(st)},
                                       {"checkpoint", res.checkpoint_path},
                                       {"log", res.log_path},
                                       {"best_val", res.best_val},
                                       {"steps", res.steps}}
                            .dump();
  });
}

crp_status crp_enhance(crp_ctx* ctx, const char* config_path,
                       const char* out_dir, const char* checkpoint,
                       const char* input_wav, int n_steps, const char* mode,
                       int has_seed, uint64_t seed) {
  return guarded(ctx, [&] {
    const std::string out = require_arg(out_dir, "--out");
    crpkit::RunConfig cfg = load_config_arg(config_path, has_seed, seed, false);
    if (checkpoint != nullptr && checkpoint[0] != '\0') {
      cfg.enhance.checkpoint = checkpoint;
    }
    if (input_wav != nullptr && input_wav[0] != '\0') {
      cfg.enhance.input_wav = input_wav;
    }
    if (n_steps > 0) cfg.enhance.n_steps = n_steps;
    if (mode != nullptr && mode[0] != '\0') cfg.enhance.mode = mode;
    const crpkit::EnhanceResult res = crpkit::cmd_enhance(cfg, out);
    ctx->last_summary =
        nlohmann::json{{"command", "enhance"},
                       {"wav", res.wav_path},
                       {"report", res.report_path},
                       {"nfe", res.nfe},
                       {"schedule_match", res.schedule_match},
                       {"runtime_seconds", res.runtime_seconds}}
            .dump();
  });
}

crp_status crp_sweep(crp_ctx* ctx, const char* config_path,
                     const char* out_dir, int has_seed, uint64_t seed) {
  return guarded(ctx, [&] {
    const std::string out = require_arg(out_dir, "--out");
    require_arg(config_path, "--config");
    const crpkit::RunConfig cfg =
        load_config_arg(config_path, has_seed, seed, true);
    const crpkit::SweepResult res = crpkit::cmd_sweep(cfg, out);
    for (const std::string& w : res.warnings) {
      if (!ctx->last_warnings.empty()) ctx->last_warnings += "\n";
      ctx->last_warnings += w;
    }
    ctx->last_summary =
        nlohmann::json{{"command", "sweep"},
                       {"results", res.results_csv},
                       {"summary", res.summary_json},
                       {"curves", res.curves_csv},
                       {"methods_evaluated", res.methods_evaluated}}
            .dump();
  });
}

crp_model* crp_model_load(crp_ctx* ctx, const char* checkpoint_path) {
  crp_model* model = nullptr;
  const crp_status st = guarded(ctx, [&] {
    const std::string path = require_arg(checkpoint_path, "checkpoint");
    model = new crp_model{crpkit::load_checkpoint(path)};
  });
  return st == CRP_OK ? model : nullptr;
}

void crp_model_destroy(crp_model* model) { delete model; }

const char* crp_model_stage(const crp_model* model) {
  return model == nullptr ? "" : model->ck.stage.c_str();
}

crp_status crp_model_enhance_wav(crp_ctx* ctx, const crp_model* model,
                                 const char* noisy_wav_path,
                                 const char* enhanced_wav_path, int n_steps,
                                 const char* mode, uint64_t seed) {
  return guarded(ctx, [&] {
    if (model == nullptr) {
      throw crpkit::usage_error("model handle is null");
    }
    const std::string in = require_arg(noisy_wav_path, "input wav");
    const std::string out_path = require_arg(enhanced_wav_path, "output wav");
    const std::string mode_str =
        (mode == nullptr || mode[0] == '\0') ? "em" : mode;
    const crpkit::TimeSignal noisy = crpkit::read_wav(in);
    const crpkit::EnhanceOutput res = crpkit::enhance_signal(
        model->ck, noisy, n_steps > 0 ? n_steps : 1, mode_str,
        crpkit::CorrectorConfig{}, seed);
    crpkit::write_wav(out_path, res.enhanced);
    ctx->last_summary = nlohmann::json{{"command", "model_enhance"},
                                       {"wav", out_path},
                                       {"nfe", res.nfe}}
                            .dump();
  });
}

}  // extern "C"
