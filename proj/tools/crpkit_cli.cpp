// tools/crpkit_cli.cpp

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

// Command-line front end over the C API. Exit codes: 0 success, 2 for
// config/usage problems (including bad flags), 1 for runtime failures.

#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "crpkit/crpkit.h"

namespace {

struct CommonArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool has_seed = false;
};

void add_common(CLI::App* cmd, CommonArgs* args, bool config_required) {
  auto* config_opt =
      cmd->add_option("--config", args->config, "Run config JSON file");
  if (config_required) config_opt->required();
  cmd->add_option("--out", args->out, "Output directory")->required();
  cmd->add_option("--seed", args->seed,
                  "Overrides the config's global seed (sweep: the eval seeds)")
      ->each([args](const std::string&) { args->has_seed = true; });
}

int finish(crp_ctx* ctx, crp_status status) {
  const char* warnings = crp_last_warnings(ctx);
  if (warnings[0] != '\0') {
    std::fprintf(stderr, "warning: %s\n", warnings);
  }
  if (status != CRP_OK) {
    std::fprintf(stderr, "error: %s\n", crp_last_error(ctx));
    return static_cast<int>(status);
  }
  std::printf("%s\n", crp_last_summary(ctx));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusion speech enhancement toolkit"};
  app.set_version_flag("--version", crp_version());
  app.require_subcommand(1);

  CommonArgs gen_args;
  CLI::App* gen = app.add_subcommand(
      "generate", "Synthesize a clean/noisy WAV dataset with a manifest");
  add_common(gen, &gen_args, true);

  CommonArgs train_args;
  std::string stage;
  std::string from_ckpt;
  CLI::App* train = app.add_subcommand(
      "train", "Train one stage: dsm, crp (needs --from) or predictive");
  add_common(train, &train_args, true);
  train->add_option("--stage", stage, "dsm | crp | predictive")->required();
  train->add_option("--from", from_ckpt,
                    "First-stage checkpoint to fine-tune (crp only)");

  CommonArgs enh_args;
  std::string ckpt;
  std::string input_wav;
  int nfe = 0;
  std::string mode;
  CLI::App* enh = app.add_subcommand(
      "enhance", "Enhance one noisy WAV file with a trained checkpoint");
  add_common(enh, &enh_args, false);
  enh->add_option("--ckpt", ckpt, "Checkpoint file (overrides config)");
  enh->add_option("--in", input_wav, "Noisy input WAV (overrides config)");
  enh->add_option("--nfe", nfe, "Reverse solver steps (overrides config)");
  enh->add_option("--mode", mode, "em | pc (overrides config)");

  CommonArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Evaluate checkpoints over the NFE grid into CSV/JSON tables");
  add_common(sweep, &sweep_args, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  crp_ctx* ctx = crp_ctx_create();
  if (ctx == nullptr) {
    std::fprintf(stderr, "error: cannot allocate context\n");
    return 1;
  }
  crp_set_threads(ctx, 0);  // applies CRP_KIT_THREADS when set

  crp_status status = CRP_OK;
  if (gen->parsed()) {
    status = crp_generate(ctx, gen_args.config.c_str(), gen_args.out.c_str(),
                          gen_args.has_seed ? 1 : 0, gen_args.seed);
    const int rc = finish(ctx, status);
    crp_ctx_destroy(ctx);
    return rc;
  }
  if (train->parsed()) {
    status = crp_train(ctx, train_args.config.c_str(), train_args.out.c_str(),
                       stage.c_str(), from_ckpt.c_str(),
                       train_args.has_seed ? 1 : 0, train_args.seed);
    const int rc = finish(ctx, status);
    crp_ctx_destroy(ctx);
    return rc;
  }
  if (enh->parsed()) {
    status = crp_enhance(ctx, enh_args.config.c_str(), enh_args.out.c_str(),
                         ckpt.c_str(), input_wav.c_str(), nfe, mode.c_str(),
                         enh_args.has_seed ? 1 : 0, enh_args.seed);
    const int rc = finish(ctx, status);
    crp_ctx_destroy(ctx);
    return rc;
  }
  status = crp_sweep(ctx, sweep_args.config.c_str(), sweep_args.out.c_str(),
                     sweep_args.has_seed ? 1 : 0, sweep_args.seed);
  const int rc = finish(ctx, status);
  crp_ctx_destroy(ctx);
  return rc;
}
