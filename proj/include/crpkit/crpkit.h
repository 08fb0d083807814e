/* include/crpkit/crpkit.h */

/* Copyright 2026  CRP-Kit Authors */

/* Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *  http://www.apache.org/licenses/LICENSE-2.0
 *
 * THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
 * KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
 * WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
 * MERCHANTABLITY OR NON-INFRINGEMENT.
 * See the Apache 2 License for the specific language governing permissions and
 * limitations under the License. */

/* C interface to the speech-enhancement toolkit: dataset generation,
 * two-stage diffusion training, enhancement and NFE sweeps behind opaque
 * handles and integer status codes. All functions are synchronous. Handles
 * are not thread-safe; use one crp_ctx per thread. */

#ifndef CRPKIT_CRPKIT_H_
#define CRPKIT_CRPKIT_H_

#include <stdint.h>

#if defined(__cplusplus)
extern "C" {
#endif

typedef enum crp_status {
  CRP_OK = 0,
  CRP_ERR_RUNTIME = 1, /* I/O trouble, numeric failure mid-run */
  CRP_ERR_CONFIG = 2   /* bad config file, bad arguments, misuse */
} crp_status;

/* Library version as "major.minor.patch". */
const char* crp_version(void);

typedef struct crp_ctx crp_ctx;

crp_ctx* crp_ctx_create(void);
void crp_ctx_destroy(crp_ctx* ctx);

/* Diagnostics from the most recent call on this ctx. Never NULL; empty when
 * the call succeeded (error) or produced none (warnings). The summary is a
 * small JSON object describing the outputs of the last successful command.
 * Pointers stay valid until the next call on the same ctx. */
const char* crp_last_error(const crp_ctx* ctx);
const char* crp_last_warnings(const crp_ctx* ctx);
const char* crp_last_summary(const crp_ctx* ctx);

/* Caps BLAS/worker threads. n <= 0 applies the CRP_KIT_THREADS environment
 * variable instead (no-op when unset). */
crp_status crp_set_threads(crp_ctx* ctx, int n);

/* Commands. Each loads the JSON run config at config_path, writes outputs
 * plus the fully resolved config into out_dir, and reports problems through
 * the returned status + crp_last_error. Pass has_seed != 0 to override the
 * config's global seed (for sweep this also replaces the evaluation seed
 * list with {seed}). */

crp_status crp_generate(crp_ctx* ctx, const char* config_path,
                        const char* out_dir, int has_seed, uint64_t seed);

/* stage: "dsm", "crp" or "predictive"; "crp" requires from_checkpoint (the
 * first-stage model). Pass NULL or "" for no checkpoint. */
crp_status crp_train(crp_ctx* ctx, const char* config_path,
                     const char* out_dir, const char* stage,
                     const char* from_checkpoint, int has_seed, uint64_t seed);

/* Flag-style overrides win over the config's enhance section; pass NULL/""
 * (or n_steps <= 0) to keep the config value. config_path itself may be
 * NULL/"" to run from defaults plus overrides alone. */
crp_status crp_enhance(crp_ctx* ctx, const char* config_path,
                       const char* out_dir, const char* checkpoint,
                       const char* input_wav, int n_steps, const char* mode,
                       int has_seed, uint64_t seed);

crp_status crp_sweep(crp_ctx* ctx, const char* config_path,
                     const char* out_dir, int has_seed, uint64_t seed);

/* Long-lived model handle for embedding: load a checkpoint once, enhance
 * many WAV files. Returns NULL on failure (see crp_last_error). */
typedef struct crp_model crp_model;

crp_model* crp_model_load(crp_ctx* ctx, const char* checkpoint_path);
void crp_model_destroy(crp_model* model);

/* "dsm", "crp" or "predictive". */
const char* crp_model_stage(const crp_model* model);

/* Enhances one file. mode is "em" or "pc"; n_steps and mode are ignored for
 * predictive models (single forward pass). */
crp_status crp_model_enhance_wav(crp_ctx* ctx, const crp_model* model,
                                 const char* noisy_wav_path,
                                 const char* enhanced_wav_path, int n_steps,
                                 const char* mode, uint64_t seed);

#if defined(__cplusplus)
}
#endif

#endif /* CRPKIT_CRPKIT_H_ */
