// src/training.cpp

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

#include "training.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace crpkit {

namespace {

constexpr char kCheckpointMagic[8] = {'C', 'R', 'P', 'K', 'P', 'T', '0', '1'};

double l2_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void check_pairs(const std::vector<TrainPair>& data, const char* who,
                 int validation_pairs) {
  if (data.empty()) {
    throw config_error(std::string(who) + ": empty training set");
  }
  if (static_cast<int>(data.size()) <= validation_pairs) {
    throw config_error(std::string(who) +
                       ": need more pairs than the validation split");
  }
  const ComplexGrid& ref = data.front().x0.grid;
  for (const TrainPair& p : data) {
    if (!p.x0.grid.same_shape(p.y.grid) || !p.x0.grid.same_shape(ref)) {
      throw shape_error(std::string(who) + ": inconsistent grid shapes");
    }
  }
}

// One denoising tile: network input rows for (X_t, Y, t) plus the matrix B
// with B = Z / sigma, so that residual = s_theta + Z / sigma = out + B.
struct DsmTile {
  Mat input;
  Mat residual_bias;
};

DsmTile dsm_tile(const ScoreNetwork& net, const Sde& sde, const TrainPair& pair,
                 double t, Rng* rng) {
  CompressedSpec xt, z;
  sample_forward(sde, pair.x0, pair.y, t, rng, &xt, &z);
  const double sigma = sde.kernel_sigma(t);
  if (!(sigma >= 1e-12)) {
    throw numeric_error("dsm loss: kernel sigma underflow");
  }
  DsmTile tile;
  tile.input = net.assemble_input(xt, pair.y, t);
  tile.residual_bias = Mat(z.size(), 2);
  for (std::size_t i = 0; i < z.size(); ++i) {
    tile.residual_bias.at(i, 0) = z.grid.values[i].real() / sigma;
    tile.residual_bias.at(i, 1) = z.grid.values[i].imag() / sigma;
  }
  return tile;
}

double sumsq(const Mat& m) {
  double s = 0.0;
  for (double v : m.data) s += v * v;
  return s;
}

void shuffle_indices(std::vector<std::size_t>* order, Rng* rng) {
  for (std::size_t i = order->size() - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(rng->uniform() *
                                             static_cast<double>(i + 1));
    if (j > i) j = i;
    std::swap((*order)[i], (*order)[j]);
  }
}

// Shared epoch/batch/validation loop for the three stages. Batches are
// contiguous chunks of a per-epoch shuffle; gradients come from batch_grad;
// validation runs before the first step, every validation_every steps and
// after the last one, and the best-validation state is what gets returned.
struct StageDriver {
  const TrainConfig* cfg = nullptr;
  ScoreNetwork* net = nullptr;
  std::size_t train_count = 0;
  Rng* order_rng = nullptr;
  bool track_ema = true;
  // Fills *grad (sized like theta) and returns the batch loss.
  std::function<double(const std::vector<std::size_t>&, std::vector<double>*)>
      batch_grad;
  // Metric under the given parameter vector; lower is better.
  std::function<double(const std::vector<double>&)> validate;
};

TrainResult run_stage(const StageDriver& drv) {
  const TrainConfig& cfg = *drv.cfg;
  ScoreNetwork& net = *drv.net;
  const std::size_t n_params = net.param_count();

  AdamState adam;
  adam.init(n_params);
  adam.lr = cfg.lr;
  adam.weight_decay = cfg.weight_decay;
  EmaState ema{net.theta(), cfg.ema_decay};

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> best_theta = net.theta();
  AdamState best_adam = adam;
  std::vector<double> best_shadow = ema.shadow;

  auto eval_vec = [&]() -> const std::vector<double>& {
    return drv.track_ema ? ema.shadow : net.theta();
  };
  auto run_validation = [&]() {
    const double metric = drv.validate(eval_vec());
    if (metric < best_val) {
      best_val = metric;
      best_theta = net.theta();
      best_adam = adam;
      best_shadow = ema.shadow;
    }
    return metric;
  };
  run_validation();

  TrainResult result;
  std::vector<std::size_t> order(drv.train_count);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad;
  int step = 0;
  bool just_validated = false;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_indices(&order, drv.order_rng);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const std::vector<std::size_t> chunk(order.begin() + start,
                                           order.begin() + stop);
      const double loss = drv.batch_grad(chunk, &grad);
      if (!std::isfinite(loss)) {
        char msg[96];
        std::snprintf(msg, sizeof(msg),
                      "training loss is not finite at step %d", step + 1);
        throw numeric_error(msg);
      }
      adam_step(&net.theta(), grad, &adam);
      if (drv.track_ema) ema_update(&ema, net.theta());
      ++step;

      double val = std::numeric_limits<double>::quiet_NaN();
      just_validated = (step % cfg.validation_every == 0);
      if (just_validated) val = run_validation();
      result.log.push_back({step, epoch, stage_name(cfg.stage), loss, val,
                            drv.track_ema ? l2_distance(net.theta(), ema.shadow)
                                          : 0.0});
    }
  }
  if (!just_validated) run_validation();

  Checkpoint& ck = result.checkpoint;
  ck.stage = stage_name(cfg.stage);
  ck.net = cfg.net;
  ck.sde = cfg.sde;
  ck.theta = std::move(best_theta);
  ck.adam = std::move(best_adam);
  if (drv.track_ema) {
    ck.ema_shadow = std::move(best_shadow);
    ck.ema_decay = cfg.ema_decay;
  } else {
    ck.ema_decay = 0.0;
  }
  ck.best_val = best_val;
  return result;
}

void write_exact(std::FILE* f, const void* src, std::size_t bytes) {
  if (bytes != 0 && std::fwrite(src, 1, bytes, f) != bytes) {
    throw io_error("checkpoint: write failed");
  }
}

void read_exact(std::FILE* f, void* dst, std::size_t bytes, const char* what) {
  if (bytes != 0 && std::fread(dst, 1, bytes, f) != bytes) {
    throw io_error(std::string("checkpoint: truncated ") + what);
  }
}

struct FileHandle {
  std::FILE* f = nullptr;
  explicit FileHandle(std::FILE* fp) : f(fp) {}
  ~FileHandle() {
    if (f != nullptr) std::fclose(f);
  }
  FileHandle(const FileHandle&) = delete;
  FileHandle& operator=(const FileHandle&) = delete;
};

}  // namespace

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::kDsm:
      return "dsm";
    case Stage::kCrp:
      return "crp";
    case Stage::kPredictive:
      return "predictive";
  }
  throw usage_error("stage_name: invalid stage value");
}

Stage stage_from_name(const std::string& name) {
  if (name == "dsm") return Stage::kDsm;
  if (name == "crp") return Stage::kCrp;
  if (name == "predictive") return Stage::kPredictive;
  throw config_error("unknown stage name: " + name);
}

std::vector<TrainPair> make_train_pairs(const std::vector<GeneratedPair>& raw,
                                        const StftMeta& meta,
                                        const Compression& compression) {
  std::vector<TrainPair> out;
  out.reserve(raw.size());
  for (const GeneratedPair& p : raw) {
    TrainPair tp;
    tp.x0 = compress(stft(p.clean, meta.window_length, meta.hop),
                     compression.alpha, compression.beta, meta);
    tp.y = compress(stft(p.noisy, meta.window_length, meta.hop),
                    compression.alpha, compression.beta, meta);
    out.push_back(std::move(tp));
  }
  return out;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw config_error("batch_size must be >= 1");
  if (epochs < 1) throw config_error("epochs must be >= 1");
  if (!std::isfinite(lr) || lr < 0.0) {
    throw config_error("lr must be finite and >= 0");
  }
  if (!std::isfinite(weight_decay) || weight_decay < 0.0) {
    throw config_error("weight_decay must be finite and >= 0");
  }
  if (!(ema_decay >= 0.0 && ema_decay < 1.0)) {
    throw config_error("ema_decay must lie in [0, 1)");
  }
  if (validation_every < 1) throw config_error("validation_every must be >= 1");
  if (validation_pairs < 1) throw config_error("validation_pairs must be >= 1");
  net.validate();
  sde.validate();
  if (stage == Stage::kCrp) crp_schedule.validate();
}

const std::vector<double>& Checkpoint::eval_params() const {
  return ema_shadow.empty() ? theta : ema_shadow;
}

// Layout: 8-byte magic, little-endian u32 JSON header length, the header, then
// raw doubles in order theta, adam.m, adam.v, ema shadow.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  if (ckpt.theta.empty()) {
    throw usage_error("save_checkpoint: empty parameter vector");
  }
  if (ckpt.adam.m.size() != ckpt.theta.size() ||
      ckpt.adam.v.size() != ckpt.theta.size()) {
    throw usage_error("save_checkpoint: adam state size mismatch");
  }
  if (!ckpt.ema_shadow.empty() && ckpt.ema_shadow.size() != ckpt.theta.size()) {
    throw usage_error("save_checkpoint: ema shadow size mismatch");
  }
  stage_from_name(ckpt.stage);

  nlohmann::json h;
  h["schema_version"] = 1;
  h["stage"] = ckpt.stage;
  h["net"] = {{"hidden_width", ckpt.net.hidden_width},
              {"hidden_layers", ckpt.net.hidden_layers},
              {"time_embed_dim", ckpt.net.time_embed_dim},
              {"time_conditioned", ckpt.net.time_conditioned}};
  h["sde"] = {{"c", ckpt.sde.c},
              {"k", ckpt.sde.k},
              {"T", ckpt.sde.T},
              {"t_eps", ckpt.sde.t_eps},
              {"t_rsp", ckpt.sde.t_rsp}};
  h["stft"] = {{"window_length", ckpt.stft.window_length},
               {"hop", ckpt.stft.hop},
               {"sample_rate", ckpt.stft.sample_rate}};
  h["compression"] = {{"alpha", ckpt.comp.alpha}, {"beta", ckpt.comp.beta}};
  h["adam"] = {{"step", ckpt.adam.step},
               {"lr", ckpt.adam.lr},
               {"weight_decay", ckpt.adam.weight_decay},
               {"beta1", ckpt.adam.beta1},
               {"beta2", ckpt.adam.beta2},
               {"eps_adam", ckpt.adam.eps_adam}};
  h["ema_decay"] = ckpt.ema_decay;
  h["theta_len"] = ckpt.theta.size();
  h["ema_len"] = ckpt.ema_shadow.size();
  h["schedule"] = ckpt.schedule.times;
  h["schedule_hash"] = ckpt.schedule_hash;
  h["best_val"] = ckpt.best_val;
  const std::string header = h.dump();

  FileHandle fh(std::fopen(path.c_str(), "wb"));
  if (fh.f == nullptr) {
    throw io_error("save_checkpoint: cannot open " + path);
  }
  write_exact(fh.f, kCheckpointMagic, sizeof(kCheckpointMagic));
  const std::uint32_t len = static_cast<std::uint32_t>(header.size());
  write_exact(fh.f, &len, sizeof(len));
  write_exact(fh.f, header.data(), header.size());
  write_exact(fh.f, ckpt.theta.data(), ckpt.theta.size() * sizeof(double));
  write_exact(fh.f, ckpt.adam.m.data(), ckpt.adam.m.size() * sizeof(double));
  write_exact(fh.f, ckpt.adam.v.data(), ckpt.adam.v.size() * sizeof(double));
  write_exact(fh.f, ckpt.ema_shadow.data(),
              ckpt.ema_shadow.size() * sizeof(double));
  if (std::fflush(fh.f) != 0) {
    throw io_error("save_checkpoint: write failed");
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  FileHandle fh(std::fopen(path.c_str(), "rb"));
  if (fh.f == nullptr) {
    throw io_error("load_checkpoint: cannot open " + path);
  }
  char magic[8];
  read_exact(fh.f, magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw io_error("load_checkpoint: not a checkpoint file: " + path);
  }
  std::uint32_t len = 0;
  read_exact(fh.f, &len, sizeof(len), "header length");
  if (len == 0 || len > (1u << 24)) {
    throw io_error("load_checkpoint: implausible header length");
  }
  std::string header(len, '\0');
  read_exact(fh.f, header.data(), len, "header");
  const nlohmann::json h = nlohmann::json::parse(header, nullptr, false);
  if (h.is_discarded()) {
    throw io_error("load_checkpoint: malformed header json");
  }

  Checkpoint ck;
  std::size_t theta_len = 0;
  std::size_t ema_len = 0;
  try {
    if (h.at("schema_version").get<int>() != 1) {
      throw io_error("load_checkpoint: unsupported schema version");
    }
    ck.stage = h.at("stage").get<std::string>();
    const auto& n = h.at("net");
    ck.net.hidden_width = n.at("hidden_width").get<int>();
    ck.net.hidden_layers = n.at("hidden_layers").get<int>();
    ck.net.time_embed_dim = n.at("time_embed_dim").get<int>();
    ck.net.time_conditioned = n.at("time_conditioned").get<bool>();
    const auto& s = h.at("sde");
    ck.sde.c = s.at("c").get<double>();
    ck.sde.k = s.at("k").get<double>();
    ck.sde.T = s.at("T").get<double>();
    ck.sde.t_eps = s.at("t_eps").get<double>();
    ck.sde.t_rsp = s.at("t_rsp").get<double>();
    const auto& w = h.at("stft");
    ck.stft.window_length = w.at("window_length").get<int>();
    ck.stft.hop = w.at("hop").get<int>();
    ck.stft.sample_rate = w.at("sample_rate").get<int>();
    const auto& cm = h.at("compression");
    ck.comp.alpha = cm.at("alpha").get<double>();
    ck.comp.beta = cm.at("beta").get<double>();
    const auto& a = h.at("adam");
    ck.adam.step = a.at("step").get<std::int64_t>();
    ck.adam.lr = a.at("lr").get<double>();
    ck.adam.weight_decay = a.at("weight_decay").get<double>();
    ck.adam.beta1 = a.at("beta1").get<double>();
    ck.adam.beta2 = a.at("beta2").get<double>();
    ck.adam.eps_adam = a.at("eps_adam").get<double>();
    ck.ema_decay = h.at("ema_decay").get<double>();
    theta_len = h.at("theta_len").get<std::size_t>();
    ema_len = h.at("ema_len").get<std::size_t>();
    ck.schedule.times = h.at("schedule").get<std::vector<double>>();
    ck.schedule_hash = h.at("schedule_hash").get<std::uint64_t>();
    ck.best_val = h.at("best_val").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("load_checkpoint: bad header field: ") +
                   e.what());
  }

  if (ck.stage != "dsm" && ck.stage != "crp" && ck.stage != "predictive") {
    throw io_error("load_checkpoint: unknown stage tag: " + ck.stage);
  }
  ck.net.validate();
  ck.sde.validate();
  Rng probe_rng(0);
  const ScoreNetwork probe(ck.net, &probe_rng);
  if (theta_len != probe.param_count()) {
    throw io_error("load_checkpoint: parameter count does not match layout");
  }
  if (ema_len != 0 && ema_len != theta_len) {
    throw io_error("load_checkpoint: ema shadow length mismatch");
  }
  if (ck.stage == "crp") {
    ck.schedule.validate();
    if (ck.schedule_hash != ck.schedule.hash()) {
      throw io_error("load_checkpoint: schedule hash mismatch");
    }
  }

  ck.theta.resize(theta_len);
  ck.adam.m.resize(theta_len);
  ck.adam.v.resize(theta_len);
  ck.ema_shadow.resize(ema_len);
  read_exact(fh.f, ck.theta.data(), theta_len * sizeof(double), "theta");
  read_exact(fh.f, ck.adam.m.data(), theta_len * sizeof(double), "adam m");
  read_exact(fh.f, ck.adam.v.data(), theta_len * sizeof(double), "adam v");
  read_exact(fh.f, ck.ema_shadow.data(), ema_len * sizeof(double),
             "ema shadow");
  if (std::fgetc(fh.f) != EOF) {
    throw io_error("load_checkpoint: trailing bytes after payload");
  }
  for (double v : ck.theta) {
    if (!std::isfinite(v)) {
      throw io_error("load_checkpoint: non-finite parameter value");
    }
  }
  return ck;
}

void write_training_log(const std::vector<TrainLogRow>& rows,
                        const std::string& path) {
  FileHandle fh(std::fopen(path.c_str(), "w"));
  if (fh.f == nullptr) {
    throw io_error("write_training_log: cannot open " + path);
  }
  std::fprintf(fh.f, "step,epoch,stage,loss,val_metric,ema_gap\n");
  for (const TrainLogRow& r : rows) {
    if (std::isnan(r.val_metric)) {
      std::fprintf(fh.f, "%d,%d,%s,%.17g,,%.17g\n", r.step, r.epoch,
                   r.stage.c_str(), r.loss, r.ema_gap);
    } else {
      std::fprintf(fh.f, "%d,%d,%s,%.17g,%.17g,%.17g\n", r.step, r.epoch,
                   r.stage.c_str(), r.loss, r.val_metric, r.ema_gap);
    }
  }
}

NodeId dsm_loss(const ScoreNetwork& net, const Sde& sde,
                const CompressedSpec& x0, const CompressedSpec& y, double t,
                Rng* rng, Tape* tape, double scale) {
  if (rng == nullptr || tape == nullptr) {
    throw usage_error("dsm_loss: rng and tape required");
  }
  if (!x0.grid.same_shape(y.grid)) {
    throw shape_error("dsm_loss: clean/mixture shapes differ");
  }
  if (!(t > 0.0) || t > sde.max_time()) {
    throw domain_error("dsm_loss: t outside (0, max_time]");
  }
  DsmTile tile = dsm_tile(net, sde, {x0, y}, t, rng);
  const NodeId out = net.forward_tape(tape, std::move(tile.input));
  const NodeId resid = tape->axpb(out, 1.0, std::move(tile.residual_bias));
  return tape->sumsq_scaled(resid, scale);
}

TrainResult train_dsm(const std::vector<TrainPair>& data,
                      const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.stage != Stage::kDsm) {
    throw usage_error("train_dsm: config stage is not dsm");
  }
  if (!cfg.net.time_conditioned) {
    throw config_error("train_dsm: requires a time-conditioned network");
  }
  check_pairs(data, "train_dsm", cfg.validation_pairs);

  const Rng root(cfg.seed);
  Rng init_rng = root.stream(0);
  Rng order_rng = root.stream(1);
  Rng noise_rng = root.stream(2);
  ScoreNetwork net(cfg.net, &init_rng);
  const BbedSde sde(cfg.sde);
  const std::size_t train_count = data.size() - cfg.validation_pairs;
  const std::size_t tile_rows = data.front().x0.size();
  const int channels = net.input_channels();

  StageDriver drv;
  drv.cfg = &cfg;
  drv.net = &net;
  drv.train_count = train_count;
  drv.order_rng = &order_rng;
  drv.track_ema = true;
  drv.batch_grad = [&](const std::vector<std::size_t>& chunk,
                       std::vector<double>* grad) {
    Mat input(tile_rows * chunk.size(), static_cast<std::size_t>(channels));
    Mat bias(tile_rows * chunk.size(), 2);
    for (std::size_t b = 0; b < chunk.size(); ++b) {
      const double t = noise_rng.uniform(cfg.sde.t_eps, cfg.sde.T);
      DsmTile tile = dsm_tile(net, sde, data[chunk[b]], t, &noise_rng);
      std::copy(tile.input.data.begin(), tile.input.data.end(),
                input.data.begin() + b * tile.input.size());
      std::copy(tile.residual_bias.data.begin(), tile.residual_bias.data.end(),
                bias.data.begin() + b * tile.residual_bias.size());
    }
    Tape tape(&net.theta());
    const NodeId out = net.forward_tape(&tape, std::move(input));
    const NodeId resid = tape.axpb(out, 1.0, std::move(bias));
    const NodeId loss =
        tape.sumsq_scaled(resid, 1.0 / static_cast<double>(chunk.size()));
    tape.backward(loss, grad);
    return tape.scalar_value(loss);
  };
  // Held-out denoising loss with fixed draws so passes are comparable.
  drv.validate = [&](const std::vector<double>& params) {
    Rng vr = root.stream(3);
    double total = 0.0;
    for (std::size_t i = train_count; i < data.size(); ++i) {
      const double t = vr.uniform(cfg.sde.t_eps, cfg.sde.T);
      DsmTile tile = dsm_tile(net, sde, data[i], t, &vr);
      Mat out;
      net.forward_raw(params, tile.input, &out);
      for (std::size_t j = 0; j < out.data.size(); ++j) {
        const double r = out.data[j] + tile.residual_bias.data[j];
        total += r * r;
      }
    }
    return total / static_cast<double>(cfg.validation_pairs);
  };
  TrainResult result = run_stage(drv);
  result.checkpoint.stft = data.front().x0.meta;
  result.checkpoint.comp = data.front().x0.compression;
  return result;
}

CrpRollout crp_rollout(const CompressedSpec& x0, const CompressedSpec& y,
                       const ScoreNetwork& net, const Schedule& sched,
                       const BbedSde& sde, NoiseStream* noise, bool stochastic,
                       Tape* tape) {
  if (noise == nullptr || tape == nullptr) {
    throw usage_error("crp_rollout: noise stream and tape required");
  }
  if (!x0.grid.same_shape(y.grid)) {
    throw shape_error("crp_rollout: clean/mixture shapes differ");
  }
  sched.validate();
  if (sched.times.front() > sde.max_time()) {
    throw config_error("crp_rollout: schedule starts beyond the horizon");
  }

  // The starting point is always a prior draw; `stochastic` gates only the
  // Euler noise injections.
  CompressedSpec x = y;
  const double sigma_start = sde.kernel_sigma(sched.times.front());
  for (auto& v : x.grid.values) v += sigma_start * noise->next();

  const ScoreFn score = network_score(&net);
  const int n = sched.n_steps();
  EmStepOptions opts;
  for (int i = 0; i + 1 < n; ++i) {
    opts.add_noise = stochastic;
    x = em_step(sde, x, y, sched.times[i], sched.times[i + 1], score, noise,
                opts);
  }
  opts.add_noise = false;
  const NodeId node = em_step_taped(sde, x, y, sched.times[n - 1],
                                    sched.times[n], net, tape, noise, opts);

  CrpRollout roll;
  roll.estimate_node = node;
  roll.score_calls = n;
  roll.taped_score_calls = 1;
  ScoreNetwork::unpack_output(tape->value(node), y, &roll.estimate);
  return roll;
}

double crp_loss(const CompressedSpec& x_tilde0, const CompressedSpec& x0) {
  if (!x_tilde0.grid.same_shape(x0.grid)) {
    throw shape_error("crp_loss: estimate/clean shapes differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    const std::complex<double> d =
        x_tilde0.grid.values[i] - x0.grid.values[i];
    s += d.real() * d.real() + d.imag() * d.imag();
  }
  return s;
}

NodeId crp_loss_node(Tape* tape, NodeId estimate_node,
                     const CompressedSpec& x0, double scale) {
  if (tape == nullptr) throw usage_error("crp_loss_node: tape required");
  const Mat& est = tape->value(estimate_node);
  if (est.rows != x0.size() || est.cols != 2) {
    throw shape_error("crp_loss_node: estimate/clean shapes differ");
  }
  Mat minus_x0(est.rows, 2);
  for (std::size_t i = 0; i < x0.size(); ++i) {
    minus_x0.at(i, 0) = -x0.grid.values[i].real();
    minus_x0.at(i, 1) = -x0.grid.values[i].imag();
  }
  const NodeId resid = tape->axpb(estimate_node, 1.0, std::move(minus_x0));
  return tape->sumsq_scaled(resid, scale);
}

TrainResult train_crp(const std::vector<TrainPair>& data,
                      const TrainConfig& cfg, const Checkpoint& stage1) {
  cfg.validate();
  if (cfg.stage != Stage::kCrp) {
    throw usage_error("train_crp: config stage is not crp");
  }
  if (stage1.stage != "dsm") {
    throw usage_error("train_crp: stage-1 (dsm) checkpoint required");
  }
  if (!stage1.net.time_conditioned) {
    throw usage_error("train_crp: stage-1 checkpoint is not time-conditioned");
  }
  check_pairs(data, "train_crp", cfg.validation_pairs);

  const Rng root(cfg.seed);
  Rng init_rng = root.stream(0);
  Rng order_rng = root.stream(1);
  Rng noise_rng = root.stream(2);
  ScoreNetwork net(stage1.net, &init_rng);
  if (stage1.theta.size() != net.param_count()) {
    throw usage_error("train_crp: stage-1 parameter count mismatch");
  }
  // Fine-tuning starts from the stage-1 evaluation weights (the EMA shadow
  // when tracked); Adam and the EMA restart fresh.
  net.theta() = stage1.eval_params();
  const BbedSde sde(stage1.sde);
  const std::size_t train_count = data.size() - cfg.validation_pairs;

  StageDriver drv;
  drv.cfg = &cfg;
  drv.net = &net;
  drv.train_count = train_count;
  drv.order_rng = &order_rng;
  drv.track_ema = true;
  // One rollout per pair; per-pair gradients are summed in index order so the
  // batch gradient is reproducible.
  drv.batch_grad = [&](const std::vector<std::size_t>& chunk,
                       std::vector<double>* grad) {
    grad->assign(net.param_count(), 0.0);
    std::vector<double> pair_grad;
    const double scale = 1.0 / static_cast<double>(chunk.size());
    double loss_sum = 0.0;
    for (std::size_t idx : chunk) {
      Tape tape(&net.theta());
      NoiseStream stream(&noise_rng);
      const CrpRollout roll =
          crp_rollout(data[idx].x0, data[idx].y, net, cfg.crp_schedule, sde,
                      &stream, cfg.crp_stochastic_rollout, &tape);
      const NodeId loss =
          crp_loss_node(&tape, roll.estimate_node, data[idx].x0, scale);
      loss_sum += tape.scalar_value(loss);
      tape.backward(loss, &pair_grad);
      for (std::size_t k = 0; k < pair_grad.size(); ++k) {
        (*grad)[k] += pair_grad[k];
      }
    }
    return loss_sum;
  };
  // Held-out per-entry squared error of full rollouts at the same step count
  // the stage is being tuned for.
  drv.validate = [&](const std::vector<double>& params) {
    Rng vr = root.stream(3);
    const ScoreFn score = network_score_with(&net, &params);
    SolveOptions sopt;
    double total = 0.0;
    for (std::size_t i = train_count; i < data.size(); ++i) {
      const ReverseResult r =
          solve_reverse(sde, data[i].y, score, cfg.crp_schedule, &vr, sopt);
      total += crp_loss(r.estimate, data[i].x0) /
               static_cast<double>(data[i].x0.size());
    }
    return total / static_cast<double>(cfg.validation_pairs);
  };

  TrainResult result = run_stage(drv);
  result.checkpoint.sde = stage1.sde;
  result.checkpoint.net = stage1.net;
  result.checkpoint.stft = data.front().x0.meta;
  result.checkpoint.comp = data.front().x0.compression;
  result.checkpoint.schedule = cfg.crp_schedule;
  result.checkpoint.schedule_hash = cfg.crp_schedule.hash();
  return result;
}

TrainResult train_predictive(const std::vector<TrainPair>& data,
                             const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.stage != Stage::kPredictive) {
    throw usage_error("train_predictive: config stage is not predictive");
  }
  if (cfg.net.time_conditioned) {
    throw config_error("train_predictive: requires time_conditioned = false");
  }
  check_pairs(data, "train_predictive", cfg.validation_pairs);

  const Rng root(cfg.seed);
  Rng init_rng = root.stream(0);
  Rng order_rng = root.stream(1);
  ScoreNetwork net(cfg.net, &init_rng);
  const std::size_t train_count = data.size() - cfg.validation_pairs;
  const std::size_t tile_rows = data.front().x0.size();
  const int channels = net.input_channels();

  auto fill_tile = [&](const TrainPair& p, Mat* input, Mat* bias,
                       std::size_t block) {
    const Mat in = net.assemble_input(p.y, p.y, 0.0);
    std::copy(in.data.begin(), in.data.end(),
              input->data.begin() + block * in.size());
    for (std::size_t i = 0; i < p.x0.size(); ++i) {
      bias->data[(block * tile_rows + i) * 2 + 0] = -p.x0.grid.values[i].real();
      bias->data[(block * tile_rows + i) * 2 + 1] = -p.x0.grid.values[i].imag();
    }
  };

  StageDriver drv;
  drv.cfg = &cfg;
  drv.net = &net;
  drv.train_count = train_count;
  drv.order_rng = &order_rng;
  drv.track_ema = false;
  drv.batch_grad = [&](const std::vector<std::size_t>& chunk,
                       std::vector<double>* grad) {
    Mat input(tile_rows * chunk.size(), static_cast<std::size_t>(channels));
    Mat bias(tile_rows * chunk.size(), 2);
    for (std::size_t b = 0; b < chunk.size(); ++b) {
      fill_tile(data[chunk[b]], &input, &bias, b);
    }
    Tape tape(&net.theta());
    const NodeId out = net.forward_tape(&tape, std::move(input));
    const NodeId resid = tape.axpb(out, 1.0, std::move(bias));
    const NodeId loss =
        tape.sumsq_scaled(resid, 1.0 / static_cast<double>(chunk.size()));
    tape.backward(loss, grad);
    return tape.scalar_value(loss);
  };
  drv.validate = [&](const std::vector<double>& params) {
    double total = 0.0;
    for (std::size_t i = train_count; i < data.size(); ++i) {
      const Mat in = net.assemble_input(data[i].y, data[i].y, 0.0);
      Mat out;
      net.forward_raw(params, in, &out);
      double s = 0.0;
      for (std::size_t j = 0; j < tile_rows; ++j) {
        const double dr = out.at(j, 0) - data[i].x0.grid.values[j].real();
        const double di = out.at(j, 1) - data[i].x0.grid.values[j].imag();
        s += dr * dr + di * di;
      }
      total += s / static_cast<double>(tile_rows);
    }
    return total / static_cast<double>(cfg.validation_pairs);
  };
  TrainResult result = run_stage(drv);
  result.checkpoint.stft = data.front().x0.meta;
  result.checkpoint.comp = data.front().x0.compression;
  return result;
}

void GaussianToyTask::validate() const {
  if (mean.empty() || mean.size() != y.size()) {
    throw config_error("toy task: mean and y must be nonempty, equal length");
  }
  if (!std::isfinite(gamma) || gamma <= 0.0) {
    throw config_error("toy task: gamma must be positive");
  }
  if (frames < 1 || mean.size() % frames != 0) {
    throw config_error("toy task: frames must evenly divide the entry count");
  }
}

namespace {
CompressedSpec real_spec(const std::vector<double>& values,
                         std::size_t frames) {
  CompressedSpec spec;
  spec.grid = ComplexGrid(frames, values.size() / frames);
  for (std::size_t i = 0; i < values.size(); ++i) {
    spec.grid.values[i] = {values[i], 0.0};
  }
  return spec;
}
}  // namespace

CompressedSpec GaussianToyTask::mean_spec() const {
  validate();
  return real_spec(mean, frames);
}

CompressedSpec GaussianToyTask::y_spec() const {
  validate();
  return real_spec(y, frames);
}

std::vector<TrainPair> sample_toy_pairs(const GaussianToyTask& task, int count,
                                        Rng* rng) {
  task.validate();
  if (count < 1) throw config_error("sample_toy_pairs: count must be >= 1");
  if (rng == nullptr) throw usage_error("sample_toy_pairs: rng required");
  const CompressedSpec ys = task.y_spec();
  std::vector<TrainPair> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    TrainPair p;
    p.x0 = task.mean_spec();
    for (auto& v : p.x0.grid.values) v += task.gamma * rng->cnormal();
    p.y = ys;
    out.push_back(std::move(p));
  }
  return out;
}

CompressedSpec analytic_score(const GaussianToyTask& task,
                              const CompressedSpec& xt, double t,
                              const BbedSde& sde) {
  task.validate();
  if (xt.size() != task.mean.size()) {
    throw shape_error("analytic_score: state size does not match the task");
  }
  if (t < 0.0 || t > sde.max_time()) {
    throw domain_error("analytic_score: t outside [0, max_time]");
  }
  const double var = (1.0 - t) * (1.0 - t) * task.gamma * task.gamma +
                     sde.kernel_sigma_sq(t);
  CompressedSpec score = xt;
  for (std::size_t i = 0; i < xt.size(); ++i) {
    const std::complex<double> marg_mean = {
        (1.0 - t) * task.mean[i] + t * task.y[i], 0.0};
    score.grid.values[i] = -(xt.grid.values[i] - marg_mean) / var;
  }
  return score;
}

double toy_score_error(const GaussianToyTask& task, const ScoreNetwork& net,
                       const std::vector<double>& params, const BbedSde& sde,
                       int samples, Rng* rng) {
  task.validate();
  if (samples < 1) throw config_error("toy_score_error: samples must be >= 1");
  if (rng == nullptr) throw usage_error("toy_score_error: rng required");
  const CompressedSpec ys = task.y_spec();
  const BbedParams& p = sde.params();
  double total = 0.0;
  for (int i = 0; i < samples; ++i) {
    CompressedSpec x0 = task.mean_spec();
    for (auto& v : x0.grid.values) v += task.gamma * rng->cnormal();
    const double t = rng->uniform(p.t_eps, p.T);
    CompressedSpec xt, z;
    sample_forward(sde, x0, ys, t, rng, &xt, &z);
    CompressedSpec s_net;
    net.forward_with(params, xt, ys, t, &s_net);
    const CompressedSpec s_exact = analytic_score(task, xt, t, sde);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < xt.size(); ++j) {
      const std::complex<double> d =
          s_net.grid.values[j] - s_exact.grid.values[j];
      num += d.real() * d.real() + d.imag() * d.imag();
      den += std::norm(s_exact.grid.values[j]);
    }
    total += std::sqrt(num) / std::sqrt(std::max(den, 1e-300));
  }
  return total / static_cast<double>(samples);
}

}  // namespace crpkit
