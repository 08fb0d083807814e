// src/metrics.cpp

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

#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <utility>

#include "json.hpp"
#include "network.hpp"
#include "sde.hpp"

namespace crpkit {

double si_sdr(const TimeSignal& reference, const TimeSignal& estimate) {
  if (reference.samples.size() != estimate.samples.size()) {
    throw shape_error("si_sdr: reference/estimate lengths differ");
  }
  double ref_energy = 0.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < reference.samples.size(); ++i) {
    ref_energy += reference.samples[i] * reference.samples[i];
    dot += estimate.samples[i] * reference.samples[i];
  }
  if (ref_energy <= 0.0) {
    throw domain_error("si_sdr: reference signal has zero energy");
  }
  const double alpha = dot / ref_energy;
  const double target_energy = alpha * alpha * ref_energy;
  double error_energy = 0.0;
  for (std::size_t i = 0; i < reference.samples.size(); ++i) {
    const double e = alpha * reference.samples[i] - estimate.samples[i];
    error_energy += e * e;
  }
  if (target_energy <= 0.0) return -100.0;
  if (error_energy <= 0.0) return 100.0;
  const double db = 10.0 * std::log10(target_energy / error_energy);
  return std::clamp(db, -100.0, 100.0);
}

double compressed_mse(const CompressedSpec& a, const CompressedSpec& b) {
  if (!a.grid.same_shape(b.grid) ||
      a.compression.alpha != b.compression.alpha ||
      a.compression.beta != b.compression.beta) {
    throw shape_error("compressed_mse: shape or compression mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total += std::norm(a.grid.values[i] - b.grid.values[i]);
  }
  return total / static_cast<double>(a.size());
}

std::vector<EvalRecord> evaluate_method(
    const Checkpoint& ckpt, const std::vector<TrainPair>& test_pairs,
    const Schedule& sched, const EvalOptions& opts,
    const std::vector<std::uint64_t>& seeds) {
  if (test_pairs.empty()) {
    throw config_error("evaluate_method: no test pairs");
  }
  if (seeds.empty()) {
    throw config_error("evaluate_method: at least one seed required");
  }
  std::string method;
  if (ckpt.stage == "dsm") {
    method = "baseline_dsm";
  } else if (ckpt.stage == "crp") {
    method = "crp";
  } else if (ckpt.stage == "predictive") {
    method = "predictive";
  } else {
    throw usage_error("evaluate_method: unknown checkpoint stage " +
                      ckpt.stage);
  }
  const bool predictive = (ckpt.stage == "predictive");
  if (!predictive) sched.validate();

  Rng ctor_rng(0);
  ScoreNetwork net(ckpt.net, &ctor_rng);
  if (ckpt.theta.size() != net.param_count()) {
    throw usage_error("evaluate_method: checkpoint parameter count mismatch");
  }
  const std::vector<double> params = ckpt.eval_params();
  const BbedSde sde(ckpt.sde);
  std::string warning;
  if (ckpt.stage == "crp" && ckpt.schedule_hash != sched.hash()) {
    warning = "schedule differs from the checkpoint's tuned schedule";
  }

  auto synthesize = [](const CompressedSpec& spec) {
    return istft(decompress(spec), spec.meta.window_length, spec.meta.hop,
                 spec.meta.sample_rate);
  };

  std::vector<EvalRecord> records;
  records.reserve(seeds.size() * test_pairs.size());
  for (const std::uint64_t seed : seeds) {
    const Rng seed_root(seed);
    for (std::size_t p = 0; p < test_pairs.size(); ++p) {
      const TrainPair& pair = test_pairs[p];
      EvalRecord rec;
      rec.pair_id = static_cast<int>(p);
      rec.method = method;
      rec.seed = seed;
      rec.warning = warning;

      CompressedSpec estimate;
      if (predictive) {
        net.forward_with(params, pair.y, pair.y, 0.0, &estimate);
        rec.nfe = 1;
      } else {
        Rng rng = seed_root.stream(p);
        const ScoreFn score = network_score_with(&net, &params);
        SolveOptions sopt;
        sopt.mode = opts.mode;
        sopt.corrector = opts.corrector;
        const ReverseResult r =
            solve_reverse(sde, pair.y, score, sched, &rng, sopt);
        estimate = r.estimate;
        rec.nfe = r.nfe;
      }
      rec.compressed_mse = compressed_mse(estimate, pair.x0);
      rec.si_sdr_db = si_sdr(synthesize(pair.x0), synthesize(estimate));
      records.push_back(std::move(rec));
    }
  }
  return records;
}

void write_results_csv(const std::vector<EvalRecord>& records,
                       const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) {
    throw io_error("write_results_csv: cannot open " + path);
  }
  std::fprintf(f, "pair_id,method,nfe,si_sdr_db,compressed_mse,seed,warning\n");
  for (const EvalRecord& r : records) {
    std::fprintf(f, "%d,%s,%d,%.17g,%.17g,%llu,%s\n", r.pair_id,
                 r.method.c_str(), r.nfe, r.si_sdr_db, r.compressed_mse,
                 static_cast<unsigned long long>(r.seed), r.warning.c_str());
  }
  std::fclose(f);
}

namespace {
struct Moments {
  std::vector<double> values;
  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
  }
  double stddev() const {
    if (values.size() < 2) return 0.0;
    const double m = mean();
    double s = 0.0;
    for (double v : values) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(values.size() - 1));
  }
};
}  // namespace

namespace {
using GroupMap =
    std::map<std::pair<std::string, int>, std::pair<Moments, Moments>>;

GroupMap group_records(const std::vector<EvalRecord>& records) {
  GroupMap groups;
  for (const EvalRecord& r : records) {
    if (r.pair_id < 0) continue;  // skipped-work marker, not a measurement
    auto& g = groups[{r.method, r.nfe}];
    g.first.values.push_back(r.si_sdr_db);
    g.second.values.push_back(r.compressed_mse);
  }
  return groups;
}
}  // namespace

void write_summary_json(const std::vector<EvalRecord>& records,
                        const std::string& path) {
  const GroupMap groups = group_records(records);
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& [key, g] : groups) {
    summary.push_back(
        {{"method", key.first},
         {"nfe", key.second},
         {"count", g.first.values.size()},
         {"si_sdr_db", {{"mean", g.first.mean()}, {"std", g.first.stddev()}}},
         {"compressed_mse",
          {{"mean", g.second.mean()}, {"std", g.second.stddev()}}}});
  }
  const nlohmann::json doc = {{"schema_version", 1}, {"summary", summary}};

  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) {
    throw io_error("write_summary_json: cannot open " + path);
  }
  const std::string text = doc.dump(2);
  std::fwrite(text.data(), 1, text.size(), f);
  std::fputc('\n', f);
  std::fclose(f);
}

void write_curves_csv(const std::vector<EvalRecord>& records,
                      const std::string& path) {
  const GroupMap groups = group_records(records);
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) {
    throw io_error("write_curves_csv: cannot open " + path);
  }
  std::fprintf(f,
               "method,nfe,count,si_sdr_db_mean,si_sdr_db_std,"
               "compressed_mse_mean,compressed_mse_std\n");
  for (const auto& [key, g] : groups) {
    std::fprintf(f, "%s,%d,%zu,%.17g,%.17g,%.17g,%.17g\n", key.first.c_str(),
                 key.second, g.first.values.size(), g.first.mean(),
                 g.first.stddev(), g.second.mean(), g.second.stddev());
  }
  std::fclose(f);
}

}  // namespace crpkit
