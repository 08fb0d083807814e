// tests/unit_tape_network.cpp

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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "errors.hpp"
#include "network.hpp"
#include "oracles/fd_check.hpp"
#include "rng.hpp"
#include "tape.hpp"

namespace {

using crpkit::CompressedSpec;
using crpkit::Mat;
using crpkit::NetConfig;
using crpkit::NodeId;
using crpkit::Rng;
using crpkit::ScoreNetwork;
using crpkit::Tape;

CompressedSpec random_spec(std::size_t frames, std::size_t bins, Rng* rng,
                           double scale = 1.0) {
  CompressedSpec spec;
  spec.grid = crpkit::ComplexGrid(frames, bins);
  for (auto& v : spec.grid.values) {
    v = {scale * rng->uniform(-1.0, 1.0), scale * rng->uniform(-1.0, 1.0)};
  }
  return spec;
}

// Overwrites every parameter, including the zero-initialized output layer,
// so gradients reach all slices during derivative checks.
void randomize_theta(ScoreNetwork* net, Rng* rng) {
  for (const auto& layer : net->layers()) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layer.in_dim + layer.out_dim));
    for (std::size_t i = 0; i < layer.in_dim * layer.out_dim; ++i) {
      net->theta()[layer.w_offset + i] = rng->uniform(-limit, limit);
    }
    for (std::size_t i = 0; i < layer.out_dim; ++i) {
      net->theta()[layer.b_offset + i] = rng->uniform(-0.1, 0.1);
    }
  }
}

// scale * sum of squared entries of (out - target), evaluated through the
// independent plain-loop forward pass at the caller's precision.
auto quadratic_loss(const ScoreNetwork& net, const Mat& input,
                    const Mat& target, double scale) {
  auto layers = net.layers();
  auto in = input.data;
  auto tgt = target.data;
  const std::size_t rows = input.rows;
  return [layers, in, tgt, rows, scale](const auto& params) {
    using T = typename std::decay_t<decltype(params)>::value_type;
    auto out = crpkit_oracle::mlp_forward(layers, params, in, rows);
    T acc = T(0);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const T d = out[i] - T(tgt[i]);
      acc += d * d;
    }
    return T(scale) * acc;
  };
}

}  // namespace

TEST_CASE("tape affine and loss nodes match hand-computed values") {
  // theta = [W row-major, b] for a 2 -> 2 affine map.
  std::vector<double> theta = {1.0, -2.0, 0.5, 3.0, 0.25, -1.0};
  Tape tape(&theta);
  Mat x(2, 2);
  x.at(0, 0) = 1.0;
  x.at(0, 1) = 2.0;
  x.at(1, 0) = -0.5;
  x.at(1, 1) = 0.0;
  NodeId xi = tape.constant(x);
  NodeId y = tape.affine(xi, 0, 4, 2, 2);

  // Row 0: (1*1 + 2*0.5, 1*(-2) + 2*3) + b = (2.25, 3.0).
  // Row 1: (-0.5, 1.0) + b = (-0.25, 0.0).
  CHECK(tape.value(y).at(0, 0) == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(tape.value(y).at(0, 1) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(tape.value(y).at(1, 0) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(tape.value(y).at(1, 1) == doctest::Approx(0.0).epsilon(1e-15));

  Mat shift(2, 2);
  shift.data = {1.0, 1.0, 1.0, 1.0};
  NodeId z = tape.axpb(y, 2.0, shift);
  CHECK(tape.value(z).at(0, 0) == doctest::Approx(5.5).epsilon(1e-15));

  NodeId loss = tape.sumsq_scaled(z, 0.5);
  const double expect = 0.5 * (5.5 * 5.5 + 7.0 * 7.0 + 0.5 * 0.5 + 1.0 * 1.0);
  CHECK(tape.scalar_value(loss) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("tape backward reproduces the hand-derived affine gradient") {
  std::vector<double> theta = {0.8, -0.3, 1.2, 0.4, -0.7, 0.05, -0.2, 0.6,
                               0.1, -0.4, 0.9, 0.15};
  const std::size_t in_dim = 2, out_dim = 4;  // W at 0 (8 entries), b at 8.
  Tape tape(&theta);
  Mat x(3, 2);
  Rng rng(11);
  for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
  NodeId y = tape.affine(tape.constant(x), 0, 8, in_dim, out_dim);
  NodeId loss = tape.sumsq_scaled(y, 0.25);

  std::vector<double> grad;
  tape.backward(loss, &grad);
  REQUIRE(grad.size() == theta.size());

  // dY = 2 * 0.25 * Y, dW = X^T dY, db = column sums of dY.
  const Mat& yv = tape.value(y);
  std::vector<double> expect(theta.size(), 0.0);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < out_dim; ++c) {
      const double dy = 0.5 * yv.at(r, c);
      for (std::size_t i = 0; i < in_dim; ++i) {
        expect[i * out_dim + c] += x.at(r, i) * dy;
      }
      expect[8 + c] += dy;
    }
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    CHECK(grad[i] == doctest::Approx(expect[i]).epsilon(1e-13));
  }
}

TEST_CASE("identity probe: gradient of half the squared bias equals theta") {
  // Zero weights, zero input: the affine output is the bias itself, so
  // 0.5 * sum(out^2) differentiates back to theta coordinate by coordinate.
  const std::size_t n = 5;
  std::vector<double> theta(n * n + n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    theta[n * n + i] = 0.3 * static_cast<double>(i + 1);
  }
  Tape tape(&theta);
  NodeId out = tape.affine(tape.constant(Mat(1, n)), 0, n * n, n, n);
  NodeId loss = tape.sumsq_scaled(out, 0.5);
  std::vector<double> grad;
  tape.backward(loss, &grad);
  REQUIRE(grad.size() == theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) CHECK(grad[i] == theta[i]);
}

TEST_CASE("losses built from constants have zero gradient") {
  std::vector<double> theta = {1.0, 2.0, 3.0};
  Tape tape(&theta);
  Mat m(2, 3);
  Rng rng(7);
  for (auto& v : m.data) v = rng.uniform(-2.0, 2.0);
  NodeId c = tape.constant(m);
  NodeId shifted = tape.axpb(c, -1.5, Mat(2, 3));
  NodeId loss = tape.sumsq_scaled(shifted, 1.0);
  CHECK(tape.scalar_value(loss) > 0.0);
  std::vector<double> grad;
  tape.backward(loss, &grad);
  REQUIRE(grad.size() == theta.size());
  for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("tape misuse is rejected") {
  std::vector<double> theta(4, 0.0);
  Tape tape(&theta);
  std::vector<double> grad;
  CHECK_THROWS_AS(tape.backward(0, &grad), crpkit::usage_error);

  Mat m(2, 2);
  NodeId c = tape.constant(m);
  CHECK_THROWS_AS(tape.backward(c, &grad), crpkit::usage_error);  // not scalar
  CHECK_THROWS_AS(tape.affine(c, 0, 3, 2, 2), crpkit::shape_error);
  CHECK_THROWS_AS(tape.axpb(c, 1.0, Mat(3, 2)), crpkit::shape_error);
  CHECK_THROWS_AS(tape.backward_from(c, Mat(1, 1), &grad),
                  crpkit::shape_error);
  CHECK_THROWS_AS(tape.value(99), crpkit::usage_error);
}

TEST_CASE("gelu matches its limits and centre slope") {
  Mat x(1, 3);
  x.data = {-20.0, 0.0, 20.0};
  Mat out;
  crpkit::gelu_forward(x, &out);
  CHECK(std::abs(out.data[0]) < 1e-12);
  CHECK(out.data[1] == 0.0);
  CHECK(out.data[2] == doctest::Approx(20.0).epsilon(1e-12));

  Mat dy(1, 3);
  dy.data = {1.0, 1.0, 1.0};
  Mat dx(1, 3);
  dx.set_zero();
  crpkit::gelu_backward(x, dy, &dx);
  CHECK(dx.data[0] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(dx.data[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dx.data[2] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("time embedding follows the sin/cos layout") {
  auto e0 = crpkit::time_embedding(0.0, 8);
  REQUIRE(e0.size() == 8);
  for (int j = 0; j < 4; ++j) {
    CHECK(e0[j] == 0.0);      // sines
    CHECK(e0[4 + j] == 1.0);  // cosines
  }

  auto e2 = crpkit::time_embedding(0.25, 2);
  CHECK(e2[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e2[1] == doctest::Approx(0.0).epsilon(1e-15));

  // sin^2 + cos^2 per frequency makes the norm sqrt(dim / 2) at any t.
  auto e = crpkit::time_embedding(0.37, 16);
  double norm_sq = 0.0;
  for (double v : e) norm_sq += v * v;
  CHECK(norm_sq == doctest::Approx(8.0).epsilon(1e-12));

  CHECK_THROWS_AS(crpkit::time_embedding(0.5, 3), crpkit::config_error);
  CHECK_THROWS_AS(crpkit::time_embedding(0.5, 0), crpkit::config_error);
  CHECK_THROWS_AS(crpkit::time_embedding(0.5, -2), crpkit::config_error);
}

TEST_CASE("parameter layout: exact counts and near-parity across modes") {
  Rng rng(1);
  NetConfig gen;  // 6 inputs with the default 2-dim embedding
  ScoreNetwork gnet(gen, &rng);
  NetConfig pred;
  pred.time_conditioned = false;  // 4 inputs
  ScoreNetwork pnet(pred, &rng);

  CHECK(gnet.param_count() == 34178);
  CHECK(pnet.param_count() == 33922);
  const double rel =
      std::abs(static_cast<double>(gnet.param_count()) -
               static_cast<double>(pnet.param_count())) /
      static_cast<double>(gnet.param_count());
  CHECK(rel < 0.01);

  // Slices tile theta exactly: each layer starts where the previous ended.
  std::size_t offset = 0;
  for (const auto& layer : gnet.layers()) {
    CHECK(layer.w_offset == offset);
    offset += layer.in_dim * layer.out_dim;
    CHECK(layer.b_offset == offset);
    offset += layer.out_dim;
  }
  CHECK(offset == gnet.param_count());

  CHECK(gnet.input_channels() == 6);
  CHECK(pnet.input_channels() == 4);

  NetConfig bad;
  bad.time_embed_dim = 5;
  CHECK_THROWS_AS(ScoreNetwork(bad, &rng), crpkit::config_error);
  NetConfig bad2;
  bad2.hidden_layers = 0;
  CHECK_THROWS_AS(ScoreNetwork(bad2, &rng), crpkit::config_error);
}

TEST_CASE("freshly initialized networks score exactly zero") {
  Rng rng(42);
  for (bool conditioned : {true, false}) {
    NetConfig cfg;
    cfg.time_conditioned = conditioned;
    ScoreNetwork net(cfg, &rng);
    CompressedSpec xt = random_spec(3, 5, &rng);
    CompressedSpec y = random_spec(3, 5, &rng);
    for (double t : {0.03, 0.5, 0.999}) {
      CompressedSpec out;
      net.forward(xt, y, t, &out);
      REQUIRE(out.grid.same_shape(xt.grid));
      for (const auto& v : out.grid.values) {
        CHECK(v.real() == 0.0);
        CHECK(v.imag() == 0.0);
      }
    }
  }
}

TEST_CASE("initialization is deterministic in the seed") {
  NetConfig cfg;
  Rng a(123), b(123), c(124);
  ScoreNetwork na(cfg, &a), nb(cfg, &b), nc(cfg, &c);
  CHECK(na.theta() == nb.theta());
  CHECK(na.theta() != nc.theta());
}

TEST_CASE("assemble_input lays out channels then embedding") {
  Rng rng(5);
  NetConfig cfg;
  ScoreNetwork net(cfg, &rng);
  CompressedSpec xt = random_spec(1, 2, &rng);
  CompressedSpec y = random_spec(1, 2, &rng);
  Mat in = net.assemble_input(xt, y, 0.25);
  REQUIRE(in.rows == 2);
  REQUIRE(in.cols == 6);
  for (std::size_t r = 0; r < 2; ++r) {
    CHECK(in.at(r, 0) == xt.grid.values[r].real());
    CHECK(in.at(r, 1) == xt.grid.values[r].imag());
    CHECK(in.at(r, 2) == y.grid.values[r].real());
    CHECK(in.at(r, 3) == y.grid.values[r].imag());
    CHECK(in.at(r, 4) == doctest::Approx(1.0).epsilon(1e-15));  // sin(pi/2)
    CHECK(in.at(r, 5) == doctest::Approx(0.0).epsilon(1e-15));
  }

  NetConfig pred;
  pred.time_conditioned = false;
  ScoreNetwork pnet(pred, &rng);
  Mat pin = pnet.assemble_input(y, y, 0.9);
  CHECK(pin.cols == 4);

  CompressedSpec bad = xt;
  bad.grid.values[0] = {std::nan(""), 0.0};
  CHECK_THROWS_AS(net.assemble_input(bad, y, 0.25), crpkit::numeric_error);
  CompressedSpec small = random_spec(1, 1, &rng);
  CHECK_THROWS_AS(net.assemble_input(xt, small, 0.25), crpkit::shape_error);
}

TEST_CASE("taped forward equals the tape-free forward bit for bit") {
  Rng rng(2026);
  NetConfig cfg;
  cfg.hidden_width = 24;
  cfg.hidden_layers = 2;
  ScoreNetwork net(cfg, &rng);
  randomize_theta(&net, &rng);

  CompressedSpec xt = random_spec(4, 3, &rng);
  CompressedSpec y = random_spec(4, 3, &rng);
  Mat input = net.assemble_input(xt, y, 0.42);

  Mat raw;
  net.forward_raw(net.theta(), input, &raw);

  Tape tape(&net.theta());
  NodeId out = net.forward_tape(&tape, input);
  const Mat& taped = tape.value(out);
  REQUIRE(taped.rows == raw.rows);
  REQUIRE(taped.cols == raw.cols);
  for (std::size_t i = 0; i < raw.data.size(); ++i) {
    CHECK(taped.data[i] == raw.data[i]);
  }

  // unpack_output mirrors the matrix into the complex grid.
  CompressedSpec unpacked;
  ScoreNetwork::unpack_output(raw, xt, &unpacked);
  for (std::size_t i = 0; i < raw.rows; ++i) {
    CHECK(unpacked.grid.values[i].real() == raw.at(i, 0));
    CHECK(unpacked.grid.values[i].imag() == raw.at(i, 1));
  }
}

TEST_CASE("network gradients match central finite differences") {
  struct Cfg {
    int width;
    int layers;
    int embed;
    bool conditioned;
  };
  const Cfg cases[] = {
      {8, 1, 2, true}, {12, 2, 4, true}, {16, 3, 2, false}, {6, 2, 6, true}};
  Rng rng(99);
  for (const Cfg& c : cases) {
    CAPTURE(c.width);
    CAPTURE(c.layers);
    NetConfig cfg;
    cfg.hidden_width = c.width;
    cfg.hidden_layers = c.layers;
    cfg.time_embed_dim = c.embed;
    cfg.time_conditioned = c.conditioned;
    ScoreNetwork net(cfg, &rng);
    randomize_theta(&net, &rng);

    CompressedSpec xt = random_spec(2, 2, &rng);
    CompressedSpec y = random_spec(2, 2, &rng);
    const double t = rng.uniform(0.03, 0.999);
    Mat input = net.assemble_input(xt, y, t);
    Mat target(input.rows, 2);
    for (auto& v : target.data) v = rng.uniform(-1.0, 1.0);
    const double scale = 1.0 / static_cast<double>(input.rows);

    Tape tape(&net.theta());
    NodeId out = net.forward_tape(&tape, input);
    Mat neg_target = target;
    for (auto& v : neg_target.data) v = -v;
    NodeId loss = tape.sumsq_scaled(tape.axpb(out, 1.0, neg_target), scale);
    std::vector<double> grad;
    tape.backward(loss, &grad);

    auto report = crpkit_oracle::fd_compare(
        quadratic_loss(net, input, target, scale), net.theta(), grad);
    CAPTURE(report.worst_rel);
    CAPTURE(report.worst_index);
    CHECK(report.checked > 0);
    CHECK(report.failed == 0);
  }
}

TEST_CASE("full-width network gradient survives the same derivative check") {
  Rng rng(7177);
  NetConfig cfg;  // default 128 x 3
  ScoreNetwork net(cfg, &rng);
  randomize_theta(&net, &rng);

  CompressedSpec xt = random_spec(1, 2, &rng);
  CompressedSpec y = random_spec(1, 2, &rng);
  Mat input = net.assemble_input(xt, y, 0.61);
  Mat target(input.rows, 2);
  for (auto& v : target.data) v = rng.uniform(-1.0, 1.0);

  Tape tape(&net.theta());
  NodeId out = net.forward_tape(&tape, input);
  Mat neg_target = target;
  for (auto& v : neg_target.data) v = -v;
  NodeId loss = tape.sumsq_scaled(tape.axpb(out, 1.0, neg_target), 0.25);
  std::vector<double> grad;
  tape.backward(loss, &grad);

  auto report = crpkit_oracle::fd_compare(
      quadratic_loss(net, input, target, 0.25), net.theta(), grad);
  CAPTURE(report.worst_rel);
  CAPTURE(report.promoted);
  CHECK(report.checked > 10000);
  CHECK(report.failed == 0);
}

TEST_CASE("backward_from agrees with derivatives of a weighted output sum") {
  Rng rng(314);
  NetConfig cfg;
  cfg.hidden_width = 10;
  cfg.hidden_layers = 2;
  ScoreNetwork net(cfg, &rng);
  randomize_theta(&net, &rng);

  CompressedSpec xt = random_spec(2, 3, &rng);
  CompressedSpec y = random_spec(2, 3, &rng);
  Mat input = net.assemble_input(xt, y, 0.2);
  Mat cot(input.rows, 2);
  for (auto& v : cot.data) v = rng.uniform(-1.0, 1.0);

  Tape tape(&net.theta());
  NodeId out = net.forward_tape(&tape, input);
  std::vector<double> grad;
  tape.backward_from(out, cot, &grad);

  auto layers = net.layers();
  const std::size_t rows = input.rows;
  auto f = [&](const auto& params) {
    using T = typename std::decay_t<decltype(params)>::value_type;
    auto o = crpkit_oracle::mlp_forward(layers, params, input.data, rows);
    T acc = T(0);
    for (std::size_t i = 0; i < o.size(); ++i) acc += T(cot.data[i]) * o[i];
    return acc;
  };
  auto report = crpkit_oracle::fd_compare(f, net.theta(), grad);
  CAPTURE(report.worst_rel);
  CHECK(report.checked > 0);
  CHECK(report.failed == 0);
}

TEST_CASE("forward stays finite across random parameter draws") {
  Rng rng(555);
  NetConfig cfg;
  cfg.hidden_width = 16;
  cfg.hidden_layers = 2;
  ScoreNetwork net(cfg, &rng);
  for (int draw = 0; draw < 100; ++draw) {
    randomize_theta(&net, &rng);
    CompressedSpec xt = random_spec(2, 4, &rng, 2.0);
    CompressedSpec y = random_spec(2, 4, &rng, 2.0);
    CompressedSpec out;
    net.forward(xt, y, rng.uniform(0.0, 1.0), &out);
    for (const auto& v : out.grid.values) {
      CHECK(std::isfinite(v.real()));
      CHECK(std::isfinite(v.imag()));
    }
  }
}
