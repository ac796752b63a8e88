// Copyright 2026 The boca-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace boca;
using namespace boca::testing;

namespace {

MvnnParams hand_net() {
  MvnnParams p = MvnnParams::zeros({2, 1, 1});
  p.weights[0] << 1.0, 1.0;
  p.biases[0] << -0.5;
  p.cutoffs[0] << 1.0;
  p.weights[1] << 1.0;
  return p;
}

}  // namespace

TEST(Brelu, Examples) {
  EXPECT_DOUBLE_EQ(brelu(3.0, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(brelu(-1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(brelu(0.5, 1.0), 0.5);
  EXPECT_THROW(brelu(0.5, 0.0), InvalidCutoff);
  EXPECT_THROW(brelu(0.5, -1.0), InvalidCutoff);
}

TEST(Forward, HandEvaluation) {
  const auto p = hand_net();
  EXPECT_DOUBLE_EQ(forward(p, Bundle{1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(forward(p, Bundle{1, 0}), 0.5);
  EXPECT_DOUBLE_EQ(forward(p, Bundle{0, 0}), 0.0);
  EXPECT_THROW(forward(p, Bundle{1, 0, 0}), InvalidInput);
}

TEST(Forward, ZeroInputWithZeroBiasIsZero) {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    auto p = random_params(random_dims(6, 8, rng), rng, t % 2 == 0);
    for (auto& b : p.biases) b.setZero();
    EXPECT_EQ(forward(p, Bundle::empty(6)), 0.0);
  }
}

TEST(Forward, FractionalInputsAndBatchAgree) {
  Rng rng(2);
  const auto p = random_params({5, 7, 4, 1}, rng, true);
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(5, 30).cwiseAbs();
  const Eigen::RowVectorXd batch = forward_batch(p, X);
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const Eigen::VectorXd x = X.col(c);
    EXPECT_NEAR(batch(c), forward(p, x), 1e-14);
    EXPECT_GE(batch(c), 0.0);
  }
}

TEST(Params, ValidationRejectsConstraintViolations) {
  auto p = hand_net();
  EXPECT_NO_THROW(validate(p));
  p.weights[0](0, 0) = -0.1;
  EXPECT_THROW(validate(p), InvalidInput);
  p = hand_net();
  p.biases[0](0) = 0.1;
  EXPECT_THROW(validate(p), InvalidInput);
  p = hand_net();
  p.cutoffs[0](0) = 0.0;
  EXPECT_THROW(validate(p), InvalidCutoff);
}

TEST(Params, JsonRoundTrip) {
  Rng rng(3);
  const auto p = random_params({4, 3, 2, 1}, rng, true);
  const auto q = params_from_json(json::parse(params_to_json(p).dump()));
  for (std::uint64_t mask = 0; mask < 16; ++mask)
    EXPECT_EQ(forward(p, Bundle::from_mask(mask, 4)), forward(q, Bundle::from_mask(mask, 4)));
  // weights are serialized row-major
  const json j = params_to_json(p);
  EXPECT_EQ(j["weights"][0].size(), 3u);
  EXPECT_EQ(j["weights"][0][0].size(), 4u);
  EXPECT_DOUBLE_EQ(j["weights"][0][1][2].get<double>(), p.weights[0](1, 2));
}

TEST(Monotonicity, RandomContainmentPairs) {
  Rng rng(4);
  for (bool skip : {false, true}) {
    for (int net = 0; net < 10; ++net) {
      const std::size_t m = 1 + rng.below(10);
      const auto p = random_params(random_dims(m, 8, rng), rng, skip);
      for (int t = 0; t < 50; ++t) {
        const std::uint64_t full = (std::uint64_t{1} << m) - 1;
        const std::uint64_t b = rng.next_u64() & full, a = b & rng.next_u64();
        EXPECT_LE(forward(p, Bundle::from_mask(a, m)), forward(p, Bundle::from_mask(b, m)) + 1e-12);
      }
    }
  }
}

TEST(MixtureParams, SmallLayerBranch) {
  InitHyper h;
  h.E_init = 1.0;
  h.Bias_init = 0.0;
  h.V_init = 1.0 / 12.0;
  const auto mp = mixture_params(2, h);
  EXPECT_DOUBLE_EQ(mp.A, 0.0);
  EXPECT_DOUBLE_EQ(mp.B, 1.0);
  EXPECT_DOUBLE_EQ(mp.p, 1.0);
}

TEST(MixtureParams, MomentsMatchTargets) {
  InitHyper h;
  h.E_init = 1.0;
  h.Bias_init = 0.0;
  h.V_init = 1.0 / 12.0;
  for (std::size_t d : {5u, 100u, 1000u}) {
    const auto mp = mixture_params(d, h);
    // moments of a p : (1-p) mixture of U[0,B] and U[0,A]
    const double e1 = mp.p * mp.B / 2.0 + (1.0 - mp.p) * mp.A / 2.0;
    const double e2 = mp.p * mp.B * mp.B / 3.0 + (1.0 - mp.p) * mp.A * mp.A / 3.0;
    const double dd = static_cast<double>(d);
    EXPECT_NEAR(e1, 1.0 / dd, 1e-12) << d;
    EXPECT_NEAR(e2 - e1 * e1, h.V_init / dd, 1e-12) << d;
  }
}

TEST(MixtureParams, AlwaysOrderedAndProper) {
  InitHyper h;
  for (std::size_t d = 1; d <= 2048; d = d * 2 + 1) {
    const auto mp = mixture_params(d, h);
    EXPECT_GE(mp.p, 0.0);
    EXPECT_LE(mp.p, 1.0);
    EXPECT_GE(mp.A, 0.0);
    EXPECT_LE(mp.A, mp.B);
  }
  EXPECT_THROW(mixture_params(0, h), InvalidInput);
  h.V_init = 0.0;
  EXPECT_THROW(mixture_params(4, h), InvalidInput);
}

TEST(InitParams, BoundsAndDeterminism) {
  InitHyper h;
  const std::vector<std::size_t> dims{16, 32, 32, 1};
  const auto p = init_params(dims, h, {0.5, 1.5}, 7);
  const auto q = init_params(dims, h, {0.5, 1.5}, 7);
  for (std::size_t k = 0; k < p.weights.size(); ++k) {
    const auto mp = mixture_params(dims[k], h);
    EXPECT_GT(p.weights[k].minCoeff(), 0.0);
    EXPECT_LE(p.weights[k].maxCoeff(), mp.B);
    EXPECT_EQ(p.weights[k], q.weights[k]);
  }
  for (std::size_t k = 0; k < p.biases.size(); ++k) {
    EXPECT_LE(p.biases[k].maxCoeff(), 0.0);
    EXPECT_GE(p.biases[k].minCoeff(), -h.Bias_init);
    EXPECT_GE(p.cutoffs[k].minCoeff(), 0.5);
    EXPECT_LE(p.cutoffs[k].maxCoeff(), 1.5);
  }
  EXPECT_THROW(init_params(dims, h, {0.0, 1.0}, 1), InvalidCutoff);
}

TEST(InitParams, PreactivationMeanOnAllOnes) {
  InitHyper h;
  Rng rng(8);
  const std::size_t d = 256;
  const auto mp = mixture_params(d, h);
  double s = 0.0;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    double o = -h.Bias_init * rng.uniform();
    for (std::size_t j = 0; j < d; ++j) o += sample_mixture(mp, rng);
    s += o;
  }
  EXPECT_NEAR(s / trials, h.E_init, 0.02 * h.E_init);
}

TEST(Training, OverfitsAdditiveTruthTable) {
  const auto v = ValueModel::additive({0.1, 0.2, 0.3, 0.4});
  BidderReports r(4);
  for (std::uint64_t mask = 1; mask < 16; ++mask) r.add(Bundle::from_mask(mask, 4), v.query(Bundle::from_mask(mask, 4)));
  TrainHyper th;
  th.epochs = 1000;
  const auto net = train_mean(r, {16, 16}, InitHyper{}, th, 1);
  EXPECT_TRUE(is_valid(net));
  double mae = 0.0;
  for (const auto& e : r.entries()) mae += std::abs(forward(net, e.bundle) - e.value);
  EXPECT_LT(mae / static_cast<double>(r.size()), 0.02);
}

TEST(Training, SinglePointFit) {
  BidderReports r(5);
  r.add(Bundle::full(5), 1.0);
  const auto net = train_mean(r, {8, 8}, InitHyper{}, TrainHyper{}, 3);
  EXPECT_NEAR(forward(net, Bundle::full(5)), 1.0, 0.05);
  EXPECT_TRUE(is_valid(net));
}

TEST(Training, EmptySetThrows) {
  EXPECT_THROW(train_mean(BidderReports(3), {4}, InitHyper{}, TrainHyper{}, 1), InvalidInput);
}

TEST(Training, DeterministicAndValidWithDropoutAndTrainableCutoffs) {
  Rng rng(9);
  const auto r = random_reports(6, 12, rng);
  TrainHyper th;
  th.epochs = 200;
  th.dropout_p = 0.2;
  th.dropout_decay = 0.99;
  th.batch_size = 4;
  th.trainable_cutoffs = true;
  th.cutoff_init = {0.5, 1.5};
  const auto a = train_mean(r, {8, 8}, InitHyper{}, th, 5);
  const auto b = train_mean(r, {8, 8}, InitHyper{}, th, 5);
  EXPECT_TRUE(is_valid(a));
  EXPECT_EQ(pack(a), pack(b));
  for (const auto& t : a.cutoffs) EXPECT_GE(t.minCoeff(), kMinCutoff);
}

TEST(Training, RetrainsWhenFitIsPoor) {
  Rng rng(10);
  const auto r = random_reports(6, 10, rng);
  TrainHyper th;
  th.epochs = 5;
  th.retrain_r2 = 2.0;  // unattainable, forces the second attempt
  TrainReport rep;
  train_mean(r, {4}, InitHyper{}, th, 1, &rep);
  EXPECT_TRUE(rep.retrained);
  th.retrain_r2 = -1e9;
  train_mean(r, {4}, InitHyper{}, th, 1, &rep);
  EXPECT_FALSE(rep.retrained);
}

TEST(Gradient, MeanLossMatchesFiniteDifferences) {
  Rng rng(11);
  int checked = 0;
  const double beta = 1.0 / 64.0;
  while (checked < 10) {
    const std::size_t m = 3 + rng.below(4);
    const auto p = random_params(random_dims(m, 6, rng), rng, rng.bernoulli(0.5));
    const auto r = random_reports(m, 8, rng);
    const Dataset d = Dataset::from_reports(r);
    if (kink_distance(p, d.X) < 1e-4) continue;
    const Eigen::RowVectorXd out = forward_batch(p, d.X);
    bool near_beta = false;
    for (Eigen::Index c = 0; c < out.size(); ++c) near_beta |= std::abs(std::abs(out(c) - d.y(c)) - beta) < 1e-4;
    if (near_beta) continue;
    MeanObjective obj(d, beta);
    std::vector<std::size_t> all(d.size());
    std::iota(all.begin(), all.end(), 0);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.num_parameters()));
    Rng unused(0);
    obj.batch_loss_grad(p, all, unused, 0.0, g);
    const auto fd = numeric_gradient(p, [&](const MvnnParams& q) { return obj.eval_loss(q); });
    EXPECT_LE(relative_error(g, fd), 1e-4);
    ++checked;
  }
}

TEST(Gradient, L2PenaltyExcludesCutoffs) {
  Rng rng(12);
  const auto p = random_params({3, 4, 1}, rng, true);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.num_parameters()));
  const double v = l2_penalty(p, 0.1, &g);
  const auto fd = numeric_gradient(p, [](const MvnnParams& q) { return l2_penalty(q, 0.1, nullptr); });
  EXPECT_LE(relative_error(g, fd), 1e-8);
  double s = 0.0;
  for (const auto& W : p.weights) s += W.squaredNorm();
  for (const auto& b : p.biases) s += b.squaredNorm();
  s += p.skip->squaredNorm();
  EXPECT_NEAR(v, 0.1 * s, 1e-12);
}

TEST(Projection, ClampsOntoFeasibleSet) {
  Rng rng(13);
  auto p = random_params({3, 4, 1}, rng, true);
  p.weights[0](0, 0) = -1.0;
  p.biases[0](1) = 2.0;
  p.cutoffs[0](2) = -3.0;
  (*p.skip)(0) = -0.5;
  project(p);
  EXPECT_TRUE(is_valid(p));
  EXPECT_EQ(p.weights[0](0, 0), 0.0);
  EXPECT_EQ(p.biases[0](1), 0.0);
  EXPECT_EQ(p.cutoffs[0](2), kMinCutoff);
  EXPECT_EQ((*p.skip)(0), 0.0);
}
