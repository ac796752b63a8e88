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

BidderReports reports_of(std::size_t m, std::initializer_list<std::pair<Bundle, double>> entries) {
  BidderReports r(m);
  for (const auto& [b, v] : entries) r.add(b, v);
  return r;
}

struct NomuFixture {
  BidderReports reports;
  MvnnParams mean, exact;
  Dataset data;
};

NomuFixture tiny_fixture(std::uint64_t seed, std::size_t m = 6, std::size_t k = 10) {
  Rng rng(seed);
  NomuFixture f{random_reports(m, k, rng), {}, {}, {}};
  f.exact = build_exact_uub(f.reports);
  f.mean = train_mean(f.reports, {16, 16}, InitHyper{}, TrainHyper{}, seed);
  f.data = Dataset::from_reports(f.reports);
  return f;
}

}  // namespace

TEST(ExactUub, SingleFullReport) {
  const auto p = build_exact_uub(reports_of(2, {{Bundle{1, 1}, 1.0}}));
  EXPECT_DOUBLE_EQ(forward(p, Bundle{1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(forward(p, Bundle{0, 0}), 0.0);
}

TEST(ExactUub, TwoReports) {
  const auto p = build_exact_uub(reports_of(2, {{Bundle{1, 0}, 0.4}, {Bundle{1, 1}, 1.0}}));
  EXPECT_DOUBLE_EQ(forward(p, Bundle{0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(forward(p, Bundle{1, 0}), 0.4);
  EXPECT_DOUBLE_EQ(forward(p, Bundle{1, 1}), 1.0);
}

TEST(ExactUub, StructureWithoutMerging) {
  const auto r = reports_of(3, {{Bundle{1, 1, 1}, 1.0}, {Bundle{0, 1, 1}, 0.7}, {Bundle{1, 0, 0}, 0.2}});
  const auto p = build_exact_uub(r, false);
  ASSERT_EQ(p.dims, (std::vector<std::size_t>{3, 3, 3, 1}));
  // points in value order: empty, (1,0,0), (0,1,1); the full bundle closes the list
  Eigen::MatrixXd W1(3, 3);
  W1 << 1, 1, 1, 0, 1, 1, 1, 0, 0;
  EXPECT_EQ(p.weights[0], W1);
  Eigen::MatrixXd W2(3, 3);
  W2 << 1, 0, 0, 1, 1, 0, 1, 1, 1;
  EXPECT_EQ(p.weights[1], W2);
  EXPECT_EQ(p.biases[0], Eigen::VectorXd::Zero(3));
  EXPECT_EQ(p.biases[1], Eigen::Vector3d(0, -1, -2));
  EXPECT_NEAR(p.weights[2](0, 0), 0.2, 1e-15);
  EXPECT_NEAR(p.weights[2](0, 1), 0.5, 1e-15);
  EXPECT_NEAR(p.weights[2](0, 2), 0.3, 1e-15);
  for (const auto& t : p.cutoffs) EXPECT_EQ(t, Eigen::VectorXd::Ones(3));
}

TEST(ExactUub, MatchesLatticeOracleAndInterpolates) {
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 1 + rng.below(7);
    const std::size_t cap = (std::size_t{1} << m) - 1;
    const auto r = random_reports(m, 1 + rng.below(std::min<std::size_t>(cap, 20)), rng);
    for (bool merge : {true, false}) {
      const auto p = build_exact_uub(r, merge);
      EXPECT_TRUE(is_valid(p));
      for (std::uint64_t mask = 0; mask <= cap; ++mask) {
        const Bundle x = Bundle::from_mask(mask, m);
        EXPECT_NEAR(forward(p, x), max_monotone_extension(r, x), 1e-12);
      }
      for (const auto& e : r.entries()) EXPECT_NEAR(forward(p, e.bundle), e.value, 1e-12);
    }
  }
}

TEST(ExactUub, MergingShrinksOnlyEqualSteps) {
  const auto r = reports_of(3, {{Bundle{1, 1, 1}, 1.0}, {Bundle{1, 1, 0}, 0.5}, {Bundle{0, 1, 1}, 0.5}});
  EXPECT_EQ(build_exact_uub(r, true).dims[2], 2u);
  EXPECT_EQ(build_exact_uub(r, false).dims[2], 3u);
}

TEST(ExactUub, Errors) {
  EXPECT_THROW(build_exact_uub(reports_of(2, {{Bundle{1, 0}, 0.4}})), PreconditionError);
  EXPECT_THROW(build_exact_uub(reports_of(2, {{Bundle{1, 0}, 0.4}, {Bundle{1, 1}, 0.3}})), InvalidReport);
  BidderReports r(2);
  EXPECT_THROW(r.add(Bundle{1, 1}, -1.0), InvalidReport);
}

TEST(LossPrimitives, Examples) {
  EXPECT_DOUBLE_EQ(smooth_l1(0.5, 0.0, 1.0), 0.125);
  EXPECT_DOUBLE_EQ(smooth_l1(2.0, 0.0, 1.0), 1.5);
  EXPECT_DOUBLE_EQ(smooth_l1(-2.0, 0.0, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(g_fn(0.0), 1.0);
  EXPECT_NEAR(g_fn(-30.0), std::exp(-30.0), 1e-20);
  EXPECT_GT(g_fn(-30.0), 0.0);
  EXPECT_LT(g_fn(-2.0), g_fn(-1.0));
}

TEST(NomuLoss, TermsVanishInTheirIdealCases) {
  const auto f = tiny_fixture(2);
  Rng rng(3);
  const Eigen::MatrixXd art = sample_art_points(6, 64, rng);
  NomuHyper h;
  // the exact uUB interpolates the training data and is the pointwise ceiling
  const auto t = nomu_loss(f.exact, f.mean, f.exact, f.data.X, f.data.y, art, h, 1.0 / 64.0);
  EXPECT_NEAR(t.fit, 0.0, 1e-20);
  EXPECT_EQ(t.below_exact, 0.0);
  EXPECT_NEAR(t.asymmetric, 0.0, 1e-20);

  // a network that dominates the mean everywhere on the art points
  MvnnParams high = MvnnParams::zeros({6, 1, 1}, true);
  high.skip->setConstant(10.0);
  high.cutoffs[0].setOnes();
  bool dominates = true;
  const Eigen::RowVectorXd um = forward_batch(f.mean, art), uh = forward_batch(high, art);
  for (Eigen::Index c = 0; c < art.cols(); ++c) dominates &= uh(c) >= um(c);
  ASSERT_TRUE(dominates);
  EXPECT_EQ(nomu_loss(high, f.mean, f.exact, f.data.X, f.data.y, art, h, 1.0 / 64.0).above_mean, 0.0);
}

TEST(NomuLoss, VariantsDifferOnlyInOffsetAndAsymmetricTerm) {
  const Eigen::RowVectorXd u_tr = Eigen::RowVectorXd::Constant(1, 0.8);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, 0.5);
  const Eigen::RowVectorXd u = Eigen::RowVectorXd::Constant(1, 0.3), mu = Eigen::RowVectorXd::Constant(1, 0.2),
                           ex = Eigen::RowVectorXd::Constant(1, 0.9);
  NomuHyper h;
  h.variant = NomuVariant::kPlain;
  const auto a = nomu_loss_from_outputs(u_tr, y, u, mu, ex, h, 1.0 / 64.0);
  h.variant = NomuVariant::kStabilized;
  const auto b = nomu_loss_from_outputs(u_tr, y, u, mu, ex, h, 1.0 / 64.0);
  EXPECT_EQ(a.asymmetric, 0.0);
  EXPECT_NEAR(a.push_up, h.mu_exp * g_fn(-h.c_exp * 0.1), 1e-15);
  EXPECT_NEAR(b.push_up, h.mu_exp * g_fn(0.01 - h.c_exp * 0.1), 1e-15);
  // 0.001 e + 0.5 smooth_l1(e) with e = 0.3 outside the quadratic zone
  EXPECT_NEAR(b.asymmetric, 0.001 * 0.3 + 0.5 * (0.3 - 0.5 / 64.0), 1e-15);
  EXPECT_EQ(a.fit, b.fit);
}

TEST(NomuLoss, EmptyBatchThrows) {
  const Eigen::RowVectorXd e(0), one = Eigen::RowVectorXd::Ones(1);
  EXPECT_THROW(nomu_loss_from_outputs(e, Eigen::VectorXd(0), one, one, one, NomuHyper{}, 0.1), InvalidInput);
  EXPECT_THROW(nomu_loss_from_outputs(one, Eigen::VectorXd::Ones(1), e, e, e, NomuHyper{}, 0.1), InvalidInput);
  NomuHyper h;
  h.n_art = 0;
  EXPECT_THROW(h.validate(), InvalidInput);
}

TEST(NomuLoss, GradientPerTermMatchesFiniteDifferences) {
  const auto f = tiny_fixture(4, 5, 8);
  const double beta = 1.0 / 64.0;
  NomuHyper h;
  h.n_art = 16;
  Rng rng(5);
  const NomuTermMask only[] = {{true, false, false, false, false},
                               {false, true, false, false, false},
                               {false, false, true, false, false},
                               {false, false, false, true, false},
                               {false, false, false, false, true}};
  for (const auto& mask : only) {
    int checked = 0, attempts = 0;
    while (checked < 3 && attempts++ < 2000) {
      const auto p = random_params({5, 4, 3, 1}, rng, rng.bernoulli(0.5), 0.8, -0.8, 0.3, 1.5);
      NomuObjective obj(f.data, f.mean, f.exact, h, beta, 1, mask);
      std::vector<std::size_t> all(f.data.size());
      std::iota(all.begin(), all.end(), 0);
      const std::uint64_t s = rng.next_u64();
      Rng art_rng(s);
      const Eigen::MatrixXd art = sample_art_points(5, h.n_art, art_rng);
      Eigen::MatrixXd X(5, f.data.X.cols() + art.cols());
      X << f.data.X, art;
      if (kink_distance(p, X) < 1e-4) continue;
      const Eigen::RowVectorXd ua = forward_batch(p, art), ut = forward_batch(p, f.data.X);
      const Eigen::RowVectorXd ma = forward_batch(f.mean, art), ea = forward_batch(f.exact, art);
      bool kinky = false;
      for (Eigen::Index c = 0; c < ua.size(); ++c)
        kinky |= std::abs(ua(c) - ea(c)) < 1e-4 || std::abs(ua(c) - ma(c)) < 1e-4 ||
                 std::abs(std::abs(ua(c) - ea(c)) - beta) < 1e-4 || std::abs(std::abs(ua(c) - ma(c)) - beta) < 1e-4;
      for (Eigen::Index c = 0; c < ut.size(); ++c)
        kinky |= std::abs(ut(c) - f.data.y(c)) < 1e-4 || std::abs(std::abs(ut(c) - f.data.y(c)) - beta) < 1e-4;
      if (kinky) continue;
      Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.num_parameters()));
      Rng batch_rng(s);
      obj.batch_loss_grad(p, all, batch_rng, 0.0, g);
      if (g.norm() < 1e-8) continue;  // the term is inactive here; look for a point where it matters
      const auto fd = numeric_gradient(p, [&](const MvnnParams& q) {
        return nomu_loss(q, f.mean, f.exact, f.data.X, f.data.y, art, h, beta, mask).total();
      });
      EXPECT_LE(relative_error(g, fd), 1e-4);
      ++checked;
    }
    EXPECT_EQ(checked, 3);
  }
}

TEST(TrainUub, SandwichAndFitOnTinyInstance) {
  const auto f = tiny_fixture(6);
  const NetworkConfig cfg;
  const auto uub = train_uub(f.reports, f.mean, f.exact, cfg.hidden, cfg.init, cfg.nomu, cfg.uub_train, 7);
  EXPECT_TRUE(is_valid(uub));
  Rng rng(8);
  const Eigen::MatrixXd pts = sample_art_points(6, 1000, rng);
  const Eigen::RowVectorXd u = forward_batch(uub, pts), mu = forward_batch(f.mean, pts),
                           ex = forward_batch(f.exact, pts);
  int below = 0, above = 0;
  for (Eigen::Index c = 0; c < pts.cols(); ++c) {
    below += u(c) < mu(c) - 0.02;
    above += u(c) > ex(c) + 0.02;
  }
  EXPECT_LT(below, 50);
  EXPECT_LT(above, 50);
  std::vector<double> res;
  for (const auto& e : f.reports.entries()) res.push_back(std::abs(forward(uub, e.bundle) - e.value));
  std::nth_element(res.begin(), res.begin() + static_cast<long>(res.size() / 2), res.end());
  EXPECT_LT(res[res.size() / 2], 0.05);
}

TEST(TrainUub, LargerExplorationWeightRaisesTheBound) {
  Rng rng(9);
  const Eigen::MatrixXd pts = sample_art_points(6, 500, rng);
  auto gap = [&](double mu_exp) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto f = tiny_fixture(100 + seed);
      NetworkConfig cfg;
      cfg.nomu.mu_exp = mu_exp;
      const auto uub = train_uub(f.reports, f.mean, f.exact, cfg.hidden, cfg.init, cfg.nomu, cfg.uub_train, seed);
      total += (forward_batch(uub, pts) - forward_batch(f.mean, pts)).mean();
    }
    return total / 5.0;
  };
  EXPECT_LE(gap(0.01), gap(0.2));
}

TEST(TrainTriple, ComponentsShareInputs) {
  Rng rng(10);
  const auto r = random_reports(5, 8, rng);
  NetworkConfig cfg;
  cfg.hidden = {8, 8};
  cfg.mean_train.epochs = 50;
  cfg.uub_train.epochs = 50;
  const auto t = train_triple(r, cfg, 1);
  EXPECT_EQ(t.mean_net.num_inputs(), 5u);
  EXPECT_EQ(t.uub_net.num_inputs(), 5u);
  EXPECT_EQ(t.exact_uub_net.num_inputs(), 5u);
  for (const auto& e : r.entries()) EXPECT_NEAR(forward(t.exact_uub_net, e.bundle), e.value, 1e-12);
}
