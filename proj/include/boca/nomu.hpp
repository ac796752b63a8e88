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

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "boca/bundle.hpp"
#include "boca/error.hpp"
#include "boca/init.hpp"
#include "boca/loss.hpp"
#include "boca/mvnn.hpp"
#include "boca/rng.hpp"
#include "boca/train.hpp"

namespace boca {

// ---------------------------------------------------------------------------
// Closed-form 100%-uUB network.

/// Two-hidden-layer network whose output at x is w_k for the smallest k with
/// x subset of x^(k), where x^(0) = empty with w_0 = 0 and the remaining reports
/// are sorted by value with the full bundle last.
///
/// With `merge_equal`, second-layer neurons whose output weight w_{k+1} - w_k
/// is zero are dropped; the function is unchanged.
inline MvnnParams build_exact_uub(const BidderReports& reports, bool merge_equal = true) {
  const std::size_t m = reports.num_items();
  if (m == 0) throw InvalidInput("reports carry no items");
  struct Point {
    Bundle x;
    double w;
  };
  std::vector<Point> pts;
  const Point* full = nullptr;
  Point full_pt;
  for (const auto& r : reports.entries()) {
    if (!(r.value >= 0.0)) throw InvalidReport("reported values must be non-negative");
    if (r.bundle.is_empty()) continue;
    if (r.bundle.is_full()) {
      full_pt = {r.bundle, r.value};
      full = &full_pt;
      continue;
    }
    pts.push_back({r.bundle, r.value});
  }
  if (!full) throw PreconditionError("the full bundle must be among the reports");
  std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.w < b.w; });
  if (!pts.empty() && pts.back().w > full->w)
    throw InvalidReport("reports are not monotone: a bundle is valued above the full bundle");
  pts.insert(pts.begin(), Point{Bundle::empty(m), 0.0});
  pts.push_back(*full);

  const std::size_t L = pts.size() - 1;  // number of non-empty points
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < L; ++k)
    if (!merge_equal || pts[k + 1].w != pts[k].w) keep.push_back(k);
  if (keep.empty()) keep.push_back(0);

  MvnnParams p = MvnnParams::zeros({m, L, keep.size(), 1});
  for (std::size_t j = 0; j < L; ++j)
    for (std::size_t c = 0; c < m; ++c) p.weights[0](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) = pts[j].x[c] ? 0.0 : 1.0;
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const std::size_t k = keep[r];
    for (std::size_t j = 0; j <= k; ++j) p.weights[1](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = 1.0;
    p.biases[1](static_cast<Eigen::Index>(r)) = -static_cast<double>(k);
    p.weights[2](0, static_cast<Eigen::Index>(r)) = pts[k + 1].w - pts[k].w;
  }
  return p;
}

// ---------------------------------------------------------------------------
// NOMU loss.

enum class NomuVariant { kPlain, kStabilized };

inline const char* to_string(NomuVariant v) {
  return v == NomuVariant::kPlain ? "main-paper" : "appendix-detailed";
}

inline NomuVariant parse_nomu_variant(std::string_view s) {
  if (s == "main-paper") return NomuVariant::kPlain;
  if (s == "appendix-detailed") return NomuVariant::kStabilized;
  throw InvalidInput("unknown NOMU loss variant: " + std::string(s));
}

struct NomuHyper {
  double mu_sqr = 1.0;
  double mu_exp = 0.05;
  double c_exp = 64.0;
  double pi_uub = 0.25;
  double pi_mean = 128.0;
  std::size_t n_art = 128;
  NomuVariant variant = NomuVariant::kStabilized;

  void validate() const {
    if (mu_sqr < 0.0 || mu_exp < 0.0 || c_exp < 0.0 || pi_uub < 0.0 || pi_mean < 0.0)
      throw InvalidInput("NOMU hyperparameters must be non-negative");
    if (n_art < 1) throw InvalidInput("n_art must be at least 1");
  }
};

/// Per-term values. asymmetric is zero in the plain variant.
struct NomuTerms {
  double fit = 0.0;        ///< data fit on training points
  double push_up = 0.0;    ///< g-term over artificial points
  double below_exact = 0.0;
  double above_mean = 0.0;
  double asymmetric = 0.0;
  double total() const { return fit + push_up + below_exact + above_mean + asymmetric; }
};

/// Selects which terms contribute to value and gradient.
struct NomuTermMask {
  bool fit = true, push_up = true, below_exact = true, above_mean = true, asymmetric = true;
};

/// Loss as a function of the uUB outputs. Gradients w.r.t. those outputs are
/// accumulated into du_train / du_art when given (sized like the inputs).
inline NomuTerms nomu_loss_from_outputs(const Eigen::RowVectorXd& u_train, const Eigen::VectorXd& y,
                                        const Eigen::RowVectorXd& u_art, const Eigen::RowVectorXd& mean_art,
                                        const Eigen::RowVectorXd& exact_art, const NomuHyper& h, double beta,
                                        NomuTermMask mask = {}, Eigen::RowVectorXd* du_train = nullptr,
                                        Eigen::RowVectorXd* du_art = nullptr) {
  if (u_train.size() == 0) throw InvalidInput("empty training batch");
  if (u_train.size() != y.size()) throw InvalidInput("training outputs/targets mismatch");
  if (u_art.size() == 0 || mean_art.size() != u_art.size() || exact_art.size() != u_art.size())
    throw InvalidInput("artificial point outputs mismatch");
  NomuTerms t;
  const bool stabilized = h.variant == NomuVariant::kStabilized;

  for (Eigen::Index l = 0; l < u_train.size(); ++l) {
    const double u = u_train(l), yl = y(l);
    double d = 0.0;
    if (mask.fit) {
      t.fit += h.mu_sqr * smooth_l1(u, yl, beta);
      d += h.mu_sqr * smooth_l1_grad(u, yl, beta);
    }
    if (stabilized && mask.asymmetric) {
      const double e = positive_part(u - yl);
      t.asymmetric += h.mu_sqr * (0.001 * e + 0.5 * smooth_l1(e, 0.0, beta));
      if (u > yl) d += h.mu_sqr * (0.001 + 0.5 * smooth_l1_grad(e, 0.0, beta));
    }
    if (du_train) (*du_train)(l) += d;
  }

  const double inv = 1.0 / static_cast<double>(u_art.size());
  const double offset = stabilized ? 0.01 : 0.0;
  for (Eigen::Index a = 0; a < u_art.size(); ++a) {
    const double u = u_art(a), mu = mean_art(a), ex = exact_art(a);
    double d = 0.0;
    if (mask.push_up) {
      const double arg = offset - h.c_exp * (std::min(u, ex) - mu);
      t.push_up += h.mu_exp * g_fn(arg) * inv;
      if (u < ex) d += h.mu_exp * g_grad(arg) * (-h.c_exp) * inv;
    }
    if (mask.below_exact && u > ex) {
      const double s = h.mu_exp * h.c_exp * h.pi_uub * inv;
      t.below_exact += s * smooth_l1(u - ex, 0.0, beta);
      d += s * smooth_l1_grad(u - ex, 0.0, beta);
    }
    if (mask.above_mean && mu > u) {
      const double s = h.mu_exp * h.c_exp * h.pi_mean * inv;
      t.above_mean += s * smooth_l1(mu - u, 0.0, beta);
      d -= s * smooth_l1_grad(mu - u, 0.0, beta);
    }
    if (du_art) (*du_art)(a) += d;
  }
  return t;
}

inline Eigen::MatrixXd sample_art_points(std::size_t m, std::size_t n_art, Rng& rng) {
  Eigen::MatrixXd A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n_art));
  for (Eigen::Index c = 0; c < A.cols(); ++c)
    for (Eigen::Index r = 0; r < A.rows(); ++r) A(r, c) = rng.uniform();
  return A;
}

/// Loss of `uub` given frozen mean/exact networks on explicit training and artificial points.
inline NomuTerms nomu_loss(const MvnnParams& uub, const MvnnParams& mean, const MvnnParams& exact,
                           const Eigen::MatrixXd& X_train, const Eigen::VectorXd& y, const Eigen::MatrixXd& art,
                           const NomuHyper& h, double beta, NomuTermMask mask = {}) {
  return nomu_loss_from_outputs(forward_batch(uub, X_train), y, forward_batch(uub, art), forward_batch(mean, art),
                                forward_batch(exact, art), h, beta, mask);
}

/// Training objective for the uUB network; mean and exact networks stay frozen.
class NomuObjective {
 public:
  NomuObjective(const Dataset& data, const MvnnParams& mean, const MvnnParams& exact, const NomuHyper& h,
                double beta, std::uint64_t eval_seed, NomuTermMask mask = {})
      : data_(&data), mean_(&mean), exact_(&exact), h_(h), beta_(beta), mask_(mask) {
    h_.validate();
    Rng rng(eval_seed);
    eval_art_ = sample_art_points(static_cast<std::size_t>(data.X.rows()), h_.n_art, rng);
    eval_mean_ = forward_batch(mean, eval_art_);
    eval_exact_ = forward_batch(exact, eval_art_);
  }

  std::size_t num_points() const { return data_->size(); }

  double batch_loss_grad(const MvnnParams& p, std::span<const std::size_t> batch, Rng& rng, double dropout_p,
                         Eigen::VectorXd& grad) const {
    const Eigen::Index m = data_->X.rows();
    const Eigen::Index nb = static_cast<Eigen::Index>(batch.size());
    const Eigen::Index na = static_cast<Eigen::Index>(h_.n_art);
    Eigen::MatrixXd X(m, nb + na);
    Eigen::VectorXd y(nb);
    for (Eigen::Index c = 0; c < nb; ++c) {
      X.col(c) = data_->X.col(static_cast<Eigen::Index>(batch[static_cast<std::size_t>(c)]));
      y(c) = data_->y(static_cast<Eigen::Index>(batch[static_cast<std::size_t>(c)]));
    }
    Eigen::MatrixXd art = sample_art_points(static_cast<std::size_t>(m), h_.n_art, rng);
    X.rightCols(na) = art;
    auto cache = forward_cached(p, X, dropout_p, &rng);
    Eigen::RowVectorXd du_tr = Eigen::RowVectorXd::Zero(nb), du_art = Eigen::RowVectorXd::Zero(na);
    auto terms = nomu_loss_from_outputs(cache.out.leftCols(nb), y, cache.out.rightCols(na),
                                        forward_batch(*mean_, art), forward_batch(*exact_, art), h_, beta_, mask_,
                                        &du_tr, &du_art);
    Eigen::RowVectorXd dout(nb + na);
    dout << du_tr, du_art;
    grad += backward(p, cache, dout, true);
    return terms.total();
  }

  double eval_loss(const MvnnParams& p) const {
    return nomu_loss_from_outputs(forward_batch(p, data_->X), data_->y, forward_batch(p, eval_art_), eval_mean_,
                                  eval_exact_, h_, beta_, mask_)
        .total();
  }

 private:
  const Dataset* data_;
  const MvnnParams* mean_;
  const MvnnParams* exact_;
  NomuHyper h_;
  double beta_;
  NomuTermMask mask_;
  Eigen::MatrixXd eval_art_;
  Eigen::RowVectorXd eval_mean_, eval_exact_;
};

/// Trains the uUB network against an already trained mean network and the exact uUB.
inline MvnnParams train_uub(const BidderReports& reports, const MvnnParams& mean, const MvnnParams& exact,
                            const std::vector<std::size_t>& hidden, const InitHyper& init, const NomuHyper& nomu,
                            const TrainHyper& hyper, std::uint64_t seed, TrainReport* report = nullptr) {
  if (reports.empty()) throw InvalidInput("cannot train on an empty report set");
  const Dataset data = Dataset::from_reports(reports);
  NomuObjective obj(data, mean, exact, nomu, hyper.smooth_l1_beta, Rng::mix(seed, 11));
  const auto dims = architecture(reports.num_items(), hidden);
  return train_projected(init_params(dims, init, hyper.cutoff_init, Rng::mix(seed, 12)), obj, hyper,
                         Rng::mix(seed, 13), report);
}

struct UubTriple {
  MvnnParams mean_net;
  MvnnParams uub_net;
  MvnnParams exact_uub_net;
};

/// Everything needed to turn one bidder's reports into a UubTriple.
struct NetworkConfig {
  std::vector<std::size_t> hidden{32, 32};
  InitHyper init{};
  TrainHyper mean_train{};
  TrainHyper uub_train{};
  NomuHyper nomu{};
};

/// Mean first, then the uUB with the mean detached.
inline UubTriple train_triple(const BidderReports& reports, const NetworkConfig& cfg, std::uint64_t seed) {
  UubTriple t;
  t.exact_uub_net = build_exact_uub(reports);
  t.mean_net = train_mean(reports, cfg.hidden, cfg.init, cfg.mean_train, Rng::mix(seed, 21));
  t.uub_net = train_uub(reports, t.mean_net, t.exact_uub_net, cfg.hidden, cfg.init, cfg.nomu, cfg.uub_train,
                        Rng::mix(seed, 22));
  return t;
}

}  // namespace boca
