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
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "boca/bundle.hpp"
#include "boca/error.hpp"
#include "boca/init.hpp"
#include "boca/loss.hpp"
#include "boca/mvnn.hpp"
#include "boca/rng.hpp"

namespace boca {

struct TrainHyper {
  double learning_rate = 0.005;
  double l2_lambda = 1e-6;
  std::size_t epochs = 600;
  std::size_t batch_size = 0;  ///< 0 means full batch
  double dropout_p = 0.0;
  double dropout_decay = 1.0;
  double clip_grad_norm = 1.0;  ///< <= 0 disables clipping
  double smooth_l1_beta = 1.0 / 64.0;
  bool trainable_cutoffs = false;
  CutoffRange cutoff_init{1.0, 1.0};
  /// Retrain once when the final training R^2 falls below this.
  double retrain_r2 = 0.9;

  void validate() const {
    if (!(learning_rate > 0.0)) throw InvalidInput("learning rate must be positive");
    if (l2_lambda < 0.0) throw InvalidInput("l2_lambda must be non-negative");
    if (epochs == 0) throw InvalidInput("epochs must be positive");
    if (dropout_p < 0.0 || dropout_p > 0.8) throw InvalidInput("dropout_p must lie in [0, 0.8]");
    if (dropout_decay <= 0.0 || dropout_decay > 1.0) throw InvalidInput("dropout_decay must lie in (0, 1]");
    if (smooth_l1_beta < 0.0) throw InvalidInput("smooth_l1_beta must be non-negative");
  }
};

inline constexpr double kMinCutoff = 1e-3;

// ---------------------------------------------------------------------------
// Flat parameter vectors. Order per layer: W (column-major), then b and t for
// hidden layers; the skip vector comes last.

inline Eigen::VectorXd pack(const MvnnParams& p) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(p.num_parameters()));
  Eigen::Index o = 0;
  auto put = [&](const double* d, Eigen::Index n) {
    v.segment(o, n) = Eigen::Map<const Eigen::VectorXd>(d, n);
    o += n;
  };
  for (std::size_t k = 0; k < p.weights.size(); ++k) {
    put(p.weights[k].data(), p.weights[k].size());
    if (k < p.biases.size()) {
      put(p.biases[k].data(), p.biases[k].size());
      put(p.cutoffs[k].data(), p.cutoffs[k].size());
    }
  }
  if (p.skip) put(p.skip->data(), p.skip->size());
  return v;
}

inline void unpack(MvnnParams& p, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != p.num_parameters()) throw InvalidInput("parameter vector length mismatch");
  Eigen::Index o = 0;
  auto get = [&](double* d, Eigen::Index n) {
    Eigen::Map<Eigen::VectorXd>(d, n) = v.segment(o, n);
    o += n;
  };
  for (std::size_t k = 0; k < p.weights.size(); ++k) {
    get(p.weights[k].data(), p.weights[k].size());
    if (k < p.biases.size()) {
      get(p.biases[k].data(), p.biases[k].size());
      get(p.cutoffs[k].data(), p.cutoffs[k].size());
    }
  }
  if (p.skip) get(p.skip->data(), p.skip->size());
}

enum class ParamRole : std::uint8_t { kWeight, kBias, kCutoff, kSkip };

/// Role of every entry of the packed vector.
inline std::vector<ParamRole> param_roles(const MvnnParams& p) {
  std::vector<ParamRole> r;
  r.reserve(p.num_parameters());
  for (std::size_t k = 0; k < p.weights.size(); ++k) {
    r.insert(r.end(), static_cast<std::size_t>(p.weights[k].size()), ParamRole::kWeight);
    if (k < p.biases.size()) {
      r.insert(r.end(), static_cast<std::size_t>(p.biases[k].size()), ParamRole::kBias);
      r.insert(r.end(), static_cast<std::size_t>(p.cutoffs[k].size()), ParamRole::kCutoff);
    }
  }
  if (p.skip) r.insert(r.end(), static_cast<std::size_t>(p.skip->size()), ParamRole::kSkip);
  return r;
}

/// Clamp onto the feasible set: W >= 0, b <= 0, t >= kMinCutoff, skip >= 0.
inline void project(MvnnParams& p) {
  for (auto& W : p.weights) W = W.cwiseMax(0.0);
  for (auto& b : p.biases) b = b.cwiseMin(0.0);
  for (auto& t : p.cutoffs) t = t.cwiseMax(kMinCutoff);
  if (p.skip) *p.skip = p.skip->cwiseMax(0.0);
}

// ---------------------------------------------------------------------------
// Batched forward with cache, and the matching backward pass.

struct BatchCache {
  Eigen::MatrixXd X;
  std::vector<Eigen::MatrixXd> pre;
  std::vector<Eigen::MatrixXd> post;  ///< after dropout scaling
  std::vector<Eigen::MatrixXd> keep;  ///< dropout multipliers, empty when disabled
  Eigen::RowVectorXd out;
};

/// Inverted dropout on hidden activations when dropout_p > 0.
inline BatchCache forward_cached(const MvnnParams& p, const Eigen::MatrixXd& X, double dropout_p = 0.0,
                                 Rng* rng = nullptr) {
  if (static_cast<std::size_t>(X.rows()) != p.num_inputs()) throw InvalidInput("input length mismatch");
  BatchCache c;
  c.X = X;
  const std::size_t K = p.weights.size();
  const Eigen::MatrixXd* h = &c.X;
  for (std::size_t k = 0; k + 1 < K; ++k) {
    Eigen::MatrixXd o = p.weights[k] * (*h);
    o.colwise() += p.biases[k];
    Eigen::MatrixXd a = o.cwiseMax(0.0).cwiseMin(p.cutoffs[k].replicate(1, o.cols()));
    if (dropout_p > 0.0 && rng) {
      Eigen::MatrixXd mask(a.rows(), a.cols());
      const double scale = 1.0 / (1.0 - dropout_p);
      for (Eigen::Index j = 0; j < mask.cols(); ++j)
        for (Eigen::Index i = 0; i < mask.rows(); ++i) mask(i, j) = rng->bernoulli(dropout_p) ? 0.0 : scale;
      a = a.cwiseProduct(mask);
      c.keep.push_back(std::move(mask));
    }
    c.pre.push_back(std::move(o));
    c.post.push_back(std::move(a));
    h = &c.post.back();
  }
  c.out = p.weights.back() * (*h);
  if (p.skip) c.out += (*p.skip) * c.X;
  return c;
}

/// Packed gradient of sum_c dout(c) * out(c). Cutoff entries stay zero unless `cutoff_grads`.
///
/// The bReLU derivative is 1 strictly inside (0, t) and 0 elsewhere; d/dt is 1 strictly above t.
inline Eigen::VectorXd backward(const MvnnParams& p, const BatchCache& c, const Eigen::RowVectorXd& dout,
                                bool cutoff_grads) {
  const std::size_t K = p.weights.size();
  MvnnParams g = MvnnParams::zeros(p.dims, p.skip.has_value());
  const Eigen::MatrixXd& last_in = K >= 2 ? c.post.back() : c.X;
  g.weights[K - 1] = dout * last_in.transpose();
  if (p.skip) *g.skip = dout * c.X.transpose();
  Eigen::MatrixXd dh = p.weights[K - 1].transpose() * dout;
  for (std::size_t kk = K - 1; kk-- > 0;) {
    if (!c.keep.empty()) dh = dh.cwiseProduct(c.keep[kk]);
    const Eigen::MatrixXd& o = c.pre[kk];
    const Eigen::VectorXd& t = p.cutoffs[kk];
    Eigen::MatrixXd dpre(o.rows(), o.cols());
    Eigen::VectorXd dt = Eigen::VectorXd::Zero(o.rows());
    for (Eigen::Index j = 0; j < o.cols(); ++j)
      for (Eigen::Index i = 0; i < o.rows(); ++i) {
        const double v = o(i, j);
        dpre(i, j) = (v > 0.0 && v < t(i)) ? dh(i, j) : 0.0;
        if (v > t(i)) dt(i) += dh(i, j);
      }
    if (cutoff_grads) g.cutoffs[kk] = dt;
    else g.cutoffs[kk].setZero();
    g.biases[kk] = dpre.rowwise().sum();
    const Eigen::MatrixXd& in = kk == 0 ? c.X : c.post[kk - 1];
    g.weights[kk] = dpre * in.transpose();
    if (kk > 0) dh = p.weights[kk].transpose() * dpre;
  }
  return pack(g);
}

/// lambda * ||theta||^2 over weights, biases and skip weights (cutoffs excluded).
inline double l2_penalty(const MvnnParams& p, double lambda, Eigen::VectorXd* grad) {
  if (lambda == 0.0) return 0.0;
  const Eigen::VectorXd v = pack(p);
  const auto roles = param_roles(p);
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (roles[static_cast<std::size_t>(i)] == ParamRole::kCutoff) continue;
    s += v(i) * v(i);
    if (grad) (*grad)(i) += 2.0 * lambda * v(i);
  }
  return lambda * s;
}

// ---------------------------------------------------------------------------
// Adam with projection.

class Adam {
 public:
  explicit Adam(Eigen::Index n, double lr, double b1 = 0.9, double b2 = 0.999, double eps = 1e-8)
      : lr_(lr), b1_(b1), b2_(b2), eps_(eps), m_(Eigen::VectorXd::Zero(n)), v_(Eigen::VectorXd::Zero(n)) {}

  void step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad) {
    ++t_;
    m_ = b1_ * m_ + (1.0 - b1_) * grad;
    v_ = b2_ * v_ + (1.0 - b2_) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
    theta.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
  }

 private:
  double lr_, b1_, b2_, eps_;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

inline void clip_global_norm(Eigen::VectorXd& g, double max_norm) {
  if (max_norm <= 0.0) return;
  const double n = g.norm();
  if (n > max_norm) g *= max_norm / n;
}

struct TrainReport {
  std::size_t best_epoch = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  double final_loss = std::numeric_limits<double>::infinity();
  double r2 = 0.0;
  bool retrained = false;
};

/// Projected Adam over an objective.
///
/// Objective must provide
///   std::size_t num_points() const;
///   double batch_loss_grad(const MvnnParams&, std::span<const std::size_t> batch, Rng&,
///                          double dropout_p, Eigen::VectorXd& grad);   // data loss only
///   double eval_loss(const MvnnParams&);                               // deterministic, no dropout
/// The L2 term is added here. Returns the parameters of the epoch with the lowest eval loss.
template <class Objective>
MvnnParams train_projected(MvnnParams params, Objective& obj, const TrainHyper& hyper, std::uint64_t seed,
                           TrainReport* report = nullptr) {
  hyper.validate();
  validate(params);
  Rng rng(seed);
  const std::size_t n = obj.num_points();
  if (n == 0) throw InvalidInput("empty training set");
  const std::size_t bs = hyper.batch_size == 0 ? n : std::min(hyper.batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  Eigen::VectorXd theta = pack(params);
  Adam adam(theta.size(), hyper.learning_rate);
  const auto roles = param_roles(params);

  MvnnParams best = params;
  double best_loss = obj.eval_loss(params) + l2_penalty(params, hyper.l2_lambda, nullptr);
  std::size_t best_epoch = 0;
  double last = best_loss;
  double p_drop = hyper.dropout_p;

  for (std::size_t epoch = 1; epoch <= hyper.epochs; ++epoch) {
    if (bs < n) {
      for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    }
    for (std::size_t start = 0; start < n; start += bs) {
      const std::size_t len = std::min(bs, n - start);
      std::span<const std::size_t> batch(order.data() + start, len);
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.size());
      obj.batch_loss_grad(params, batch, rng, p_drop, grad);
      l2_penalty(params, hyper.l2_lambda, &grad);
      if (!hyper.trainable_cutoffs)
        for (Eigen::Index i = 0; i < grad.size(); ++i)
          if (roles[static_cast<std::size_t>(i)] == ParamRole::kCutoff) grad(i) = 0.0;
      clip_global_norm(grad, hyper.clip_grad_norm);
      adam.step(theta, grad);
      unpack(params, theta);
      project(params);
      theta = pack(params);
    }
    p_drop *= hyper.dropout_decay;
    last = obj.eval_loss(params) + l2_penalty(params, hyper.l2_lambda, nullptr);
    if (last < best_loss) {
      best_loss = last;
      best = params;
      best_epoch = epoch;
    }
  }
  if (report) {
    report->best_epoch = best_epoch;
    report->best_loss = best_loss;
    report->final_loss = last;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Mean network.

/// Training points of one bidder as a design matrix and targets.
struct Dataset {
  Eigen::MatrixXd X;  ///< m x L, columns are bundles
  Eigen::VectorXd y;

  std::size_t size() const { return static_cast<std::size_t>(y.size()); }

  static Dataset from_reports(const BidderReports& r) {
    Dataset d;
    std::vector<Bundle> xs;
    d.y.resize(static_cast<Eigen::Index>(r.size()));
    for (std::size_t l = 0; l < r.size(); ++l) {
      xs.push_back(r.entries()[l].bundle);
      d.y(static_cast<Eigen::Index>(l)) = r.entries()[l].value;
    }
    d.X = bundles_to_matrix(xs, r.num_items());
    return d;
  }
};

/// Mean smooth-L1 data loss.
class MeanObjective {
 public:
  MeanObjective(const Dataset& data, double beta) : data_(&data), beta_(beta) {}

  std::size_t num_points() const { return data_->size(); }

  double batch_loss_grad(const MvnnParams& p, std::span<const std::size_t> batch, Rng& rng, double dropout_p,
                         Eigen::VectorXd& grad) const {
    Eigen::MatrixXd X(data_->X.rows(), static_cast<Eigen::Index>(batch.size()));
    Eigen::VectorXd y(static_cast<Eigen::Index>(batch.size()));
    for (std::size_t c = 0; c < batch.size(); ++c) {
      X.col(static_cast<Eigen::Index>(c)) = data_->X.col(static_cast<Eigen::Index>(batch[c]));
      y(static_cast<Eigen::Index>(c)) = data_->y(static_cast<Eigen::Index>(batch[c]));
    }
    auto cache = forward_cached(p, X, dropout_p, &rng);
    const double inv = 1.0 / static_cast<double>(batch.size());
    Eigen::RowVectorXd dout(cache.out.size());
    double loss = 0.0;
    for (Eigen::Index c = 0; c < cache.out.size(); ++c) {
      loss += smooth_l1(cache.out(c), y(c), beta_) * inv;
      dout(c) = smooth_l1_grad(cache.out(c), y(c), beta_) * inv;
    }
    grad += backward(p, cache, dout, true);
    return loss;
  }

  double eval_loss(const MvnnParams& p) const {
    Eigen::RowVectorXd out = forward_batch(p, data_->X);
    double loss = 0.0;
    for (Eigen::Index c = 0; c < out.size(); ++c) loss += smooth_l1(out(c), data_->y(c), beta_);
    return loss / static_cast<double>(out.size());
  }

 private:
  const Dataset* data_;
  double beta_;
};

/// 1 - SSE/SST; 1 when the targets are constant and fitted within 1e-6, else 0.
inline double r_squared(const MvnnParams& p, const Dataset& d) {
  Eigen::RowVectorXd out = forward_batch(p, d.X);
  const double mean = d.y.mean();
  double sse = 0.0, sst = 0.0;
  for (Eigen::Index c = 0; c < d.y.size(); ++c) {
    sse += (out(c) - d.y(c)) * (out(c) - d.y(c));
    sst += (d.y(c) - mean) * (d.y(c) - mean);
  }
  if (sst <= 1e-15) return sse <= 1e-12 * static_cast<double>(d.y.size()) ? 1.0 : 0.0;
  return 1.0 - sse / sst;
}

/// Layer sizes [m, hidden..., 1].
inline std::vector<std::size_t> architecture(std::size_t m, const std::vector<std::size_t>& hidden) {
  std::vector<std::size_t> dims{m};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  return dims;
}

inline MvnnParams train_mean(const BidderReports& reports, const std::vector<std::size_t>& hidden,
                             const InitHyper& init, const TrainHyper& hyper, std::uint64_t seed,
                             TrainReport* report = nullptr) {
  if (reports.empty()) throw InvalidInput("cannot train on an empty report set");
  const Dataset data = Dataset::from_reports(reports);
  MeanObjective obj(data, hyper.smooth_l1_beta);
  const auto dims = architecture(reports.num_items(), hidden);

  TrainReport rep;
  MvnnParams net = train_projected(init_params(dims, init, hyper.cutoff_init, Rng::mix(seed, 1)), obj, hyper,
                                   Rng::mix(seed, 2), &rep);
  rep.r2 = r_squared(net, data);
  if (rep.r2 < hyper.retrain_r2) {
    TrainReport rep2;
    MvnnParams net2 = train_projected(init_params(dims, init, hyper.cutoff_init, Rng::mix(seed, 3)), obj, hyper,
                                      Rng::mix(seed, 4), &rep2);
    rep2.r2 = r_squared(net2, data);
    rep2.retrained = true;
    if (rep2.r2 > rep.r2) {
      net = std::move(net2);
      rep = rep2;
    } else {
      rep.retrained = true;
    }
  }
  if (report) *report = rep;
  return net;
}

}  // namespace boca
