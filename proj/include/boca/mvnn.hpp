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
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boca/bundle.hpp"
#include "boca/error.hpp"

namespace boca {

/// Bounded ReLU min(t, max(0, x)).
inline double brelu(double x, double t) {
  if (!(t > 0.0)) throw InvalidCutoff("bReLU cutoff must be positive");
  return std::min(t, std::max(0.0, x));
}

/// Parameters of a monotone-value network.
///
/// weights[k] maps layer k (size dims[k]) to layer k+1. Hidden layers
/// k = 1..K-1 carry a bias and per-neuron cutoffs; the output layer is linear
/// without bias. `skip` is an optional linear term added to the output.
struct MvnnParams {
  std::vector<std::size_t> dims;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  std::vector<Eigen::VectorXd> cutoffs;
  std::optional<Eigen::RowVectorXd> skip;

  std::size_t num_inputs() const { return dims.empty() ? 0 : dims.front(); }
  std::size_t num_hidden_layers() const { return biases.size(); }

  /// All-zero parameters with unit cutoffs for the given layer sizes.
  static MvnnParams zeros(std::vector<std::size_t> dims, bool with_skip = false) {
    if (dims.size() < 2) throw InvalidInput("need at least input and output layer");
    if (dims.back() != 1) throw InvalidInput("output layer must have one neuron");
    for (auto d : dims)
      if (d == 0) throw InvalidInput("layer sizes must be positive");
    MvnnParams p;
    p.dims = std::move(dims);
    const std::size_t K = p.dims.size() - 1;
    for (std::size_t k = 0; k < K; ++k) {
      p.weights.emplace_back(Eigen::MatrixXd::Zero(p.dims[k + 1], p.dims[k]));
      if (k + 1 < K) {
        p.biases.emplace_back(Eigen::VectorXd::Zero(p.dims[k + 1]));
        p.cutoffs.emplace_back(Eigen::VectorXd::Ones(p.dims[k + 1]));
      }
    }
    if (with_skip) p.skip = Eigen::RowVectorXd::Zero(p.dims.front());
    return p;
  }

  std::size_t num_parameters() const {
    std::size_t c = 0;
    for (const auto& w : weights) c += w.size();
    for (const auto& b : biases) c += b.size();
    for (const auto& t : cutoffs) c += t.size();
    if (skip) c += skip->size();
    return c;
  }
};

/// Throws unless shapes are consistent and W >= 0, b <= 0, t > 0.
inline void validate(const MvnnParams& p) {
  if (p.dims.size() < 2) throw InvalidInput("need at least input and output layer");
  const std::size_t K = p.dims.size() - 1;
  if (p.dims.back() != 1) throw InvalidInput("output layer must have one neuron");
  if (p.weights.size() != K || p.biases.size() != K - 1 || p.cutoffs.size() != K - 1)
    throw InvalidInput("layer count mismatch");
  for (std::size_t k = 0; k < K; ++k) {
    const auto& W = p.weights[k];
    if (static_cast<std::size_t>(W.rows()) != p.dims[k + 1] || static_cast<std::size_t>(W.cols()) != p.dims[k])
      throw InvalidInput("weight matrix shape mismatch at layer " + std::to_string(k));
    if (!W.allFinite() || (W.size() > 0 && W.minCoeff() < 0.0))
      throw InvalidInput("weights must be finite and non-negative");
  }
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const auto& b = p.biases[k];
    const auto& t = p.cutoffs[k];
    if (static_cast<std::size_t>(b.size()) != p.dims[k + 1] || static_cast<std::size_t>(t.size()) != p.dims[k + 1])
      throw InvalidInput("bias/cutoff length mismatch at layer " + std::to_string(k));
    if (!b.allFinite() || b.maxCoeff() > 0.0) throw InvalidInput("biases must be finite and non-positive");
    if (!t.allFinite() || !(t.minCoeff() > 0.0)) throw InvalidCutoff("cutoffs must be positive");
  }
  if (p.skip) {
    if (static_cast<std::size_t>(p.skip->size()) != p.dims.front()) throw InvalidInput("skip length mismatch");
    if (!p.skip->allFinite() || p.skip->minCoeff() < 0.0) throw InvalidInput("skip weights must be non-negative");
  }
}

inline bool is_valid(const MvnnParams& p) {
  try {
    validate(p);
    return true;
  } catch (const Error&) {
    return false;
  }
}

/// Pre-activations and activations of every hidden layer for one input.
struct ForwardTrace {
  std::vector<Eigen::VectorXd> pre;
  std::vector<Eigen::VectorXd> post;
  double output = 0.0;
};

inline ForwardTrace trace(const MvnnParams& p, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != p.num_inputs()) throw InvalidInput("input length mismatch");
  ForwardTrace tr;
  Eigen::VectorXd h = x;
  const std::size_t K = p.weights.size();
  for (std::size_t k = 0; k + 1 < K; ++k) {
    Eigen::VectorXd o = p.weights[k] * h + p.biases[k];
    h = o.cwiseMax(0.0).cwiseMin(p.cutoffs[k]);
    tr.pre.push_back(std::move(o));
    tr.post.push_back(h);
  }
  tr.output = (p.weights.back() * h)(0);
  if (p.skip) tr.output += p.skip->dot(x);
  return tr;
}

inline double forward(const MvnnParams& p, const Eigen::VectorXd& x) { return trace(p, x).output; }

inline double forward(const MvnnParams& p, std::span<const double> x) {
  return forward(p, Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())).eval());
}

inline double forward(const MvnnParams& p, const Bundle& x) {
  auto d = x.as_doubles();
  return forward(p, std::span<const double>(d));
}

/// Columns of X are inputs. Returns one output per column.
inline Eigen::RowVectorXd forward_batch(const MvnnParams& p, const Eigen::MatrixXd& X) {
  if (static_cast<std::size_t>(X.rows()) != p.num_inputs()) throw InvalidInput("input length mismatch");
  Eigen::MatrixXd h = X;
  const std::size_t K = p.weights.size();
  for (std::size_t k = 0; k + 1 < K; ++k) {
    Eigen::MatrixXd o = p.weights[k] * h;
    o.colwise() += p.biases[k];
    h = o.cwiseMax(0.0).cwiseMin(p.cutoffs[k].replicate(1, o.cols()));
  }
  Eigen::RowVectorXd out = p.weights.back() * h;
  if (p.skip) out += (*p.skip) * X;
  return out;
}

/// Bundles as columns of a 0/1 matrix.
inline Eigen::MatrixXd bundles_to_matrix(std::span<const Bundle> xs, std::size_t m) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(xs.size()));
  for (std::size_t c = 0; c < xs.size(); ++c) {
    if (xs[c].size() != m) throw InvalidInput("bundle length mismatch");
    for (std::size_t j = 0; j < m; ++j) X(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) = xs[c][j];
  }
  return X;
}

}  // namespace boca
