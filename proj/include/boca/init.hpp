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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "boca/error.hpp"
#include "boca/mvnn.hpp"
#include "boca/rng.hpp"

namespace boca {

struct InitHyper {
  double E_init = 1.0;
  double V_init = 0.05;
  double B_init = 0.05;
  double Bias_init = 0.05;
  double eps_little = 0.1;

  void validate() const {
    if (!(E_init > 0.0) || !(V_init > 0.0)) throw InvalidInput("E_init and V_init must be positive");
    if (B_init < 0.0 || Bias_init < 0.0 || eps_little < 0.0) throw InvalidInput("init constants must be non-negative");
  }
};

/// Weight distribution: with probability p from U[0,B], else from U[0,A].
struct MixtureParams {
  double A = 0.0;
  double B = 0.0;
  double p = 1.0;

  double mean() const { return (1.0 - p) * A / 2.0 + p * B / 2.0; }
  double variance() const {
    const double mu = mean();
    return (1.0 - p) * A * A / 3.0 + p * B * B / 3.0 - mu * mu;
  }
};

/// Scaling rule for a layer whose input has d_prev neurons. M = E_init + Bias_init / 2.
inline MixtureParams mixture_params(std::size_t d_prev, const InitHyper& h) {
  h.validate();
  if (d_prev == 0) throw InvalidInput("d_prev must be positive");
  const double d = static_cast<double>(d_prev);
  const double M = h.E_init + h.Bias_init / 2.0;
  const double V = h.V_init;
  MixtureParams mp;
  if (d > M * M / (3.0 * V)) {
    mp.B = std::max((3.0 * M * M + 3.0 * d * V) / (2.0 * M * d) + h.eps_little / d, h.B_init);
    const double B = mp.B;
    const double num = B * B * d * d - 4.0 * B * M * d + 4.0 * M * M;
    const double den = B * B * d * d - 4.0 * B * M * d + 3.0 * M * M + 3.0 * d * V;
    mp.p = 1.0 - num / den;
    const double one_minus_p = 1.0 - mp.p;
    // 1 - p vanishes only in the limit where the U[0,A] branch is never drawn
    mp.A = one_minus_p > 1e-15 ? (2.0 * M - B * d * mp.p) / (d * one_minus_p) : 0.0;
    mp.p = std::clamp(mp.p, 0.0, 1.0);
    mp.A = std::clamp(mp.A, 0.0, mp.B);
  } else {
    mp.B = 2.0 * M / d;
    mp.p = 1.0;
    mp.A = 0.0;
  }
  return mp;
}

inline double sample_mixture(const MixtureParams& mp, Rng& rng) {
  const double hi = rng.bernoulli(mp.p) ? mp.B : mp.A;
  return rng.uniform() * hi;
}

struct CutoffRange {
  double lo = 1.0;
  double hi = 1.0;
};

/// Mixture-initialised parameters. Biases ~ U[-Bias_init, 0], cutoffs ~ U[lo, hi].
/// The output layer uses the same rule; a skip vector, if requested, starts at zero.
inline MvnnParams init_params(const std::vector<std::size_t>& dims, const InitHyper& hyper, CutoffRange cutoffs,
                              std::uint64_t seed, bool with_skip = false) {
  if (!(cutoffs.lo > 0.0) || cutoffs.hi < cutoffs.lo) throw InvalidCutoff("cutoff range must satisfy 0 < lo <= hi");
  MvnnParams p = MvnnParams::zeros(dims, with_skip);
  Rng rng(seed);
  for (std::size_t k = 0; k < p.weights.size(); ++k) {
    const MixtureParams mp = mixture_params(p.dims[k], hyper);
    auto& W = p.weights[k];
    for (Eigen::Index r = 0; r < W.rows(); ++r)
      for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = sample_mixture(mp, rng);
    if (k < p.biases.size()) {
      for (Eigen::Index r = 0; r < p.biases[k].size(); ++r) p.biases[k](r) = -hyper.Bias_init * rng.uniform();
      for (Eigen::Index r = 0; r < p.cutoffs[k].size(); ++r) p.cutoffs[k](r) = rng.uniform(cutoffs.lo, cutoffs.hi);
    }
  }
  return p;
}

/// Zero-mean He-uniform weights folded onto [0, inf) by absolute value, zero biases.
/// The usual scaling for unconstrained networks, made valid for the monotone constraints.
inline MvnnParams init_params_generic(const std::vector<std::size_t>& dims, CutoffRange cutoffs, std::uint64_t seed) {
  MvnnParams p = MvnnParams::zeros(dims);
  Rng rng(seed);
  for (std::size_t k = 0; k < p.weights.size(); ++k) {
    const double a = std::sqrt(6.0 / static_cast<double>(p.dims[k]));
    auto& W = p.weights[k];
    for (Eigen::Index r = 0; r < W.rows(); ++r)
      for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = std::abs(rng.uniform(-a, a));
    if (k < p.cutoffs.size())
      for (Eigen::Index r = 0; r < p.cutoffs[k].size(); ++r) p.cutoffs[k](r) = rng.uniform(cutoffs.lo, cutoffs.hi);
  }
  return p;
}

}  // namespace boca
