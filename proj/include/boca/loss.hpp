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

#include <cmath>

namespace boca {

/// 0.5/beta (x-y)^2 inside |x-y| <= beta, |x-y| - 0.5 beta outside. beta = 0 is the absolute loss.
inline double smooth_l1(double x, double y, double beta) {
  const double d = std::abs(x - y);
  if (beta > 0.0 && d <= beta) return 0.5 / beta * d * d;
  return d - 0.5 * beta;
}

/// d/dx smooth_l1(x, y, beta); 0 at x == y.
inline double smooth_l1_grad(double x, double y, double beta) {
  const double d = x - y;
  if (beta > 0.0 && std::abs(d) <= beta) return d / beta;
  return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
}

inline double elu(double x) { return x >= 0.0 ? x : std::expm1(x); }

/// 1 + elu: convex, increasing, positive. exp(x) below zero avoids cancellation.
inline double g_fn(double x) { return x >= 0.0 ? 1.0 + x : std::exp(x); }
inline double g_grad(double x) { return x >= 0.0 ? 1.0 : std::exp(x); }

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace boca
