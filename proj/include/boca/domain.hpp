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
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "boca/bundle.hpp"
#include "boca/error.hpp"

namespace boca {

/// Value of a bundle for one bidder.
using Valuation = std::function<double(const Bundle&)>;

/// Absolute tolerance for welfare comparisons and argmax ties.
inline constexpr double kWelfareTol = 1e-9;

inline void check_allocation_shape(const Allocation& allocation, std::size_t m) {
  for (const auto& b : allocation)
    if (b.size() != m) throw InvalidInput("allocation bundle length does not match item count");
}

/// True iff no item is assigned to more than one bidder.
inline bool is_feasible(const Allocation& allocation, std::size_t m) {
  check_allocation_shape(allocation, m);
  for (std::size_t j = 0; j < m; ++j) {
    int owners = 0;
    for (const auto& b : allocation) owners += b[j] ? 1 : 0;
    if (owners > 1) return false;
  }
  return true;
}

/// Sum of reported values of the allocated bundles; unreported bundles contribute zero.
inline double reported_welfare(const Allocation& allocation, const ReportSet& reports) {
  double total = 0.0;
  for (std::size_t i = 0; i < allocation.size() && i < reports.num_bidders(); ++i) {
    if (auto v = reports[i].value_of(allocation[i])) total += *v;
  }
  return total;
}

inline double social_welfare(const Allocation& allocation, std::span<const Valuation> values) {
  if (allocation.size() != values.size()) throw InvalidInput("allocation/bidder count mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < allocation.size(); ++i) total += values[i](allocation[i]);
  return total;
}

/// 1 - welfare / optimal_welfare, clamped at 0 when negative within tolerance.
inline double efficiency_loss(double welfare, double optimal_welfare) {
  if (!(optimal_welfare > 0.0)) throw DegenerateInstance("optimal welfare must be positive");
  double loss = 1.0 - welfare / optimal_welfare;
  if (loss < 0.0 && loss > -kWelfareTol) loss = 0.0;
  return loss;
}

inline double relative_revenue(std::span<const double> payments, double optimal_welfare) {
  if (!(optimal_welfare > 0.0)) throw DegenerateInstance("optimal welfare must be positive");
  double s = 0.0;
  for (double p : payments) s += p;
  return s / optimal_welfare;
}

}  // namespace boca
