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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "boca/bundle.hpp"
#include "boca/domain.hpp"
#include "boca/error.hpp"

namespace boca {

/// Per-bidder sets of bundles the bidder must not receive.
using Exclusions = std::vector<std::unordered_set<Bundle, BundleHash>>;

enum class WdpStatus { kOptimal, kGapLimit, kTimeLimit, kInfeasible };

inline const char* to_string(WdpStatus s) {
  switch (s) {
    case WdpStatus::kOptimal: return "optimal";
    case WdpStatus::kGapLimit: return "gap-limit";
    case WdpStatus::kTimeLimit: return "time-limit";
    case WdpStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

struct SolverBudget {
  double relative_gap = 0.005;
  double time_limit_secs = 600.0;
};

struct WdpSolution {
  Allocation allocation;
  double objective = 0.0;
  double proven_gap = 0.0;
  WdpStatus status = WdpStatus::kOptimal;
  std::uint64_t nodes = 0;
};

inline constexpr double kBruteForceLimit = 1e7;

namespace detail {

inline void check_wdp_inputs(std::span<const Valuation> values, std::size_t m,
                             const Exclusions* exclusions) {
  if (values.empty()) throw InvalidInput("WDP needs at least one bidder");
  if (m == 0) throw InvalidInput("WDP needs at least one item");
  if (m > 64) throw UnsupportedSize("WDP solvers support at most 64 items");
  if (exclusions && !exclusions->empty() && exclusions->size() != values.size())
    throw InvalidInput("exclusions must list one set per bidder");
}

inline std::vector<std::unordered_set<std::uint64_t>> exclusion_masks(const Exclusions* exclusions,
                                                                      std::size_t n, std::size_t m) {
  std::vector<std::unordered_set<std::uint64_t>> out(n);
  if (!exclusions || exclusions->empty()) return out;
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& b : (*exclusions)[i]) {
      if (b.size() != m) throw InvalidInput("excluded bundle length mismatch");
      out[i].insert(b.to_mask());
    }
  return out;
}

/// Memoised mask -> value lookup for one bidder.
class CachedValuation {
 public:
  CachedValuation(const Valuation& v, std::size_t m) : v_(&v), m_(m) {}
  double operator()(std::uint64_t mask) {
    auto it = cache_.find(mask);
    if (it != cache_.end()) return it->second;
    double val = (*v_)(Bundle::from_mask(mask, m_));
    cache_.emplace(mask, val);
    return val;
  }

 private:
  const Valuation* v_;
  std::size_t m_;
  std::unordered_map<std::uint64_t, double> cache_;
};

inline bool lex_less(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                     std::size_t m) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < m; ++j) {
      bool x = (a[i] >> j) & 1U, y = (b[i] >> j) & 1U;
      if (x != y) return !x;
    }
  return false;
}

inline Allocation to_allocation(const std::vector<std::uint64_t>& masks, std::size_t m) {
  Allocation a;
  a.reserve(masks.size());
  for (auto mk : masks) a.push_back(Bundle::from_mask(mk, m));
  return a;
}

}  // namespace detail

/// Exhaustive search over every assignment of items to bidders-or-nobody.
///
/// Among allocations within kWelfareTol of the best value the lexicographically
/// smallest flattened allocation is returned. Requires (n+1)^m <= 1e7.
inline WdpSolution brute_force_wdp(std::span<const Valuation> values, std::size_t m,
                                   const Exclusions* exclusions = nullptr) {
  detail::check_wdp_inputs(values, m, exclusions);
  const std::size_t n = values.size();
  if (std::pow(static_cast<double>(n + 1), static_cast<double>(m)) > kBruteForceLimit)
    throw UnsupportedSize("brute-force WDP limited to (n+1)^m <= 1e7");
  auto excluded = detail::exclusion_masks(exclusions, n, m);

  // Value tables over all 2^m bundles; (n+1)^m <= 1e7 bounds m by 23.
  const std::uint64_t num_bundles = std::uint64_t{1} << m;
  std::vector<std::vector<double>> table(n, std::vector<double>(num_bundles));
  for (std::size_t i = 0; i < n; ++i)
    for (std::uint64_t mk = 0; mk < num_bundles; ++mk) table[i][mk] = values[i](Bundle::from_mask(mk, m));

  std::vector<std::size_t> owner(m, n);  // n == unallocated
  std::vector<std::uint64_t> masks(n, 0), best_masks;
  double best = -std::numeric_limits<double>::infinity();
  std::uint64_t visited = 0;
  for (;;) {
    std::fill(masks.begin(), masks.end(), 0);
    for (std::size_t j = 0; j < m; ++j)
      if (owner[j] < n) masks[owner[j]] |= (std::uint64_t{1} << j);
    ++visited;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      if (excluded[i].contains(masks[i])) ok = false;
    if (ok) {
      double val = 0.0;
      for (std::size_t i = 0; i < n; ++i) val += table[i][masks[i]];
      if (best_masks.empty() || val > best + kWelfareTol) {
        best = val;
        best_masks = masks;
      } else if (std::abs(val - best) <= kWelfareTol && detail::lex_less(masks, best_masks, m)) {
        best = val;
        best_masks = masks;
      }
    }
    std::size_t j = 0;
    while (j < m && owner[j] == 0) {
      owner[j] = n;
      ++j;
    }
    if (j == m) break;
    // count down n, n-1, ..., 0 so that "nobody" is tried first for every item
    --owner[j];
  }

  WdpSolution sol;
  sol.nodes = visited;
  if (best_masks.empty()) {
    sol.status = WdpStatus::kInfeasible;
    sol.allocation = empty_allocation(n, m);
    return sol;
  }
  sol.allocation = detail::to_allocation(best_masks, m);
  sol.objective = best;
  sol.proven_gap = 0.0;
  sol.status = WdpStatus::kOptimal;
  return sol;
}

/// Optimistic value of a partial assignment: every bidder also gets all undecided items.
/// Admissible whenever each valuation is monotone.
inline double monotone_upper_bound(std::span<const Valuation> values, const Allocation& assigned,
                                   const Bundle& undecided) {
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) total += values[i](assigned[i] | undecided);
  return total;
}

/// Item-by-item branch and bound for monotone valuations.
///
/// Each item is given to one bidder or left unallocated. A node's bound is the
/// sum of each bidder's value for its assigned items plus every undecided item,
/// which dominates all completions by monotonicity. Items are branched in
/// descending order of their summed singleton values; children are explored
/// depth-first in descending bound order.
class MonotoneBranchAndBound {
 public:
  MonotoneBranchAndBound(std::span<const Valuation> values, std::size_t m, SolverBudget budget,
                         const Exclusions* exclusions = nullptr)
      : n_(values.size()), m_(m), budget_(budget) {
    detail::check_wdp_inputs(values, m, exclusions);
    if (budget.relative_gap < 0.0) throw InvalidInput("relative gap must be non-negative");
    excluded_ = detail::exclusion_masks(exclusions, n_, m_);
    cached_.reserve(n_);
    for (const auto& v : values) cached_.emplace_back(v, m_);
  }

  WdpSolution solve() {
    start_ = std::chrono::steady_clock::now();
    order_items();
    std::vector<std::uint64_t> assigned(n_, 0);
    const std::uint64_t all = (m_ == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << m_) - 1);
    root_bound_ = bound(assigned, all);
    dfs(0, assigned, all, root_bound_);

    WdpSolution sol;
    sol.nodes = nodes_;
    if (best_masks_.empty()) {
      sol.allocation = empty_allocation(n_, m_);
      sol.status = timed_out_ ? WdpStatus::kTimeLimit : WdpStatus::kInfeasible;
      sol.proven_gap = timed_out_ ? std::numeric_limits<double>::infinity() : 0.0;
      return sol;
    }
    sol.allocation = detail::to_allocation(best_masks_, m_);
    sol.objective = best_;
    const double denom = std::max(std::abs(best_), 1e-12);
    if (timed_out_) {
      sol.status = WdpStatus::kTimeLimit;
      sol.proven_gap = std::max(0.0, (root_bound_ - best_) / denom);
    } else {
      sol.proven_gap = std::max(0.0, (max_pruned_bound_ - best_) / denom);
      sol.status = sol.proven_gap > 0.0 ? WdpStatus::kGapLimit : WdpStatus::kOptimal;
    }
    return sol;
  }

 private:
  void order_items() {
    std::vector<double> score(m_, 0.0);
    for (std::size_t j = 0; j < m_; ++j)
      for (std::size_t i = 0; i < n_; ++i) score[j] += cached_[i](std::uint64_t{1} << j);
    order_.resize(m_);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  }

  double bound(const std::vector<std::uint64_t>& assigned, std::uint64_t undecided) {
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) total += cached_[i](assigned[i] | undecided);
    return total;
  }

  bool prunable(double node_bound) const {
    if (best_masks_.empty()) return false;
    const double slack = budget_.relative_gap * std::abs(best_) + 1e-12 * std::max(1.0, std::abs(best_));
    return node_bound <= best_ + slack;
  }

  void note_pruned(double node_bound) {
    if (node_bound > best_) max_pruned_bound_ = std::max(max_pruned_bound_, node_bound);
  }

  bool out_of_time() {
    if (timed_out_) return true;
    if ((nodes_ & 255U) == 0) {
      double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      if (elapsed > budget_.time_limit_secs) timed_out_ = true;
    }
    return timed_out_;
  }

  void dfs(std::size_t depth, std::vector<std::uint64_t>& assigned, std::uint64_t undecided,
           double node_bound) {
    ++nodes_;
    if (out_of_time()) return;
    if (depth == m_) {
      for (std::size_t i = 0; i < n_; ++i)
        if (excluded_[i].contains(assigned[i])) return;
      // at a leaf the bound is the exact value
      if (best_masks_.empty() || node_bound > best_) {
        best_ = node_bound;
        best_masks_ = assigned;
      }
      return;
    }
    const std::uint64_t item = std::uint64_t{1} << order_[depth];
    const std::uint64_t rest = undecided & ~item;

    // with_item[i]: bidder i's optimistic value while the item is still open
    std::vector<double> with_item(n_), without_item(n_);
    double sum_without = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      with_item[i] = cached_[i](assigned[i] | undecided);
      without_item[i] = cached_[i](assigned[i] | rest);
      sum_without += without_item[i];
    }
    struct Child {
      std::size_t owner;  // n_ == unallocated
      double bound;
    };
    std::vector<Child> children;
    children.reserve(n_ + 1);
    for (std::size_t i = 0; i < n_; ++i)
      children.push_back({i, sum_without - without_item[i] + with_item[i]});
    children.push_back({n_, sum_without});
    std::stable_sort(children.begin(), children.end(),
                     [](const Child& a, const Child& b) { return a.bound > b.bound; });

    for (const auto& c : children) {
      if (prunable(c.bound)) {
        note_pruned(c.bound);
        continue;
      }
      if (c.owner < n_) assigned[c.owner] |= item;
      dfs(depth + 1, assigned, rest, c.bound);
      if (c.owner < n_) assigned[c.owner] &= ~item;
      if (timed_out_) return;
    }
  }

  std::size_t n_, m_;
  SolverBudget budget_;
  std::vector<std::unordered_set<std::uint64_t>> excluded_;
  std::vector<detail::CachedValuation> cached_;
  std::vector<std::size_t> order_;
  std::vector<std::uint64_t> best_masks_;
  double best_ = -std::numeric_limits<double>::infinity();
  double root_bound_ = 0.0;
  double max_pruned_bound_ = -std::numeric_limits<double>::infinity();
  std::uint64_t nodes_ = 0;
  bool timed_out_ = false;
  std::chrono::steady_clock::time_point start_;
};

/// max over feasible allocations (minus exclusions) of the summed valuations.
inline WdpSolution solve_wdp(std::span<const Valuation> values, std::size_t m,
                             const Exclusions* exclusions = nullptr, SolverBudget budget = {}) {
  return MonotoneBranchAndBound(values, m, budget, exclusions).solve();
}

}  // namespace boca
