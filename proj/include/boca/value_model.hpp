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
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "boca/bundle.hpp"
#include "boca/domain.hpp"
#include "boca/error.hpp"
#include "boca/rng.hpp"
#include "boca/wdp.hpp"

namespace boca {

enum class ValueKind { kAdditive, kPairwiseSynergy, kCoverage };

inline const char* to_string(ValueKind k) {
  switch (k) {
    case ValueKind::kAdditive: return "additive";
    case ValueKind::kPairwiseSynergy: return "pairwise-synergy";
    case ValueKind::kCoverage: return "coverage";
  }
  return "unknown";
}

inline ValueKind parse_value_kind(std::string_view s) {
  if (s == "additive") return ValueKind::kAdditive;
  if (s == "pairwise-synergy" || s == "pairwise") return ValueKind::kPairwiseSynergy;
  if (s == "coverage") return ValueKind::kCoverage;
  throw InvalidInput("unknown value model kind: " + std::string(s));
}

struct Synergy {
  std::size_t a = 0, b = 0;
  double weight = 0.0;
};

/// weight * min(1, sum_j coeffs[j] * x_j)
struct CoverageRegion {
  double weight = 0.0;
  std::vector<double> coeffs;
};

/// Monotone value function with non-negative coefficients, scaled so v(full) = 1.
///
/// raw(x) = sum_j base_j x_j + sum_{(a,b)} w_ab x_a x_b + sum_r weight_r min(1, c_r . x)
/// and v(x) = raw(x) / normalizer. An all-zero model keeps normalizer 1.
class ValueModel {
 public:
  ValueModel() = default;

  static ValueModel additive(std::vector<double> base) {
    return ValueModel(ValueKind::kAdditive, std::move(base), {}, {});
  }
  static ValueModel pairwise(std::vector<double> base, std::vector<Synergy> synergy) {
    return ValueModel(ValueKind::kPairwiseSynergy, std::move(base), std::move(synergy), {});
  }
  static ValueModel coverage(std::vector<double> base, std::vector<CoverageRegion> regions) {
    return ValueModel(ValueKind::kCoverage, std::move(base), {}, std::move(regions));
  }

  ValueKind kind() const { return kind_; }
  std::size_t num_items() const { return base_.size(); }
  const std::vector<double>& base_values() const { return base_; }
  const std::vector<Synergy>& synergy() const { return synergy_; }
  const std::vector<CoverageRegion>& regions() const { return regions_; }
  double normalizer() const { return normalizer_; }

  double operator()(const Bundle& x) const { return query(x); }

  double query(const Bundle& x) const {
    if (x.size() != base_.size()) throw InvalidInput("bundle length does not match value model");
    return raw(x) / normalizer_;
  }

 private:
  ValueModel(ValueKind kind, std::vector<double> base, std::vector<Synergy> synergy,
             std::vector<CoverageRegion> regions)
      : kind_(kind), base_(std::move(base)), synergy_(std::move(synergy)), regions_(std::move(regions)) {
    const std::size_t m = base_.size();
    if (m == 0) throw InvalidInput("value model needs at least one item");
    for (double b : base_)
      if (!(b >= 0.0) || !std::isfinite(b)) throw InvalidInput("base values must be finite and non-negative");
    for (const auto& s : synergy_) {
      if (s.a >= m || s.b >= m || s.a == s.b) throw InvalidInput("synergy pair out of range");
      if (!(s.weight >= 0.0)) throw InvalidInput("synergy weights must be non-negative");
    }
    for (const auto& r : regions_) {
      if (r.coeffs.size() != m) throw InvalidInput("coverage coefficients length mismatch");
      if (!(r.weight >= 0.0)) throw InvalidInput("coverage weights must be non-negative");
      for (double c : r.coeffs)
        if (!(c >= 0.0)) throw InvalidInput("coverage coefficients must be non-negative");
    }
    double full = raw(Bundle::full(m));
    normalizer_ = full > 0.0 ? full : 1.0;
  }

  double raw(const Bundle& x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < base_.size(); ++j)
      if (x[j]) v += base_[j];
    for (const auto& s : synergy_)
      if (x[s.a] && x[s.b]) v += s.weight;
    for (const auto& r : regions_) {
      double cover = 0.0;
      for (std::size_t j = 0; j < base_.size(); ++j)
        if (x[j]) cover += r.coeffs[j];
      v += r.weight * std::min(1.0, cover);
    }
    return v;
  }

  ValueKind kind_ = ValueKind::kAdditive;
  std::vector<double> base_;
  std::vector<Synergy> synergy_;
  std::vector<CoverageRegion> regions_;
  double normalizer_ = 1.0;
};

inline double query_value(const ValueModel& model, const Bundle& bundle) { return model.query(bundle); }

/// Knobs of the synthetic generator. Ranges are artifact choices.
struct GeneratorConfig {
  std::size_t n = 3;
  std::size_t m = 8;
  /// Bidder i gets type_mix[i % size] when `cyclic`, else a seeded uniform draw.
  std::vector<ValueKind> type_mix{ValueKind::kAdditive, ValueKind::kPairwiseSynergy, ValueKind::kCoverage};
  bool cyclic = true;
  /// Per-bidder interest probability is drawn from [interest_lo, interest_hi].
  double interest_lo = 0.3;
  double interest_hi = 1.0;
  /// Base value of an item outside the interest set, relative to inside.
  double off_interest_scale = 0.05;
  double synergy_density = 0.4;
  double synergy_scale = 1.0;
  std::size_t coverage_regions = 3;

  void validate() const {
    if (n < 1 || n > 12) throw InvalidInput("generator: n must lie in [1, 12]");
    if (m < 1 || m > 30) throw InvalidInput("generator: m must lie in [1, 30]");
    if (type_mix.empty()) throw InvalidInput("generator: type mix must be non-empty");
    if (!(0.0 < interest_lo && interest_lo <= interest_hi && interest_hi <= 1.0))
      throw InvalidInput("generator: need 0 < interest_lo <= interest_hi <= 1");
    if (off_interest_scale < 0.0 || synergy_density < 0.0 || synergy_density > 1.0 || synergy_scale < 0.0)
      throw InvalidInput("generator: invalid density or scale");
  }
};

struct AuctionInstance {
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::vector<ValueModel> bidders;
  Allocation optimal_allocation;
  double optimal_welfare = 0.0;

  std::vector<Valuation> valuations() const {
    std::vector<Valuation> out;
    out.reserve(bidders.size());
    for (const auto& b : bidders) out.emplace_back([&b](const Bundle& x) { return b.query(x); });
    return out;
  }

  double welfare(const Allocation& a) const {
    auto v = valuations();
    return social_welfare(a, v);
  }
};

inline double efficiency_loss(const Allocation& allocation, const AuctionInstance& instance) {
  if (!(instance.optimal_welfare > 0.0)) throw DegenerateInstance("optimal welfare must be positive");
  return efficiency_loss(instance.welfare(allocation), instance.optimal_welfare);
}

/// Exact optimum: brute force when (n+1)^m <= 1e7, else branch and bound with zero gap.
inline WdpSolution exact_optimum(std::span<const Valuation> values, std::size_t m) {
  const double size = std::pow(static_cast<double>(values.size() + 1), static_cast<double>(m));
  if (size <= kBruteForceLimit) return brute_force_wdp(values, m);
  if (m > 64) throw UnsupportedSize("instance too large for any exact oracle");
  SolverBudget exact{0.0, std::numeric_limits<double>::infinity()};
  return solve_wdp(values, m, nullptr, exact);
}

inline void compute_optimum(AuctionInstance& inst) {
  auto v = inst.valuations();
  auto sol = exact_optimum(v, inst.m);
  inst.optimal_allocation = sol.allocation;
  inst.optimal_welfare = social_welfare(sol.allocation, v);
}

inline ValueModel generate_bidder(ValueKind kind, std::size_t m, const GeneratorConfig& cfg, Rng& rng) {
  const double interest_p = rng.uniform(cfg.interest_lo, cfg.interest_hi);
  std::vector<char> interest(m, 0);
  std::size_t count = 0;
  for (std::size_t j = 0; j < m; ++j) {
    interest[j] = rng.bernoulli(interest_p) ? 1 : 0;
    count += interest[j];
  }
  if (count == 0) interest[rng.below(m)] = 1;

  std::vector<double> base(m);
  for (std::size_t j = 0; j < m; ++j)
    base[j] = rng.uniform() * (interest[j] ? 1.0 : cfg.off_interest_scale);

  switch (kind) {
    case ValueKind::kAdditive: return ValueModel::additive(std::move(base));
    case ValueKind::kPairwiseSynergy: {
      std::vector<Synergy> syn;
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) {
          if (!interest[a] || !interest[b]) continue;
          if (rng.bernoulli(cfg.synergy_density)) syn.push_back({a, b, rng.uniform() * cfg.synergy_scale});
        }
      return ValueModel::pairwise(std::move(base), std::move(syn));
    }
    case ValueKind::kCoverage: {
      // the base part is kept small so that saturation dominates
      for (auto& b : base) b *= 0.2;
      std::vector<CoverageRegion> regions(cfg.coverage_regions);
      for (auto& r : regions) {
        r.weight = rng.uniform(0.5, 1.5);
        r.coeffs.assign(m, 0.0);
        for (std::size_t j = 0; j < m; ++j)
          if (interest[j] && rng.bernoulli(0.6)) r.coeffs[j] = rng.uniform(0.2, 0.8);
      }
      return ValueModel::coverage(std::move(base), std::move(regions));
    }
  }
  throw InvalidInput("unknown value model kind");
}

/// Deterministic in (config, seed). The optimum is computed by an exact oracle.
inline AuctionInstance generate_instance(const GeneratorConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  AuctionInstance inst;
  inst.n = cfg.n;
  inst.m = cfg.m;
  inst.seed = seed;
  Rng type_rng(Rng::mix(seed, 0x7470));
  for (std::size_t i = 0; i < cfg.n; ++i) {
    ValueKind kind = cfg.cyclic ? cfg.type_mix[i % cfg.type_mix.size()]
                                : cfg.type_mix[type_rng.below(cfg.type_mix.size())];
    Rng rng(Rng::mix(seed, i + 1));
    inst.bidders.push_back(generate_bidder(kind, cfg.m, cfg, rng));
  }
  compute_optimum(inst);
  return inst;
}

}  // namespace boca
