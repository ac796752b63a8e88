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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

#include "boca/bundle.hpp"
#include "boca/domain.hpp"
#include "boca/error.hpp"
#include "boca/nomu.hpp"
#include "boca/rng.hpp"
#include "boca/value_model.hpp"
#include "boca/wdp.hpp"

namespace boca {

/// Runs fn(0..count-1) on up to `threads` workers. Results must not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> jobs;
  std::atomic<std::size_t> next{0};
  const std::size_t workers = std::min(threads, count);
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    }));
  for (auto& j : jobs) j.get();
}

// ---------------------------------------------------------------------------
// Reported-value winner determination and VCG.

struct ReportedWdpResult {
  Allocation allocation;
  double welfare = 0.0;
};

/// Each active bidder receives one of its reported bundles or nothing; bundles
/// must be disjoint. Exact depth-first search; ties go to the lexicographically
/// smallest flattened allocation.
inline ReportedWdpResult reported_wdp(const ReportSet& reports, const std::vector<bool>& active) {
  const std::size_t n = reports.num_bidders(), m = reports.num_items();
  if (m > 64) throw UnsupportedSize("reported WDP supports at most 64 items");
  if (active.size() != n) throw InvalidInput("active mask size mismatch");

  struct Option {
    std::uint64_t mask;
    double value;
  };
  std::vector<std::vector<Option>> opts(n);
  std::vector<double> best_single(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    for (const auto& r : reports[i].entries()) {
      if (r.bundle.is_empty() || r.value <= 0.0) continue;
      opts[i].push_back({r.bundle.to_mask(), r.value});
      best_single[i] = std::max(best_single[i], r.value);
    }
  }
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + best_single[i];

  std::vector<std::uint64_t> cur(n, 0), best_masks(n, 0);
  double best = 0.0;
  auto lex_smaller = [&](const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        bool x = (a[i] >> j) & 1U, y = (b[i] >> j) & 1U;
        if (x != y) return !x;
      }
    return false;
  };
  std::function<void(std::size_t, std::uint64_t, double)> dfs = [&](std::size_t i, std::uint64_t used, double val) {
    if (val + suffix[i] < best - kWelfareTol) return;
    if (i == n) {
      if (val > best + kWelfareTol || (std::abs(val - best) <= kWelfareTol && lex_smaller(cur, best_masks))) {
        best = val;
        best_masks = cur;
      }
      return;
    }
    cur[i] = 0;
    dfs(i + 1, used, val);
    for (const auto& o : opts[i]) {
      if (o.mask & used) continue;
      cur[i] = o.mask;
      dfs(i + 1, used | o.mask, val + o.value);
    }
    cur[i] = 0;
  };
  dfs(0, 0, 0.0);
  ReportedWdpResult res;
  res.allocation.reserve(n);
  for (auto mk : best_masks) res.allocation.push_back(Bundle::from_mask(mk, m));
  res.welfare = best;
  return res;
}

inline ReportedWdpResult reported_wdp(const ReportSet& reports) {
  return reported_wdp(reports, std::vector<bool>(reports.num_bidders(), true));
}

/// p_i = W(R_{-i}) - sum_{j != i} v_j((a*_R)_j), clamped at zero.
inline std::vector<double> vcg_payments(const ReportSet& reports) {
  const std::size_t n = reports.num_bidders();
  if (n == 0) throw InvalidInput("no bidders");
  const auto main = reported_wdp(reports);
  std::vector<double> pay(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> active(n, true);
    active[i] = false;
    const double without = reported_wdp(reports, active).welfare;
    double others = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) others += reports[j].value_of(main.allocation[j]).value_or(0.0);
    pay[i] = std::max(0.0, without - others);
  }
  return pay;
}

// ---------------------------------------------------------------------------
// Query generation.

enum class Acquisition { kUub, kMean, kExactUub, kRandom };

inline const char* to_string(Acquisition a) {
  switch (a) {
    case Acquisition::kUub: return "uub";
    case Acquisition::kMean: return "mean";
    case Acquisition::kExactUub: return "exact-uub";
    case Acquisition::kRandom: return "random";
  }
  return "unknown";
}

inline Acquisition parse_acquisition(std::string_view s) {
  if (s == "uub" || s == "boca") return Acquisition::kUub;
  if (s == "mean") return Acquisition::kMean;
  if (s == "exact-uub") return Acquisition::kExactUub;
  if (s == "random") return Acquisition::kRandom;
  throw InvalidInput("unknown acquisition: " + std::string(s));
}

/// Bundles a bidder may not be asked again: its reports, queries pending in
/// this round, and the empty bundle (known to be worth 0).
inline std::unordered_set<Bundle, BundleHash> known_bundles(const BidderReports& r, const std::vector<Bundle>* pending) {
  std::unordered_set<Bundle, BundleHash> s;
  s.insert(Bundle::empty(r.num_items()));
  for (const auto& e : r.entries()) s.insert(e.bundle);
  if (pending)
    for (const auto& b : *pending) s.insert(b);
  return s;
}

/// Solves the acquisition WDP restricted to `active` bidders. Inactive bidders get nothing.
inline Allocation solve_economy(const std::vector<bool>& active, std::span<const Valuation> acq, std::size_t m,
                                const SolverBudget& budget, const Exclusions* full_exclusions = nullptr) {
  const std::size_t n = acq.size();
  std::vector<Valuation> vals;
  std::vector<std::size_t> idx;
  Exclusions ex;
  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    idx.push_back(i);
    vals.push_back(acq[i]);
    ex.push_back(full_exclusions && !full_exclusions->empty() ? (*full_exclusions)[i]
                                                              : std::unordered_set<Bundle, BundleHash>{});
  }
  if (idx.empty()) throw InvalidInput("economy has no active bidder");
  auto sol = solve_wdp(vals, m, &ex, budget);
  if (sol.status == WdpStatus::kInfeasible) throw ExhaustedBidder("every bundle of some bidder was already queried");
  Allocation out = empty_allocation(n, m);
  for (std::size_t r = 0; r < idx.size(); ++r) out[idx[r]] = sol.allocation[r];
  return out;
}

/// New query for bidder i from one economy: the unrestricted candidate if it is
/// unknown to i, else the re-solve with i's known bundles excluded.
inline Bundle query_from_economy(std::size_t i, const std::vector<bool>& active, const Allocation& unrestricted,
                                 std::span<const Valuation> acq, const ReportSet& reports,
                                 const std::vector<Bundle>* pending, const SolverBudget& budget) {
  const auto known = known_bundles(reports[i], pending);
  if (!known.contains(unrestricted[i])) return unrestricted[i];
  const std::size_t m = reports.num_items();
  if (m < 64 && known.size() >= (std::size_t{1} << m))
    throw ExhaustedBidder("bidder " + std::to_string(i) + " has no unqueried bundle left");
  Exclusions ex(acq.size());
  ex[i] = known;
  return solve_economy(active, acq, m, budget, &ex)[i];
}

/// One new bundle per active bidder (unqueried by that bidder).
inline std::vector<std::optional<Bundle>> next_queries(const std::vector<bool>& active, const ReportSet& reports,
                                                       std::span<const Valuation> acq, const SolverBudget& budget) {
  const std::size_t n = reports.num_bidders();
  if (acq.size() != n || active.size() != n) throw InvalidInput("bidder count mismatch");
  const Allocation q = solve_economy(active, acq, reports.num_items(), budget);
  std::vector<std::optional<Bundle>> out(n);
  for (std::size_t i = 0; i < n; ++i)
    if (active[i]) out[i] = query_from_economy(i, active, q, acq, reports, nullptr, budget);
  return out;
}

/// Uniform draw among bundles the bidder has not been asked (empty excluded).
inline Bundle random_new_bundle(const BidderReports& r, const std::vector<Bundle>* pending, Rng& rng) {
  const std::size_t m = r.num_items();
  if (m > 64) throw UnsupportedSize("random queries support at most 64 items");
  const auto known = known_bundles(r, pending);
  if (m < 64 && known.size() >= (std::size_t{1} << m)) throw ExhaustedBidder("no unqueried bundle left");
  for (;;) {
    std::uint64_t mask = rng.next_u64();
    if (m < 64) mask &= (std::uint64_t{1} << m) - 1;
    Bundle b = Bundle::from_mask(mask, m);
    if (!known.contains(b)) return b;
  }
}

// ---------------------------------------------------------------------------
// The auction loop.

struct MechanismConfig {
  std::size_t Q_init = 6;
  std::size_t Q_max = 18;
  std::size_t Q_round = 3;
  Acquisition acquisition = Acquisition::kUub;
  NetworkConfig network{};
  SolverBudget budget{};
  std::uint64_t seed = 0;
  bool early_stop = true;
  std::size_t threads = 1;

  std::size_t rounds() const { return (Q_max - Q_init) / Q_round; }

  void validate(std::size_t m) const {
    if (Q_init < 1) throw InvalidInput("Q_init must be at least 1");
    if (Q_round < 2) throw InvalidInput("Q_round must be at least 2");
    if (Q_init + Q_round > Q_max) throw InvalidInput("need Q_init + Q_round <= Q_max");
    if (m < 64 && Q_max > (std::size_t{1} << m) - 1)
      throw InvalidInput("Q_max exceeds the number of non-empty bundles");
  }
};

struct RoundRecord {
  std::size_t round = 0;
  std::size_t queries_per_bidder = 0;
  double reported_welfare = 0.0;
  double efficiency_loss = 0.0;
};

struct AuctionOutcome {
  Allocation final_allocation;
  std::vector<double> payments;
  ReportSet reports;
  std::vector<RoundRecord> path;
  double efficiency_loss = 0.0;
  double relative_revenue = 0.0;
  double reported_welfare = 0.0;
  double social_welfare = 0.0;
  bool early_stopped = false;
};

/// Balanced choice of marginal economies: the k least-used, ties broken by a seeded shuffle.
inline std::vector<std::size_t> select_marginal_economies(std::vector<std::size_t>& counts, std::size_t k, Rng& rng) {
  const std::size_t n = counts.size();
  std::vector<std::size_t> ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(ord[i - 1], ord[rng.below(i)]);
  std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return counts[a] < counts[b]; });
  ord.resize(std::min(k, n));
  for (auto j : ord) ++counts[j];
  return ord;
}

/// Acquisition networks of one round, one per bidder.
inline std::vector<MvnnParams> train_acquisition(const ReportSet& reports, const MechanismConfig& cfg,
                                                 std::uint64_t round_seed) {
  const std::size_t n = reports.num_bidders();
  std::vector<MvnnParams> nets(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    const std::uint64_t s = Rng::mix(round_seed, i);
    switch (cfg.acquisition) {
      case Acquisition::kExactUub: nets[i] = build_exact_uub(reports[i]); break;
      case Acquisition::kMean:
        nets[i] = train_mean(reports[i], cfg.network.hidden, cfg.network.init, cfg.network.mean_train, s);
        break;
      case Acquisition::kUub: nets[i] = train_triple(reports[i], cfg.network, s).uub_net; break;
      case Acquisition::kRandom: break;
    }
  });
  return nets;
}

inline AuctionOutcome run_mlca(const AuctionInstance& inst, const MechanismConfig& cfg) {
  const std::size_t n = inst.n, m = inst.m;
  cfg.validate(m);
  Rng rng(Rng::mix(cfg.seed, 0xA0C));
  AuctionOutcome out;
  out.reports = ReportSet(n, m);
  auto& R = out.reports;

  // initial queries: the full bundle plus distinct random non-empty bundles
  for (std::size_t i = 0; i < n; ++i) {
    Rng brng(Rng::mix(cfg.seed, 100 + i));
    R[i].add(Bundle::full(m), inst.bidders[i].query(Bundle::full(m)));
    while (R[i].size() < cfg.Q_init) {
      Bundle b = random_new_bundle(R[i], nullptr, brng);
      R[i].add(b, inst.bidders[i].query(b));
    }
  }

  auto record = [&](std::size_t round) {
    const auto a = reported_wdp(R);
    RoundRecord rec;
    rec.round = round;
    rec.queries_per_bidder = R[0].size();
    rec.reported_welfare = a.welfare;
    rec.efficiency_loss = efficiency_loss(a.allocation, inst);
    out.path.push_back(rec);
    return rec.efficiency_loss;
  };

  double loss = record(0);
  std::vector<std::size_t> econ_counts(n, 0);
  const std::size_t rounds = cfg.rounds();
  for (std::size_t round = 1; round <= rounds; ++round) {
    if (cfg.early_stop && loss < kWelfareTol) {
      out.early_stopped = true;
      break;
    }
    const std::uint64_t round_seed = Rng::mix(cfg.seed, 1000 + round);
    std::vector<std::vector<Bundle>> pending(n);

    if (cfg.acquisition == Acquisition::kRandom) {
      Rng qrng(round_seed);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t q = 0; q < cfg.Q_round; ++q) pending[i].push_back(random_new_bundle(R[i], &pending[i], qrng));
    } else {
      const auto nets = train_acquisition(R, cfg, round_seed);
      std::vector<Valuation> acq;
      for (const auto& p : nets) acq.emplace_back([&p](const Bundle& x) { return forward(p, x); });

      Rng erng(Rng::mix(round_seed, 7));
      const auto global = select_marginal_economies(econ_counts, cfg.Q_round, erng);

      // economies: each selected marginal economy, then the main economy last
      std::vector<std::vector<bool>> econ;
      for (auto j : global) {
        std::vector<bool> a(n, true);
        a[j] = false;
        econ.push_back(std::move(a));
      }
      econ.emplace_back(n, true);
      std::vector<Allocation> unrestricted(econ.size());
      parallel_for(econ.size(), cfg.threads,
                   [&](std::size_t e) { unrestricted[e] = solve_economy(econ[e], acq, m, cfg.budget); });

      const std::size_t main = econ.size() - 1;
      for (std::size_t i = 0; i < n; ++i) {
        // Q_round - 1 marginal economies admissible for i, then the main economy.
        std::vector<std::size_t> plan;
        for (std::size_t e = 0; e < global.size() && plan.size() + 1 < cfg.Q_round; ++e)
          if (global[e] != i) plan.push_back(e);
        while (plan.size() + 1 < cfg.Q_round) plan.push_back(main);
        plan.push_back(main);
        for (auto e : plan)
          pending[i].push_back(query_from_economy(i, econ[e], unrestricted[e], acq, R, &pending[i], cfg.budget));
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& b : pending[i]) R[i].add(b, inst.bidders[i].query(b));
    loss = record(round);
  }

  const auto final_alloc = reported_wdp(R);
  out.final_allocation = final_alloc.allocation;
  out.reported_welfare = final_alloc.welfare;
  out.social_welfare = inst.welfare(final_alloc.allocation);
  out.efficiency_loss = efficiency_loss(final_alloc.allocation, inst);
  out.payments = vcg_payments(R);
  out.relative_revenue = relative_revenue(out.payments, inst.optimal_welfare);
  return out;
}

}  // namespace boca
