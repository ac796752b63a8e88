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

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "boca/error.hpp"
#include "boca/io.hpp"
#include "boca/mechanism.hpp"
#include "boca/mvnn.hpp"
#include "boca/train.hpp"
#include "boca/value_model.hpp"

namespace boca {

// ---------------------------------------------------------------------------
// Hyperparameter-search metric.

/// Pinball loss on the test points plus MAE on the training points.
inline double hpo_metric(const Eigen::VectorXd& pred_train, const Eigen::VectorXd& y_train,
                         const Eigen::VectorXd& pred_test, const Eigen::VectorXd& y_test, double q) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidInput("quantile must lie in (0, 1)");
  if (y_train.size() == 0 || y_test.size() == 0) throw InvalidInput("hpo_metric needs non-empty train and test sets");
  if (pred_train.size() != y_train.size() || pred_test.size() != y_test.size())
    throw InvalidInput("prediction and target sizes differ");
  double pinball = 0.0;
  for (Eigen::Index i = 0; i < y_test.size(); ++i) {
    const double r = y_test(i) - pred_test(i);
    pinball += std::max(r * q, -r * (1.0 - q));
  }
  const double mae = (pred_train - y_train).cwiseAbs().mean();
  return pinball / static_cast<double>(y_test.size()) + mae;
}

inline double hpo_metric(const MvnnParams& uub, const Dataset& train, const Dataset& test, double q) {
  if (train.size() == 0 || test.size() == 0) throw InvalidInput("hpo_metric needs non-empty train and test sets");
  const Eigen::VectorXd pt = forward_batch(uub, train.X).transpose();
  const Eigen::VectorXd ps = forward_batch(uub, test.X).transpose();
  return hpo_metric(pt, train.y, ps, test.y, q);
}

// ---------------------------------------------------------------------------
// Statistics.

struct Summary {
  std::size_t k = 0;
  double mean = 0.0;
  double sd = 0.0;       ///< sample standard deviation (k - 1)
  double ci_half = 0.0;  ///< 1.96 sd / sqrt(k)
};

inline Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.k = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(s.k);
  if (s.k > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.k - 1));
  }
  s.ci_half = 1.96 * s.sd / std::sqrt(static_cast<double>(s.k));
  return s;
}

struct TTestResult {
  double mean_diff = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  bool degenerate = false;
};

/// Paired one-sided test of H1: mean(a - b) < 0.
/// Zero spread in the differences leaves t undefined; p is then 1 and the flag set.
inline TTestResult paired_t_test_less(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvalidInput("paired samples differ in length");
  if (a.size() < 2) throw InvalidInput("paired t-test needs at least two pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const Summary s = summarize(d);
  TTestResult r;
  r.mean_diff = s.mean;
  r.df = static_cast<double>(s.k - 1);
  if (!(s.sd > 0.0)) {
    r.degenerate = true;
    r.p_value = 1.0;
    return r;
  }
  r.t = s.mean / (s.sd / std::sqrt(static_cast<double>(s.k)));
  boost::math::students_t dist(r.df);
  r.p_value = boost::math::cdf(dist, r.t);
  return r;
}

// ---------------------------------------------------------------------------
// Experiments.

struct ExperimentArm {
  std::string name;
  MechanismConfig mechanism;
};

struct ExperimentConfig {
  GeneratorConfig generator{};
  std::vector<ExperimentArm> arms;
  std::vector<std::uint64_t> seeds;
  std::string out_dir = "out";
  double quantile = 0.9;
  std::size_t threads = 1;

  void validate() const {
    if (seeds.empty()) throw InvalidInput("experiment needs at least one seed");
    if (arms.empty()) throw InvalidInput("experiment needs at least one arm");
    for (std::size_t i = 0; i < arms.size(); ++i) {
      if (arms[i].name.empty()) throw InvalidInput("arm names must be non-empty");
      for (std::size_t j = 0; j < i; ++j)
        if (arms[j].name == arms[i].name) throw InvalidInput("duplicate arm name " + arms[i].name);
      arms[i].mechanism.validate(generator.m);
    }
    if (!(quantile > 0.0 && quantile < 1.0)) throw InvalidInput("quantile must lie in (0, 1)");
    generator.validate();
  }
};

struct SeedResult {
  std::uint64_t seed = 0;
  double efficiency_loss = 0.0;
  double relative_revenue = 0.0;
  std::vector<double> path;  ///< efficiency loss after each round, round 0 first
  bool early_stopped = false;
};

struct ArmReport {
  std::string name;
  Summary efficiency_loss;
  Summary relative_revenue;
  std::vector<SeedResult> runs;  ///< in seed order
  std::vector<Summary> path;     ///< per round
};

struct PairwiseTest {
  std::string arm_a, arm_b;
  TTestResult test;
};

struct ExperimentReport {
  std::vector<ArmReport> arms;
  std::vector<PairwiseTest> tests;  ///< ordered pairs, H1: arm_a has lower loss
  std::size_t resumed = 0;          ///< runs loaded from disk instead of recomputed
};

namespace detail {

inline std::string csv_num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline json seed_result_to_json(const SeedResult& r) {
  return {{"seed", r.seed},
          {"efficiency_loss", r.efficiency_loss},
          {"relative_revenue", r.relative_revenue},
          {"path", r.path},
          {"early_stopped", r.early_stopped}};
}

inline SeedResult seed_result_from_json(const json& j) {
  SeedResult r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.efficiency_loss = j.at("efficiency_loss").get<double>();
  r.relative_revenue = j.at("relative_revenue").get<double>();
  r.path = j.at("path").get<std::vector<double>>();
  r.early_stopped = j.value("early_stopped", false);
  return r;
}

/// Configuration fingerprint stored alongside each run so stale files are not reused.
inline std::string run_fingerprint(const GeneratorConfig& g, const MechanismConfig& m) {
  json j = {{"generator", generator_to_json(g)}, {"mechanism", mechanism_to_json(m)}};
  return j.dump();
}

}  // namespace detail

inline std::string run_file_path(const ExperimentConfig& cfg, const std::string& arm, std::uint64_t seed) {
  return (std::filesystem::path(cfg.out_dir) / "runs" / (arm + "_seed" + std::to_string(seed) + ".json")).string();
}

/// One seeded run of one arm. The instance depends only on the seed, and the
/// mechanism seed is shared across arms so runs are paired.
inline SeedResult run_single(const ExperimentConfig& cfg, const ExperimentArm& arm, std::uint64_t seed) {
  const AuctionInstance inst = generate_instance(cfg.generator, seed);
  MechanismConfig mc = arm.mechanism;
  mc.seed = seed;
  const AuctionOutcome out = run_mlca(inst, mc);
  SeedResult r;
  r.seed = seed;
  r.efficiency_loss = out.efficiency_loss;
  r.relative_revenue = out.relative_revenue;
  r.early_stopped = out.early_stopped;
  for (const auto& rec : out.path) r.path.push_back(rec.efficiency_loss);
  return r;
}

/// Table of arms: mean loss and revenue with normal 95% half-widths, in percent.
inline std::string results_csv(const ExperimentReport& rep) {
  std::ostringstream os;
  os << "arm,k,efficiency_loss_pct,efficiency_loss_ci_pct,relative_revenue_pct,relative_revenue_ci_pct\n";
  for (const auto& a : rep.arms)
    os << a.name << ',' << a.efficiency_loss.k << ',' << detail::csv_num(100.0 * a.efficiency_loss.mean) << ','
       << detail::csv_num(100.0 * a.efficiency_loss.ci_half) << ','
       << detail::csv_num(100.0 * a.relative_revenue.mean) << ','
       << detail::csv_num(100.0 * a.relative_revenue.ci_half) << '\n';
  return os.str();
}

inline std::string ttest_csv(const ExperimentReport& rep) {
  std::ostringstream os;
  os << "arm_a,arm_b,mean_diff_pct,t,df,p_value,degenerate\n";
  for (const auto& t : rep.tests)
    os << t.arm_a << ',' << t.arm_b << ',' << detail::csv_num(100.0 * t.test.mean_diff) << ','
       << detail::csv_num(t.test.t) << ',' << detail::csv_num(t.test.df) << ',' << detail::csv_num(t.test.p_value)
       << ',' << (t.test.degenerate ? 1 : 0) << '\n';
  return os.str();
}

inline std::string per_seed_csv(const ExperimentReport& rep) {
  std::ostringstream os;
  os << "arm,seed,efficiency_loss,relative_revenue,early_stopped\n";
  for (const auto& a : rep.arms)
    for (const auto& r : a.runs)
      os << a.name << ',' << r.seed << ',' << detail::csv_num(r.efficiency_loss) << ','
         << detail::csv_num(r.relative_revenue) << ',' << (r.early_stopped ? 1 : 0) << '\n';
  return os.str();
}

/// Round-by-round loss for one arm; columns suit gnuplot's `using 1:3:4`.
inline std::string path_csv(const ArmReport& a, std::size_t q_init, std::size_t q_round) {
  std::ostringstream os;
  os << "round,queries,efficiency_loss_pct,ci_pct\n";
  for (std::size_t r = 0; r < a.path.size(); ++r)
    os << r << ',' << (q_init + r * q_round) << ',' << detail::csv_num(100.0 * a.path[r].mean) << ','
       << detail::csv_num(100.0 * a.path[r].ci_half) << '\n';
  return os.str();
}

/// Runs every (arm, seed) pair, reusing finished runs found under out_dir/runs.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(cfg.out_dir) / "runs");
  fs::create_directories(fs::path(cfg.out_dir) / "paths");

  const std::size_t na = cfg.arms.size(), ns = cfg.seeds.size();
  std::vector<SeedResult> results(na * ns);
  std::vector<char> loaded(na * ns, 0);

  parallel_for(na * ns, cfg.threads, [&](std::size_t job) {
    const ExperimentArm& arm = cfg.arms[job / ns];
    const std::uint64_t seed = cfg.seeds[job % ns];
    const std::string path = run_file_path(cfg, arm.name, seed);
    MechanismConfig mc = arm.mechanism;
    mc.seed = seed;
    mc.threads = 1;
    const std::string fp = detail::run_fingerprint(cfg.generator, mc);
    if (fs::exists(path)) {
      try {
        const json j = read_json_file(path);
        if (j.value("fingerprint", std::string{}) == fp) {
          results[job] = detail::seed_result_from_json(j.at("result"));
          loaded[job] = 1;
          return;
        }
      } catch (const std::exception&) {
        // unreadable partial file: recompute
      }
    }
    ExperimentArm single{arm.name, mc};
    results[job] = run_single(cfg, single, seed);
    const std::string tmp = path + ".tmp";
    write_json_file(tmp, {{"fingerprint", fp}, {"arm", arm.name}, {"result", detail::seed_result_to_json(results[job])}});
    fs::rename(tmp, path);
  });

  ExperimentReport rep;
  for (char c : loaded) rep.resumed += static_cast<std::size_t>(c);
  for (std::size_t a = 0; a < na; ++a) {
    ArmReport ar;
    ar.name = cfg.arms[a].name;
    std::vector<double> loss, rev;
    std::size_t rounds = 0;
    for (std::size_t s = 0; s < ns; ++s) {
      const SeedResult& r = results[a * ns + s];
      ar.runs.push_back(r);
      loss.push_back(r.efficiency_loss);
      rev.push_back(r.relative_revenue);
      rounds = std::max(rounds, r.path.size());
    }
    ar.efficiency_loss = summarize(loss);
    ar.relative_revenue = summarize(rev);
    // Early-stopped runs hold their last value for the remaining rounds.
    for (std::size_t k = 0; k < rounds; ++k) {
      std::vector<double> col;
      for (const auto& r : ar.runs)
        if (!r.path.empty()) col.push_back(r.path[std::min(k, r.path.size() - 1)]);
      ar.path.push_back(summarize(col));
    }
    rep.arms.push_back(std::move(ar));
  }
  if (ns >= 2)
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t b = 0; b < na; ++b) {
        if (a == b) continue;
        std::vector<double> xa, xb;
        for (const auto& r : rep.arms[a].runs) xa.push_back(r.efficiency_loss);
        for (const auto& r : rep.arms[b].runs) xb.push_back(r.efficiency_loss);
        rep.tests.push_back({rep.arms[a].name, rep.arms[b].name, paired_t_test_less(xa, xb)});
      }

  const fs::path out(cfg.out_dir);
  write_text_file((out / "results.csv").string(), results_csv(rep));
  write_text_file((out / "ttest.csv").string(), ttest_csv(rep));
  write_text_file((out / "per_seed.csv").string(), per_seed_csv(rep));
  for (std::size_t a = 0; a < na; ++a)
    write_text_file((out / "paths" / (rep.arms[a].name + ".csv")).string(),
                    path_csv(rep.arms[a], cfg.arms[a].mechanism.Q_init, cfg.arms[a].mechanism.Q_round));
  return rep;
}

inline json experiment_to_json(const ExperimentConfig& c) {
  json arms = json::array();
  for (const auto& a : c.arms) arms.push_back({{"name", a.name}, {"mechanism", mechanism_to_json(a.mechanism)}});
  return {{"generator", generator_to_json(c.generator)},
          {"arms", arms},
          {"seeds", c.seeds},
          {"out_dir", c.out_dir},
          {"quantile", c.quantile},
          {"threads", c.threads}};
}

inline ExperimentConfig experiment_from_json(const json& j) {
  ExperimentConfig c;
  if (j.contains("generator")) c.generator = generator_from_json(j.at("generator"));
  for (const auto& a : j.at("arms")) {
    MechanismConfig mc = mechanism_from_json(a.value("mechanism", json::object()));
    c.arms.push_back({a.at("name").get<std::string>(), mc});
  }
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.out_dir = j.value("out_dir", c.out_dir);
  c.quantile = j.value("quantile", c.quantile);
  c.threads = j.value("threads", c.threads);
  return c;
}

/// Seeds 0..k-1 with one arm per acquisition kind.
inline ExperimentConfig default_experiment(std::size_t k, const MechanismConfig& base = {}) {
  ExperimentConfig c;
  for (std::size_t s = 0; s < k; ++s) c.seeds.push_back(s);
  for (Acquisition a : {Acquisition::kUub, Acquisition::kMean, Acquisition::kRandom}) {
    MechanismConfig mc = base;
    mc.acquisition = a;
    c.arms.push_back({to_string(a), mc});
  }
  return c;
}

}  // namespace boca
