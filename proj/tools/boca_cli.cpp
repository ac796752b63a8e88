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

// Command-line front end: instance generation, network training, WDP solving,
// MILP export, single auctions and seeded experiments.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>
#include <spdlog/sinks/stdout_color_sinks.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "boca/boca.hpp"

namespace {

using boca::json;

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  std::size_t threads = 1;
};

void setup_logging() {
  // stdout carries results, so logs go to stderr
  spdlog::set_default_logger(spdlog::stderr_color_mt("boca"));
  const char* lvl = std::getenv("BOCA_LOG");
  spdlog::set_level(lvl ? spdlog::level::from_str(lvl) : spdlog::level::info);
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
}

/// Writes to --out when given, stdout otherwise.
void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
  } else {
    const auto parent = std::filesystem::path(g.out).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    boca::write_text_file(g.out, text);
    spdlog::info("wrote {}", g.out);
  }
}

/// Reports for one bidder: the full bundle plus k - 1 random bundles, valued truthfully.
boca::BidderReports sample_reports(const boca::ValueModel& v, std::size_t k, boca::Rng& rng) {
  const std::size_t m = v.num_items();
  boca::BidderReports r(m);
  r.add(boca::Bundle::full(m), v.query(boca::Bundle::full(m)));
  while (r.size() < k) {
    auto b = boca::random_new_bundle(r, nullptr, rng);
    r.add(b, v.query(b));
  }
  return r;
}

std::vector<boca::MvnnParams> read_networks(const std::string& path) {
  const json j = boca::read_json_file(path);
  const json& arr = j.is_array() ? j : j.at("networks");
  std::vector<boca::MvnnParams> nets;
  for (const auto& n : arr) nets.push_back(boca::params_from_json(n.contains("dims") ? n : n.at("uub")));
  if (nets.empty()) throw boca::InvalidInput("no networks in " + path);
  return nets;
}

boca::Exclusions read_exclusions(const std::string& path, std::size_t n) {
  boca::Exclusions ex(n);
  if (path.empty()) return ex;
  const json j = boca::read_json_file(path);
  if (j.size() != n) throw boca::InvalidInput("exclusions must list one array per bidder");
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& b : j.at(i)) ex[i].insert(boca::bundle_from_json(b));
  return ex;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"boca: combinatorial auctions with monotone-value networks"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "base random seed")->capture_default_str();
  app.add_option("--out", g.out, "output file or directory");
  app.add_option("--threads", g.threads, "worker threads")->capture_default_str()->check(CLI::Range(1, 256));

  // generate
  auto* gen = app.add_subcommand("generate", "generate a synthetic auction instance");
  boca::GeneratorConfig gcfg;
  std::string gen_config;
  gen->add_option("--n", gcfg.n, "bidders")->capture_default_str();
  gen->add_option("--m", gcfg.m, "items")->capture_default_str();
  gen->add_option("--config", gen_config, "generator config JSON")->check(CLI::ExistingFile);

  // train
  auto* tr = app.add_subcommand("train", "train mean/uUB/exact-uUB networks for one bidder");
  std::string tr_instance, tr_reports, tr_config;
  std::size_t tr_bidder = 0, tr_queries = 10;
  tr->add_option("--instance", tr_instance, "instance JSON")->required()->check(CLI::ExistingFile);
  tr->add_option("--bidder", tr_bidder)->capture_default_str();
  tr->add_option("--queries", tr_queries, "random truthful reports when --reports is absent")->capture_default_str();
  tr->add_option("--reports", tr_reports, "report set JSON")->check(CLI::ExistingFile);
  tr->add_option("--config", tr_config, "network config JSON")->check(CLI::ExistingFile);

  // solve-wdp and export-milp share inputs
  std::string wdp_nets, wdp_excl;
  double wdp_gap = 0.005, wdp_time = 600.0;
  auto* sw = app.add_subcommand("solve-wdp", "maximize the summed network values over allocations");
  sw->add_option("--networks", wdp_nets, "JSON array of networks")->required()->check(CLI::ExistingFile);
  sw->add_option("--exclusions", wdp_excl, "per-bidder excluded bundles")->check(CLI::ExistingFile);
  sw->add_option("--relative-gap", wdp_gap, "relative optimality gap")->capture_default_str();
  sw->add_option("--time-limit-secs", wdp_time, "seconds")->capture_default_str();
  bool no_prune = false;
  auto* em = app.add_subcommand("export-milp", "write the WDP as a CPLEX-LP file");
  em->add_option("--networks", wdp_nets, "JSON array of networks")->required()->check(CLI::ExistingFile);
  em->add_option("--exclusions", wdp_excl, "per-bidder excluded bundles")->check(CLI::ExistingFile);
  em->add_flag("--no-prune", no_prune, "keep every neuron's binaries");

  // run-mlca
  auto* rm = app.add_subcommand("run-mlca", "run one iterative auction; --out names a directory");
  std::string rm_instance, rm_config, rm_acq = "uub";
  rm->add_option("--instance", rm_instance, "instance JSON")->required()->check(CLI::ExistingFile);
  rm->add_option("--config", rm_config, "mechanism config JSON")->check(CLI::ExistingFile);
  rm->add_option("--acquisition", rm_acq, "uub | mean | exact-uub | random")->capture_default_str();

  // experiment
  auto* ex = app.add_subcommand("experiment", "seeded multi-instance comparison of arms");
  std::string ex_config;
  std::size_t ex_seeds = 20;
  ex->add_option("--config", ex_config, "experiment config JSON")->check(CLI::ExistingFile);
  ex->add_option("--seeds", ex_seeds, "seeds 0..k-1 when no config is given")->capture_default_str();

  // hpo-metric
  auto* hp = app.add_subcommand("hpo-metric", "quantile metric of a trained uUB network");
  std::string hp_instance, hp_config;
  std::size_t hp_bidder = 0, hp_train = 10, hp_test = 50;
  double hp_q = 0.9;
  hp->add_option("--instance", hp_instance, "instance JSON")->required()->check(CLI::ExistingFile);
  hp->add_option("--bidder", hp_bidder)->capture_default_str();
  hp->add_option("--train", hp_train, "training reports")->capture_default_str();
  hp->add_option("--test", hp_test, "test bundles")->capture_default_str();
  hp->add_option("--q", hp_q, "quantile")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  hp->add_option("--config", hp_config, "network config JSON")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (!gen_config.empty()) gcfg = boca::generator_from_json(boca::read_json_file(gen_config));
      const auto inst = boca::generate_instance(gcfg, g.seed);
      spdlog::info("instance n={} m={} optimal welfare {:.6f}", inst.n, inst.m, inst.optimal_welfare);
      emit(g, boca::instance_to_json(inst).dump(2) + "\n");
    } else if (tr->parsed()) {
      const auto inst = boca::instance_from_json(boca::read_json_file(tr_instance));
      if (tr_bidder >= inst.n) throw boca::InvalidInput("bidder index out of range");
      boca::NetworkConfig ncfg;
      if (!tr_config.empty()) ncfg = boca::network_from_json(boca::read_json_file(tr_config));
      boca::BidderReports reports(inst.m);
      if (!tr_reports.empty()) {
        reports = boca::reports_from_json(boca::read_json_file(tr_reports))[tr_bidder];
      } else {
        boca::Rng rng(boca::Rng::mix(g.seed, 17));
        reports = sample_reports(inst.bidders[tr_bidder], tr_queries, rng);
      }
      const auto t0 = std::chrono::steady_clock::now();
      const auto triple = boca::train_triple(reports, ncfg, g.seed);
      spdlog::info("trained on {} reports in {:.2f}s", reports.size(),
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      emit(g, boca::triple_to_json(triple, ncfg).dump(2) + "\n");
    } else if (sw->parsed()) {
      const auto nets = read_networks(wdp_nets);
      const std::size_t m = nets[0].num_inputs();
      std::vector<boca::Valuation> vals;
      for (const auto& p : nets) vals.emplace_back([&p](const boca::Bundle& x) { return boca::forward(p, x); });
      const auto excl = read_exclusions(wdp_excl, nets.size());
      const auto sol = boca::solve_wdp(vals, m, &excl, {wdp_gap, wdp_time});
      spdlog::info("status {} objective {:.9f} nodes {}", boca::to_string(sol.status), sol.objective, sol.nodes);
      const json j = {{"status", boca::to_string(sol.status)},
                      {"objective", sol.objective},
                      {"proven_gap", sol.proven_gap},
                      {"nodes", sol.nodes},
                      {"allocation", boca::allocation_to_json(sol.allocation)}};
      emit(g, j.dump(2) + "\n");
    } else if (em->parsed()) {
      const auto nets = read_networks(wdp_nets);
      const auto excl = read_exclusions(wdp_excl, nets.size());
      const auto md = boca::encode_milp(nets, &excl, {!no_prune});
      spdlog::info("{} variables, {} binaries, {} constraints", md.vars.size(), md.num_binaries(),
                   md.constraints.size());
      emit(g, boca::emit_lp_file(md));
    } else if (rm->parsed()) {
      const auto inst = boca::instance_from_json(boca::read_json_file(rm_instance));
      boca::MechanismConfig mc;
      if (!rm_config.empty()) mc = boca::mechanism_from_json(boca::read_json_file(rm_config));
      if (rm->count("--acquisition") || rm_config.empty()) mc.acquisition = boca::parse_acquisition(rm_acq);
      mc.seed = g.seed;
      mc.threads = g.threads;
      const auto out = boca::run_mlca(inst, mc);
      for (const auto& r : out.path)
        spdlog::info("round {} queries {} efficiency loss {:.4f}%", r.round, r.queries_per_bidder,
                     100.0 * r.efficiency_loss);
      std::ostringstream csv;
      csv << "round,queries,efficiency_loss,reported_welfare\n";
      for (const auto& r : out.path)
        csv << r.round << ',' << r.queries_per_bidder << ',' << boca::detail::csv_num(r.efficiency_loss) << ','
            << boca::detail::csv_num(r.reported_welfare) << '\n';
      if (g.out.empty()) {
        std::cout << boca::outcome_to_json(out).dump(2) << "\n";
      } else {
        std::filesystem::create_directories(g.out);
        boca::write_json_file((std::filesystem::path(g.out) / "outcome.json").string(), boca::outcome_to_json(out));
        boca::write_text_file((std::filesystem::path(g.out) / "path.csv").string(), csv.str());
        spdlog::info("wrote {}/outcome.json and path.csv", g.out);
      }
    } else if (ex->parsed()) {
      boca::ExperimentConfig ec;
      if (!ex_config.empty()) {
        ec = boca::experiment_from_json(boca::read_json_file(ex_config));
      } else {
        ec = boca::default_experiment(ex_seeds);
        for (auto& s : ec.seeds) s += g.seed;
      }
      if (!g.out.empty()) ec.out_dir = g.out;
      ec.threads = g.threads;
      const auto t0 = std::chrono::steady_clock::now();
      const auto rep = boca::run_experiment(ec);
      spdlog::info("{} runs ({} resumed) in {:.1f}s", ec.arms.size() * ec.seeds.size(), rep.resumed,
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      std::cout << boca::results_csv(rep) << boca::ttest_csv(rep);
    } else if (hp->parsed()) {
      const auto inst = boca::instance_from_json(boca::read_json_file(hp_instance));
      if (hp_bidder >= inst.n) throw boca::InvalidInput("bidder index out of range");
      boca::NetworkConfig ncfg;
      if (!hp_config.empty()) ncfg = boca::network_from_json(boca::read_json_file(hp_config));
      boca::Rng rng(boca::Rng::mix(g.seed, 23));
      const auto& v = inst.bidders[hp_bidder];
      const auto train = sample_reports(v, hp_train, rng);
      // test bundles are drawn from those not used for training
      std::vector<boca::Bundle> pending;
      for (std::size_t k = 0; k < hp_test; ++k) pending.push_back(boca::random_new_bundle(train, &pending, rng));
      boca::Dataset test;
      test.X = boca::bundles_to_matrix(pending, inst.m);
      test.y.resize(static_cast<Eigen::Index>(pending.size()));
      for (std::size_t k = 0; k < pending.size(); ++k) test.y(static_cast<Eigen::Index>(k)) = v.query(pending[k]);
      const auto triple = boca::train_triple(train, ncfg, g.seed);
      const double metric = boca::hpo_metric(triple.uub_net, boca::Dataset::from_reports(train), test, hp_q);
      emit(g, json{{"q", hp_q}, {"metric", metric}}.dump(2) + "\n");
    }
  } catch (const boca::Error& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const json::exception& e) {
    spdlog::error("malformed input: {}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("unexpected: {}", e.what());
    return 3;
  }
  return 0;
}
