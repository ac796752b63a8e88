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

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "boca/bundle.hpp"
#include "boca/error.hpp"
#include "boca/mechanism.hpp"
#include "boca/mvnn.hpp"
#include "boca/nomu.hpp"
#include "boca/value_model.hpp"

namespace boca {

using json = nlohmann::json;

inline json bundle_to_json(const Bundle& b) {
  json a = json::array();
  for (auto x : b.bits()) a.push_back(static_cast<int>(x));
  return a;
}

inline Bundle bundle_from_json(const json& j) {
  if (!j.is_array()) throw InvalidInput("bundle must be an array of 0/1");
  std::vector<int> bits;
  for (const auto& v : j) bits.push_back(v.get<int>());
  return Bundle(std::span<const int>(bits));
}

inline json allocation_to_json(const Allocation& a) {
  json out = json::array();
  for (const auto& b : a) out.push_back(bundle_to_json(b));
  return out;
}

inline Allocation allocation_from_json(const json& j) {
  Allocation a;
  for (const auto& b : j) a.push_back(bundle_from_json(b));
  return a;
}

// --- value models -----------------------------------------------------------

inline json model_to_json(const ValueModel& v) {
  json p;
  p["base"] = v.base_values();
  json syn = json::array();
  for (const auto& s : v.synergy()) syn.push_back({s.a, s.b, s.weight});
  p["synergy"] = syn;
  json reg = json::array();
  for (const auto& r : v.regions()) reg.push_back({{"weight", r.weight}, {"coeffs", r.coeffs}});
  p["regions"] = reg;
  p["normalizer"] = v.normalizer();
  return {{"type", to_string(v.kind())}, {"params", p}};
}

inline ValueModel model_from_json(const json& j) {
  const ValueKind kind = parse_value_kind(j.at("type").get<std::string>());
  const json& p = j.at("params");
  auto base = p.at("base").get<std::vector<double>>();
  switch (kind) {
    case ValueKind::kAdditive: return ValueModel::additive(std::move(base));
    case ValueKind::kPairwiseSynergy: {
      std::vector<Synergy> syn;
      for (const auto& s : p.value("synergy", json::array()))
        syn.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>(), s.at(2).get<double>()});
      return ValueModel::pairwise(std::move(base), std::move(syn));
    }
    case ValueKind::kCoverage: {
      std::vector<CoverageRegion> regs;
      for (const auto& r : p.value("regions", json::array()))
        regs.push_back({r.at("weight").get<double>(), r.at("coeffs").get<std::vector<double>>()});
      return ValueModel::coverage(std::move(base), std::move(regs));
    }
  }
  throw InvalidInput("unknown value model kind");
}

inline json generator_to_json(const GeneratorConfig& c) {
  json mix = json::array();
  for (auto k : c.type_mix) mix.push_back(to_string(k));
  return {{"n", c.n},
          {"m", c.m},
          {"type_mix", mix},
          {"cyclic", c.cyclic},
          {"interest_lo", c.interest_lo},
          {"interest_hi", c.interest_hi},
          {"off_interest_scale", c.off_interest_scale},
          {"synergy_density", c.synergy_density},
          {"synergy_scale", c.synergy_scale},
          {"coverage_regions", c.coverage_regions}};
}

inline GeneratorConfig generator_from_json(const json& j) {
  GeneratorConfig c;
  c.n = j.value("n", c.n);
  c.m = j.value("m", c.m);
  if (j.contains("type_mix")) {
    c.type_mix.clear();
    for (const auto& s : j.at("type_mix")) c.type_mix.push_back(parse_value_kind(s.get<std::string>()));
  }
  c.cyclic = j.value("cyclic", c.cyclic);
  c.interest_lo = j.value("interest_lo", c.interest_lo);
  c.interest_hi = j.value("interest_hi", c.interest_hi);
  c.off_interest_scale = j.value("off_interest_scale", c.off_interest_scale);
  c.synergy_density = j.value("synergy_density", c.synergy_density);
  c.synergy_scale = j.value("synergy_scale", c.synergy_scale);
  c.coverage_regions = j.value("coverage_regions", c.coverage_regions);
  c.validate();
  return c;
}

inline json instance_to_json(const AuctionInstance& inst) {
  json bidders = json::array();
  for (const auto& b : inst.bidders) bidders.push_back(model_to_json(b));
  return {{"n", inst.n},
          {"m", inst.m},
          {"seed", inst.seed},
          {"bidders", bidders},
          {"optimal_allocation", allocation_to_json(inst.optimal_allocation)},
          {"optimal_welfare", inst.optimal_welfare}};
}

/// The cached optimum is recomputed when absent.
inline AuctionInstance instance_from_json(const json& j) {
  AuctionInstance inst;
  inst.n = j.at("n").get<std::size_t>();
  inst.m = j.at("m").get<std::size_t>();
  inst.seed = j.value("seed", std::uint64_t{0});
  for (const auto& b : j.at("bidders")) inst.bidders.push_back(model_from_json(b));
  if (inst.n < 1 || inst.m < 1 || inst.bidders.size() != inst.n) throw InvalidInput("instance shape mismatch");
  for (const auto& b : inst.bidders)
    if (b.num_items() != inst.m) throw InvalidInput("bidder item count mismatch");
  if (j.contains("optimal_allocation")) {
    inst.optimal_allocation = allocation_from_json(j.at("optimal_allocation"));
    inst.optimal_welfare = inst.welfare(inst.optimal_allocation);
  } else {
    compute_optimum(inst);
  }
  return inst;
}

// --- networks ----------------------------------------------------------------

inline json params_to_json(const MvnnParams& p) {
  json w = json::array(), b = json::array(), t = json::array();
  for (const auto& W : p.weights) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(W.cols()));
      for (Eigen::Index c = 0; c < W.cols(); ++c) row[static_cast<std::size_t>(c)] = W(r, c);
      rows.push_back(row);
    }
    w.push_back(rows);
  }
  for (const auto& v : p.biases) b.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  for (const auto& v : p.cutoffs) t.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  json j = {{"dims", p.dims}, {"weights", w}, {"biases", b}, {"cutoffs", t}};
  j["skip"] = p.skip ? json(std::vector<double>(p.skip->data(), p.skip->data() + p.skip->size())) : json(nullptr);
  return j;
}

inline MvnnParams params_from_json(const json& j) {
  MvnnParams p;
  p.dims = j.at("dims").get<std::vector<std::size_t>>();
  for (const auto& rows : j.at("weights")) {
    const auto nr = static_cast<Eigen::Index>(rows.size());
    const auto nc = nr ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
    Eigen::MatrixXd W(nr, nc);
    for (Eigen::Index r = 0; r < nr; ++r) {
      auto row = rows.at(static_cast<std::size_t>(r)).get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != nc) throw InvalidInput("ragged weight matrix");
      for (Eigen::Index c = 0; c < nc; ++c) W(r, c) = row[static_cast<std::size_t>(c)];
    }
    p.weights.push_back(std::move(W));
  }
  for (const auto& v : j.at("biases")) {
    auto d = v.get<std::vector<double>>();
    p.biases.emplace_back(Eigen::Map<Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size())));
  }
  for (const auto& v : j.at("cutoffs")) {
    auto d = v.get<std::vector<double>>();
    p.cutoffs.emplace_back(Eigen::Map<Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size())));
  }
  if (j.contains("skip") && !j.at("skip").is_null()) {
    auto d = j.at("skip").get<std::vector<double>>();
    p.skip = Eigen::Map<Eigen::RowVectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
  }
  validate(p);
  return p;
}

// --- reports -----------------------------------------------------------------

inline json reports_to_json(const ReportSet& r) {
  json bidders = json::array();
  for (std::size_t i = 0; i < r.num_bidders(); ++i) {
    json list = json::array();
    for (const auto& e : r[i].entries()) list.push_back({{"bundle", bundle_to_json(e.bundle)}, {"value", e.value}});
    bidders.push_back(list);
  }
  return {{"n", r.num_bidders()}, {"m", r.num_items()}, {"bidders", bidders}};
}

inline ReportSet reports_from_json(const json& j) {
  ReportSet r(j.at("n").get<std::size_t>(), j.at("m").get<std::size_t>());
  const auto& bidders = j.at("bidders");
  if (bidders.size() != r.num_bidders()) throw InvalidInput("report bidder count mismatch");
  for (std::size_t i = 0; i < r.num_bidders(); ++i)
    for (const auto& e : bidders.at(i)) r[i].add(bundle_from_json(e.at("bundle")), e.at("value").get<double>());
  return r;
}

// --- hyperparameters ---------------------------------------------------------

inline json init_to_json(const InitHyper& h) {
  return {{"E_init", h.E_init}, {"V_init", h.V_init}, {"B_init", h.B_init}, {"Bias_init", h.Bias_init},
          {"eps_little", h.eps_little}};
}

inline InitHyper init_from_json(const json& j) {
  InitHyper h;
  h.E_init = j.value("E_init", h.E_init);
  h.V_init = j.value("V_init", h.V_init);
  h.B_init = j.value("B_init", h.B_init);
  h.Bias_init = j.value("Bias_init", h.Bias_init);
  h.eps_little = j.value("eps_little", h.eps_little);
  h.validate();
  return h;
}

inline json train_to_json(const TrainHyper& h) {
  return {{"learning_rate", h.learning_rate},   {"l2_lambda", h.l2_lambda},
          {"epochs", h.epochs},                 {"batch_size", h.batch_size},
          {"dropout_p", h.dropout_p},           {"dropout_decay", h.dropout_decay},
          {"clip_grad_norm", h.clip_grad_norm}, {"smooth_l1_beta", h.smooth_l1_beta},
          {"trainable_cutoffs", h.trainable_cutoffs},
          {"cutoff_init_range", {h.cutoff_init.lo, h.cutoff_init.hi}},
          {"retrain_r2", h.retrain_r2}};
}

inline TrainHyper train_from_json(const json& j, TrainHyper h = {}) {
  h.learning_rate = j.value("learning_rate", h.learning_rate);
  h.l2_lambda = j.value("l2_lambda", h.l2_lambda);
  h.epochs = j.value("epochs", h.epochs);
  h.batch_size = j.value("batch_size", h.batch_size);
  h.dropout_p = j.value("dropout_p", h.dropout_p);
  h.dropout_decay = j.value("dropout_decay", h.dropout_decay);
  h.clip_grad_norm = j.value("clip_grad_norm", h.clip_grad_norm);
  h.smooth_l1_beta = j.value("smooth_l1_beta", h.smooth_l1_beta);
  h.trainable_cutoffs = j.value("trainable_cutoffs", h.trainable_cutoffs);
  if (j.contains("cutoff_init_range")) {
    const auto& r = j.at("cutoff_init_range");
    h.cutoff_init = {r.at(0).get<double>(), r.at(1).get<double>()};
  }
  h.retrain_r2 = j.value("retrain_r2", h.retrain_r2);
  h.validate();
  return h;
}

inline json nomu_to_json(const NomuHyper& h) {
  return {{"mu_sqr", h.mu_sqr}, {"mu_exp", h.mu_exp},   {"c_exp", h.c_exp},
          {"pi_uub", h.pi_uub}, {"pi_mean", h.pi_mean}, {"n_art", h.n_art},
          {"loss_variant", to_string(h.variant)}};
}

inline NomuHyper nomu_from_json(const json& j) {
  NomuHyper h;
  h.mu_sqr = j.value("mu_sqr", h.mu_sqr);
  h.mu_exp = j.value("mu_exp", h.mu_exp);
  h.c_exp = j.value("c_exp", h.c_exp);
  h.pi_uub = j.value("pi_uub", h.pi_uub);
  h.pi_mean = j.value("pi_mean", h.pi_mean);
  h.n_art = j.value("n_art", h.n_art);
  if (j.contains("loss_variant")) h.variant = parse_nomu_variant(j.at("loss_variant").get<std::string>());
  h.validate();
  return h;
}

inline json network_to_json(const NetworkConfig& c) {
  return {{"hidden", c.hidden},
          {"init", init_to_json(c.init)},
          {"mean_train", train_to_json(c.mean_train)},
          {"uub_train", train_to_json(c.uub_train)},
          {"nomu", nomu_to_json(c.nomu)}};
}

inline NetworkConfig network_from_json(const json& j, NetworkConfig c = {}) {
  if (j.contains("hidden")) c.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  if (j.contains("init")) c.init = init_from_json(j.at("init"));
  if (j.contains("mean_train")) c.mean_train = train_from_json(j.at("mean_train"), c.mean_train);
  if (j.contains("uub_train")) c.uub_train = train_from_json(j.at("uub_train"), c.uub_train);
  if (j.contains("nomu")) c.nomu = nomu_from_json(j.at("nomu"));
  return c;
}

inline json triple_to_json(const UubTriple& t, const NetworkConfig& cfg) {
  return {{"mean", params_to_json(t.mean_net)},
          {"uub", params_to_json(t.uub_net)},
          {"exact_uub", params_to_json(t.exact_uub_net)},
          {"hyper", network_to_json(cfg)}};
}

inline json mechanism_to_json(const MechanismConfig& c) {
  return {{"Q_init", c.Q_init},
          {"Q_max", c.Q_max},
          {"Q_round", c.Q_round},
          {"acquisition", to_string(c.acquisition)},
          {"network", network_to_json(c.network)},
          {"relative_gap", c.budget.relative_gap},
          {"time_limit_secs", c.budget.time_limit_secs},
          {"seed", c.seed},
          {"early_stop", c.early_stop}};
}

inline MechanismConfig mechanism_from_json(const json& j, MechanismConfig c = {}) {
  c.Q_init = j.value("Q_init", c.Q_init);
  c.Q_max = j.value("Q_max", c.Q_max);
  c.Q_round = j.value("Q_round", c.Q_round);
  if (j.contains("acquisition")) c.acquisition = parse_acquisition(j.at("acquisition").get<std::string>());
  if (j.contains("network")) c.network = network_from_json(j.at("network"), c.network);
  c.budget.relative_gap = j.value("relative_gap", c.budget.relative_gap);
  c.budget.time_limit_secs = j.value("time_limit_secs", c.budget.time_limit_secs);
  c.seed = j.value("seed", c.seed);
  c.early_stop = j.value("early_stop", c.early_stop);
  return c;
}

inline json outcome_to_json(const AuctionOutcome& o) {
  json path = json::array();
  for (const auto& r : o.path)
    path.push_back({{"round", r.round},
                    {"queries", r.queries_per_bidder},
                    {"reported_welfare", r.reported_welfare},
                    {"efficiency_loss", r.efficiency_loss}});
  return {{"final_allocation", allocation_to_json(o.final_allocation)},
          {"payments", o.payments},
          {"efficiency_loss", o.efficiency_loss},
          {"relative_revenue", o.relative_revenue},
          {"reported_welfare", o.reported_welfare},
          {"social_welfare", o.social_welfare},
          {"early_stopped", o.early_stopped},
          {"path", path},
          {"reports", reports_to_json(o.reports)}};
}

// --- files -------------------------------------------------------------------

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput("malformed JSON in " + path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
}

inline void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace boca
