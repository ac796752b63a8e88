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
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "boca/bundle.hpp"
#include "boca/error.hpp"
#include "boca/mvnn.hpp"
#include "boca/wdp.hpp"

namespace boca {

/// Pre-activation box of every hidden layer, from propagating the empty and full bundles.
struct LayerBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

inline std::vector<LayerBounds> box_bounds(const MvnnParams& p) {
  validate(p);
  const std::size_t m = p.num_inputs();
  auto lo = trace(p, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m)));
  auto hi = trace(p, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m)));
  std::vector<LayerBounds> out;
  for (std::size_t k = 0; k < lo.pre.size(); ++k) out.push_back({lo.pre[k], hi.pre[k]});
  return out;
}

enum class VarType : std::uint8_t { kContinuous, kBinary };
enum class Sense : std::uint8_t { kLe, kGe, kEq };

struct Variable {
  std::string name;
  VarType type = VarType::kContinuous;
  double lb = 0.0;
  double ub = 0.0;
};

struct Term {
  std::size_t var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::kLe;
  double rhs = 0.0;
};

/// How the box bounds simplified a neuron. kActive keeps both binaries.
enum class PruneCase : std::uint8_t { kActive, kConstCutoff, kConstZero, kIdentity, kAlphaFixed, kBetaFixed };

inline const char* to_string(PruneCase c) {
  switch (c) {
    case PruneCase::kActive: return "active";
    case PruneCase::kConstCutoff: return "case1-const-t";
    case PruneCase::kConstZero: return "case2-const-0";
    case PruneCase::kIdentity: return "case3-identity";
    case PruneCase::kAlphaFixed: return "case4-alpha-1";
    case PruneCase::kBetaFixed: return "case5-beta-0";
  }
  return "unknown";
}

inline PruneCase classify_neuron(double l, double u, double t) {
  if (t < l) return PruneCase::kConstCutoff;
  if (u < 0.0) return PruneCase::kConstZero;
  if (0.0 <= l && u <= t) return PruneCase::kIdentity;
  if (0.0 <= l && l <= t && t < u) return PruneCase::kAlphaFixed;
  if (l <= 0.0 && 0.0 < u && u <= t) return PruneCase::kBetaFixed;
  return PruneCase::kActive;
}

struct NeuronInfo {
  std::size_t bidder = 0, layer = 0, index = 0;  ///< layer is 1-based
  PruneCase prune = PruneCase::kActive;
  double lower = 0.0, upper = 0.0, cutoff = 1.0;
  std::size_t z = 0;
  std::optional<std::size_t> alpha, beta;
  double alpha_fixed = 0.0, beta_fixed = 0.0;  ///< value used when the binary was removed
  std::vector<std::size_t> constraints;       ///< rows that involve this neuron's z
};

/// Mixed-integer model of max sum_i net_i(a_i) over feasible allocations.
struct WdpModel {
  std::size_t n = 0, m = 0;
  std::vector<Variable> vars;
  std::vector<Constraint> constraints;
  std::vector<Term> objective;
  std::vector<std::vector<std::size_t>> alloc;  ///< alloc[i][j] = index of a_i_j
  std::vector<NeuronInfo> neurons;              ///< bidder-major, then layer, then index
  std::size_t num_item_constraints = 0;
  std::size_t num_exclusion_cuts = 0;

  std::size_t num_binaries() const {
    return static_cast<std::size_t>(std::count_if(vars.begin(), vars.end(), [](const Variable& v) { return v.type == VarType::kBinary; }));
  }
  std::size_t num_neuron_binaries() const { return num_binaries() - n * m; }
};

struct EncodeConfig {
  bool prune = true;
};

namespace detail {

inline std::size_t add_var(WdpModel& md, std::string name, VarType type, double lb, double ub) {
  md.vars.push_back({std::move(name), type, lb, ub});
  return md.vars.size() - 1;
}

inline std::string idx_name(const char* prefix, std::size_t a, std::size_t b, std::size_t c) {
  return std::string(prefix) + "_" + std::to_string(a) + "_" + std::to_string(b) + "_" + std::to_string(c);
}

}  // namespace detail

/// Builds the model. Hidden neuron j of layer k of bidder i gets z_i_k_j and,
/// unless pruned, alpha_i_k_j / beta_i_k_j with the four bReLU constraints.
inline WdpModel encode_milp(std::span<const MvnnParams> nets, const Exclusions* exclusions = nullptr,
                            EncodeConfig cfg = {}) {
  if (nets.empty()) throw InvalidInput("need at least one network");
  const std::size_t m = nets.front().num_inputs();
  for (const auto& p : nets) {
    validate(p);
    if (p.num_inputs() != m) throw InvalidInput("all networks must share the item count");
  }
  if (exclusions && !exclusions->empty() && exclusions->size() != nets.size())
    throw InvalidInput("exclusions must list one set per bidder");

  WdpModel md;
  md.n = nets.size();
  md.m = m;
  md.alloc.assign(md.n, std::vector<std::size_t>(m));
  for (std::size_t i = 0; i < md.n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      md.alloc[i][j] = detail::add_var(md, "a_" + std::to_string(i) + "_" + std::to_string(j), VarType::kBinary, 0, 1);

  for (std::size_t j = 0; j < m; ++j) {
    Constraint c{"item_" + std::to_string(j), {}, Sense::kLe, 1.0};
    for (std::size_t i = 0; i < md.n; ++i) c.terms.push_back({md.alloc[i][j], 1.0});
    md.constraints.push_back(std::move(c));
  }
  md.num_item_constraints = m;

  if (exclusions && !exclusions->empty()) {
    for (std::size_t i = 0; i < md.n; ++i) {
      std::vector<Bundle> sorted((*exclusions)[i].begin(), (*exclusions)[i].end());
      std::sort(sorted.begin(), sorted.end());
      std::size_t e = 0;
      for (const auto& x : sorted) {
        if (x.size() != m) throw InvalidInput("excluded bundle length mismatch");
        // sum_{x_j=1} (1 - a_ij) + sum_{x_j=0} a_ij >= 1
        Constraint c{"excl_" + std::to_string(i) + "_" + std::to_string(e++), {}, Sense::kGe,
                     1.0 - static_cast<double>(x.count())};
        for (std::size_t j = 0; j < m; ++j) c.terms.push_back({md.alloc[i][j], x[j] ? -1.0 : 1.0});
        md.constraints.push_back(std::move(c));
        ++md.num_exclusion_cuts;
      }
    }
  }

  for (std::size_t i = 0; i < md.n; ++i) {
    const MvnnParams& p = nets[i];
    const auto bounds = box_bounds(p);
    std::vector<std::size_t> prev = md.alloc[i];
    for (std::size_t kk = 0; kk < p.num_hidden_layers(); ++kk) {
      const std::size_t k = kk + 1;
      const auto& W = p.weights[kk];
      std::vector<std::size_t> cur;
      for (std::size_t j = 0; j < static_cast<std::size_t>(W.rows()); ++j) {
        const Eigen::Index r = static_cast<Eigen::Index>(j);
        NeuronInfo nu;
        nu.bidder = i;
        nu.layer = k;
        nu.index = j;
        nu.lower = bounds[kk].lower(r);
        nu.upper = bounds[kk].upper(r);
        nu.cutoff = p.cutoffs[kk](r);
        const double l = nu.lower, u = nu.upper, t = nu.cutoff, b = p.biases[kk](r);
        nu.prune = cfg.prune ? classify_neuron(l, u, t) : PruneCase::kActive;

        auto o_terms = [&](double sign) {
          std::vector<Term> ts;
          for (std::size_t c = 0; c < prev.size(); ++c) {
            const double w = W(r, static_cast<Eigen::Index>(c));
            if (w != 0.0) ts.push_back({prev[c], sign * w});
          }
          return ts;
        };
        auto with_z = [](std::size_t z, std::vector<Term> ts) {
          ts.insert(ts.begin(), Term{z, 1.0});
          return ts;
        };
        auto push = [&](const char* tag, std::vector<Term> ts, Sense s, double rhs) {
          md.constraints.push_back({detail::idx_name(tag, i, k, j), std::move(ts), s, rhs});
          nu.constraints.push_back(md.constraints.size() - 1);
        };

        if (nu.prune == PruneCase::kConstCutoff) {
          nu.z = detail::add_var(md, detail::idx_name("z", i, k, j), VarType::kContinuous, t, t);
          nu.alpha_fixed = nu.beta_fixed = 1.0;
        } else if (nu.prune == PruneCase::kConstZero) {
          nu.z = detail::add_var(md, detail::idx_name("z", i, k, j), VarType::kContinuous, 0.0, 0.0);
        } else if (nu.prune == PruneCase::kIdentity) {
          nu.z = detail::add_var(md, detail::idx_name("z", i, k, j), VarType::kContinuous, 0.0, t);
          nu.alpha_fixed = 1.0;
          push("id", with_z(nu.z, o_terms(-1.0)), Sense::kEq, b);  // z - W zp = b
        } else {
          nu.z = detail::add_var(md, detail::idx_name("z", i, k, j), VarType::kContinuous, 0.0, t);
          if (nu.prune == PruneCase::kAlphaFixed) nu.alpha_fixed = 1.0;
          else nu.alpha = detail::add_var(md, detail::idx_name("alpha", i, k, j), VarType::kBinary, 0, 1);
          if (nu.prune != PruneCase::kBetaFixed)
            nu.beta = detail::add_var(md, detail::idx_name("beta", i, k, j), VarType::kBinary, 0, 1);

          // (i) z <= alpha t
          if (nu.alpha) push("c1", {{nu.z, 1.0}, {*nu.alpha, -t}}, Sense::kLe, 0.0);
          else push("c1", {{nu.z, 1.0}}, Sense::kLe, t);
          // (ii) z <= o - l (1 - alpha)
          {
            auto ts = with_z(nu.z, o_terms(-1.0));
            if (nu.alpha) {
              if (l != 0.0) ts.push_back({*nu.alpha, -l});
              push("c2", std::move(ts), Sense::kLe, b - l);
            } else {
              push("c2", std::move(ts), Sense::kLe, b);
            }
          }
          // (iii) z >= beta t
          if (nu.beta) push("c3", {{nu.z, 1.0}, {*nu.beta, -t}}, Sense::kGe, 0.0);
          else push("c3", {{nu.z, 1.0}}, Sense::kGe, 0.0);
          // (iv) z >= o + (t - u) beta
          {
            auto ts = with_z(nu.z, o_terms(-1.0));
            if (nu.beta && (t - u) != 0.0) ts.push_back({*nu.beta, -(t - u)});
            push("c4", std::move(ts), Sense::kGe, b);
          }
        }
        cur.push_back(nu.z);
        md.neurons.push_back(std::move(nu));
      }
      prev = std::move(cur);
    }
    const auto& Wout = p.weights.back();
    for (std::size_t c = 0; c < prev.size(); ++c) {
      const double w = Wout(0, static_cast<Eigen::Index>(c));
      if (w != 0.0) md.objective.push_back({prev[c], w});
    }
    if (p.skip)
      for (std::size_t j = 0; j < m; ++j) {
        const double w = (*p.skip)(static_cast<Eigen::Index>(j));
        if (w != 0.0) md.objective.push_back({md.alloc[i][j], w});
      }
  }
  return md;
}

// ---------------------------------------------------------------------------
// Checking assignments.

inline double row_activity(const Constraint& c, const std::vector<double>& x) {
  double s = 0.0;
  for (const auto& t : c.terms) s += t.coef * x[t.var];
  return s;
}

/// Largest violation of any bound, constraint or integrality requirement.
inline double max_violation(const WdpModel& md, const std::vector<double>& x) {
  if (x.size() != md.vars.size()) throw InvalidInput("assignment length mismatch");
  double worst = 0.0;
  for (std::size_t v = 0; v < md.vars.size(); ++v) {
    worst = std::max({worst, md.vars[v].lb - x[v], x[v] - md.vars[v].ub});
    if (md.vars[v].type == VarType::kBinary) worst = std::max(worst, std::abs(x[v] - std::round(x[v])));
  }
  for (const auto& c : md.constraints) {
    const double a = row_activity(c, x);
    switch (c.sense) {
      case Sense::kLe: worst = std::max(worst, a - c.rhs); break;
      case Sense::kGe: worst = std::max(worst, c.rhs - a); break;
      case Sense::kEq: worst = std::max(worst, std::abs(a - c.rhs)); break;
    }
  }
  return worst;
}

inline double objective_value(const WdpModel& md, const std::vector<double>& x) {
  double s = 0.0;
  for (const auto& t : md.objective) s += t.coef * x[t.var];
  return s;
}

/// Full variable assignment for an allocation: z from the forward pass and
/// binaries by case: o < 0 gives (0,0), 0 <= o <= t gives (1,0), o > t gives (1,1).
inline std::vector<double> lemma_assignment(const WdpModel& md, std::span<const MvnnParams> nets,
                                            const Allocation& allocation) {
  if (allocation.size() != md.n || nets.size() != md.n) throw InvalidInput("bidder count mismatch");
  std::vector<double> x(md.vars.size(), 0.0);
  for (std::size_t i = 0; i < md.n; ++i)
    for (std::size_t j = 0; j < md.m; ++j) x[md.alloc[i][j]] = allocation[i][j] ? 1.0 : 0.0;
  std::vector<ForwardTrace> traces;
  for (std::size_t i = 0; i < md.n; ++i) {
    auto d = allocation[i].as_doubles();
    traces.push_back(trace(nets[i], Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()))));
  }
  for (const auto& nu : md.neurons) {
    const auto& tr = traces[nu.bidder];
    const Eigen::Index r = static_cast<Eigen::Index>(nu.index);
    const double o = tr.pre[nu.layer - 1](r);
    x[nu.z] = tr.post[nu.layer - 1](r);
    const double alpha = o < 0.0 ? 0.0 : 1.0;
    const double beta = o > nu.cutoff ? 1.0 : 0.0;
    if (nu.alpha) x[*nu.alpha] = alpha;
    if (nu.beta) x[*nu.beta] = beta;
  }
  return x;
}

/// Exact optimum of a model by enumerating allocation variables.
///
/// For a fixed allocation every neuron's z is recovered from that neuron's own
/// rows: each admissible (alpha, beta) pair yields an interval for z given the
/// previous layer, and the encoding is exact only if all non-empty intervals
/// collapse to one point. Throws if that fails. Intended for tiny models.
struct ModelSolveResult {
  double objective = -std::numeric_limits<double>::infinity();
  Allocation allocation;
  std::vector<double> assignment;
  bool feasible = false;
};

inline ModelSolveResult solve_model_exhaustive(const WdpModel& md, double tol = 1e-9) {
  const std::size_t nm = md.n * md.m;
  if (nm > 24) throw UnsupportedSize("exhaustive model solve limited to n*m <= 24");
  ModelSolveResult best;
  std::vector<double> x(md.vars.size(), 0.0);

  // constraint rows not owned by any neuron: item and exclusion rows
  std::vector<char> owned(md.constraints.size(), 0);
  for (const auto& nu : md.neurons)
    for (auto c : nu.constraints) owned[c] = 1;

  for (std::uint64_t code = 0; code < (std::uint64_t{1} << nm); ++code) {
    for (std::size_t i = 0; i < md.n; ++i)
      for (std::size_t j = 0; j < md.m; ++j) x[md.alloc[i][j]] = (code >> (i * md.m + j)) & 1U ? 1.0 : 0.0;
    bool ok = true;
    for (std::size_t c = 0; c < md.constraints.size() && ok; ++c) {
      if (owned[c]) continue;
      const auto& row = md.constraints[c];
      const double a = row_activity(row, x);
      if ((row.sense == Sense::kLe && a > row.rhs + tol) || (row.sense == Sense::kGe && a < row.rhs - tol)) ok = false;
    }
    if (!ok) continue;

    for (const auto& nu : md.neurons) {
      std::vector<double> alphas = nu.alpha ? std::vector<double>{0.0, 1.0} : std::vector<double>{nu.alpha_fixed};
      std::vector<double> betas = nu.beta ? std::vector<double>{0.0, 1.0} : std::vector<double>{nu.beta_fixed};
      std::optional<double> value;
      for (double al : alphas)
        for (double be : betas) {
          if (nu.alpha) x[*nu.alpha] = al;
          if (nu.beta) x[*nu.beta] = be;
          double lo = md.vars[nu.z].lb, hi = md.vars[nu.z].ub;
          for (auto c : nu.constraints) {
            const auto& row = md.constraints[c];
            double zc = 0.0, rest = 0.0;
            for (const auto& t : row.terms) {
              if (t.var == nu.z) zc += t.coef;
              else rest += t.coef * x[t.var];
            }
            const double bound = (row.rhs - rest) / zc;
            const bool upper = (row.sense == Sense::kLe) == (zc > 0.0);
            if (row.sense == Sense::kEq) {
              lo = std::max(lo, bound);
              hi = std::min(hi, bound);
            } else if (upper) {
              hi = std::min(hi, bound);
            } else {
              lo = std::max(lo, bound);
            }
          }
          if (lo > hi + tol) continue;
          if (hi - lo > tol) throw PreconditionError("encoding leaves z undetermined for a fixed allocation");
          if (value && std::abs(*value - lo) > tol)
            throw PreconditionError("encoding admits two different z values for one allocation");
          if (!value) value = lo;
        }
      if (!value) {
        ok = false;
        break;
      }
      x[nu.z] = *value;
      // leave a binary assignment consistent with the value for the caller
      if (nu.alpha || nu.beta) {
        for (double al : alphas)
          for (double be : betas) {
            if (nu.alpha) x[*nu.alpha] = al;
            if (nu.beta) x[*nu.beta] = be;
            bool fits = true;
            for (auto c : nu.constraints) {
              const auto& row = md.constraints[c];
              const double a = row_activity(row, x);
              if ((row.sense == Sense::kLe && a > row.rhs + tol) || (row.sense == Sense::kGe && a < row.rhs - tol) ||
                  (row.sense == Sense::kEq && std::abs(a - row.rhs) > tol))
                fits = false;
            }
            if (fits) goto assigned;
          }
      assigned:;
      }
    }
    if (!ok) continue;
    const double obj = objective_value(md, x);
    if (!best.feasible || obj > best.objective + tol) {
      best.feasible = true;
      best.objective = obj;
      best.assignment = x;
    }
  }
  if (best.feasible) {
    best.allocation = empty_allocation(md.n, md.m);
    for (std::size_t i = 0; i < md.n; ++i)
      for (std::size_t j = 0; j < md.m; ++j) best.allocation[i].set(j, best.assignment[md.alloc[i][j]] > 0.5);
  }
  return best;
}

// ---------------------------------------------------------------------------
// LP format.

namespace detail {

inline std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_expr(std::ostringstream& os, const std::vector<Term>& terms, const std::vector<Variable>& vars) {
  if (terms.empty()) {
    os << " 0 " << vars.front().name;
    return;
  }
  bool first = true;
  for (const auto& t : terms) {
    if (t.coef < 0.0) os << " - " << fmt_num(-t.coef) << ' ';
    else os << (first ? " " : " + ") << fmt_num(t.coef) << ' ';
    os << vars[t.var].name;
    first = false;
  }
}

}  // namespace detail

/// CPLEX LP text. Byte-identical for identical models.
inline std::string emit_lp_file(const WdpModel& md) {
  if (md.vars.empty()) throw InvalidInput("empty model");
  std::ostringstream os;
  os << "\\ winner determination over monotone-value networks\n";
  os << "\\ bidders " << md.n << " items " << md.m << "\n";
  os << "Maximize\n obj:";
  detail::write_expr(os, md.objective, md.vars);
  os << "\nSubject To\n";
  for (const auto& c : md.constraints) {
    os << ' ' << c.name << ':';
    detail::write_expr(os, c.terms, md.vars);
    os << (c.sense == Sense::kLe ? " <= " : c.sense == Sense::kGe ? " >= " : " = ") << detail::fmt_num(c.rhs) << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : md.vars) {
    if (v.type == VarType::kBinary) continue;
    if (v.lb == v.ub) os << ' ' << v.name << " = " << detail::fmt_num(v.lb) << '\n';
    else os << ' ' << detail::fmt_num(v.lb) << " <= " << v.name << " <= " << detail::fmt_num(v.ub) << '\n';
  }
  os << "Binaries\n";
  for (const auto& v : md.vars)
    if (v.type == VarType::kBinary) os << ' ' << v.name << '\n';
  os << "End\n";
  return os.str();
}

/// The subset of LP format written by emit_lp_file.
struct ParsedLp {
  bool maximize = true;
  std::vector<std::pair<std::string, double>> objective;
  struct Row {
    std::string name;
    std::vector<std::pair<std::string, double>> terms;
    Sense sense = Sense::kLe;
    double rhs = 0.0;
  };
  std::vector<Row> rows;
  std::map<std::string, std::pair<double, double>> bounds;
  std::vector<std::string> binaries;
};

inline ParsedLp parse_lp_file(const std::string& text) {
  ParsedLp lp;
  std::istringstream in(text);
  std::string line;
  enum class Sec { kNone, kObj, kRows, kBounds, kBin, kEnd } sec = Sec::kNone;

  auto parse_expr = [](std::istringstream& ss, std::vector<std::pair<std::string, double>>& terms,
                       std::string& stop_tok) {
    std::string tok;
    double sign = 1.0;
    double coef = 1.0;
    while (ss >> tok) {
      if (tok == "<=" || tok == ">=" || tok == "=") {
        stop_tok = tok;
        return;
      }
      if (tok == "+") continue;
      if (tok == "-") {
        sign = -1.0;
        continue;
      }
      char* end = nullptr;
      double v = std::strtod(tok.c_str(), &end);
      if (end && *end == '\0') {
        coef = v;
        continue;
      }
      terms.emplace_back(tok, sign * coef);
      sign = 1.0;
      coef = 1.0;
    }
  };

  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '\\') continue;
    if (line == "Maximize" || line == "Minimize") {
      lp.maximize = line == "Maximize";
      sec = Sec::kObj;
      continue;
    }
    if (line == "Subject To") { sec = Sec::kRows; continue; }
    if (line == "Bounds") { sec = Sec::kBounds; continue; }
    if (line == "Binaries") { sec = Sec::kBin; continue; }
    if (line == "End") { sec = Sec::kEnd; continue; }
    std::istringstream ss(line);
    switch (sec) {
      case Sec::kObj: {
        std::string name, stop;
        ss >> name;
        parse_expr(ss, lp.objective, stop);
        break;
      }
      case Sec::kRows: {
        ParsedLp::Row r;
        ss >> r.name;
        if (!r.name.empty() && r.name.back() == ':') r.name.pop_back();
        std::string stop;
        parse_expr(ss, r.terms, stop);
        if (stop.empty()) throw InvalidInput("LP row without relation: " + line);
        r.sense = stop == "<=" ? Sense::kLe : stop == ">=" ? Sense::kGe : Sense::kEq;
        ss >> r.rhs;
        lp.rows.push_back(std::move(r));
        break;
      }
      case Sec::kBounds: {
        std::vector<std::string> toks;
        std::string tok;
        while (ss >> tok) toks.push_back(tok);
        if (toks.size() == 3 && toks[1] == "=") {
          double v = std::stod(toks[2]);
          lp.bounds[toks[0]] = {v, v};
        } else if (toks.size() == 5) {
          lp.bounds[toks[2]] = {std::stod(toks[0]), std::stod(toks[4])};
        } else {
          throw InvalidInput("unsupported bound line: " + line);
        }
        break;
      }
      case Sec::kBin: {
        std::string tok;
        while (ss >> tok) lp.binaries.push_back(tok);
        break;
      }
      default: break;
    }
  }
  if (sec != Sec::kEnd) throw InvalidInput("LP text lacks End");
  return lp;
}

}  // namespace boca
