#include "flexplan/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>

#include "flexplan/csv.hpp"
#include "standard_form.hpp"

namespace flexplan {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterLimit: return "iter_limit";
  }
  return "unknown";
}

void BranchBoundParams::validate() const {
  if (rel_gap < 0.0 || abs_gap < 0.0) throw config_error("branch-and-bound: gaps must be >= 0");
  if (node_limit <= 0 || time_limit_sec <= 0.0) {
    throw config_error("branch-and-bound: limits must be positive");
  }
}

namespace detail {

namespace {

void push_terms(std::vector<Eigen::Triplet<double>>* trip, int row, const LinTerms& terms,
                double sign) {
  for (const auto& [idx, coef] : terms) trip->emplace_back(row, idx, sign * coef);
}

}  // namespace

StandardForm lower_program(const ConicProgram& p, const Fixings& fixings) {
  p.check();
  StandardForm sf;
  sf.n = static_cast<int>(p.vars.size());

  std::vector<char> fixed(p.vars.size(), 0);
  for (const auto& [idx, val] : fixings) {
    if (idx < 0 || idx >= sf.n) throw solver_error("fixing index out of range");
    (void)val;
    fixed[idx] = 1;
  }

  // equalities: IR eq rows, then fixings
  std::vector<Eigen::Triplet<double>> atrip;
  std::vector<double> bvec;
  for (int i = 0; i < static_cast<int>(p.rows.size()); ++i) {
    if (p.rows[i].kind != RowKind::Eq) continue;
    push_terms(&atrip, static_cast<int>(bvec.size()), p.rows[i].terms, 1.0);
    bvec.push_back(p.rows[i].rhs);
    sf.eq_origin.push_back({StandardForm::RowOrigin::EqRow, i, -1});
  }
  for (const auto& [idx, val] : fixings) {
    atrip.emplace_back(static_cast<int>(bvec.size()), idx, 1.0);
    bvec.push_back(val);
    sf.eq_origin.push_back({StandardForm::RowOrigin::FixRow, idx, -1});
  }

  // LP cone: inequality rows, then variable bounds of unfixed variables
  std::vector<Eigen::Triplet<double>> gtrip;
  std::vector<double> hvec;
  auto lp_row = [&](const LinTerms& terms, double rhs, StandardForm::RowOrigin origin) {
    // a'x <= rhs  ->  s = rhs - a'x >= 0
    push_terms(&gtrip, static_cast<int>(hvec.size()), terms, 1.0);
    hvec.push_back(rhs);
    sf.cone_origin.push_back(origin);
  };
  for (int i = 0; i < static_cast<int>(p.rows.size()); ++i) {
    if (p.rows[i].kind != RowKind::Le) continue;
    lp_row(p.rows[i].terms, p.rows[i].rhs, {StandardForm::RowOrigin::IneqRow, i, -1});
  }
  for (int i = 0; i < sf.n; ++i) {
    if (fixed[i]) continue;
    if (p.vars[i].lb > -kInf) {
      lp_row({{i, -1.0}}, -p.vars[i].lb, {StandardForm::RowOrigin::BoundLo, i, -1});
    }
    if (p.vars[i].ub < kInf) {
      lp_row({{i, 1.0}}, p.vars[i].ub, {StandardForm::RowOrigin::BoundHi, i, -1});
    }
  }
  sf.cones.nonneg = static_cast<int>(hvec.size());

  for (int k = 0; k < static_cast<int>(p.socs.size()); ++k) {
    const auto& s = p.socs[k];
    // s0 = a'x + b  ->  G row -a, h = b
    push_terms(&gtrip, static_cast<int>(hvec.size()), s.a, -1.0);
    hvec.push_back(s.b);
    sf.cone_origin.push_back({StandardForm::RowOrigin::SocRhs, k, -1});
    for (int r = 0; r < static_cast<int>(s.f_terms.size()); ++r) {
      push_terms(&gtrip, static_cast<int>(hvec.size()), s.f_terms[r], -1.0);
      hvec.push_back(s.g[r]);
      sf.cone_origin.push_back({StandardForm::RowOrigin::SocF, k, r});
    }
    sf.cones.soc_dims.push_back(static_cast<int>(s.f_terms.size()) + 1);
  }
  const double rt2 = std::sqrt(2.0);
  for (int k = 0; k < static_cast<int>(p.rsocs.size()); ++k) {
    const auto& s = p.rsocs[k];
    // (u, v, w) in QR  <=>  (u+v, u-v, sqrt2 w) in Q
    const int base = static_cast<int>(hvec.size());
    push_terms(&gtrip, base, s.u, -1.0);
    push_terms(&gtrip, base, s.v, -1.0);
    hvec.push_back(s.u0 + s.v0);
    sf.cone_origin.push_back({StandardForm::RowOrigin::RsocRow, k, 0});
    push_terms(&gtrip, base + 1, s.u, -1.0);
    push_terms(&gtrip, base + 1, s.v, 1.0);
    hvec.push_back(s.u0 - s.v0);
    sf.cone_origin.push_back({StandardForm::RowOrigin::RsocRow, k, 1});
    for (int r = 0; r < static_cast<int>(s.f_terms.size()); ++r) {
      push_terms(&gtrip, base + 2 + r, s.f_terms[r], -rt2);
      hvec.push_back(rt2 * s.g[r]);
      sf.cone_origin.push_back({StandardForm::RowOrigin::RsocRow, k, 2 + r});
    }
    sf.cones.soc_dims.push_back(static_cast<int>(s.f_terms.size()) + 2);
  }

  sf.A.resize(static_cast<int>(bvec.size()), sf.n);
  sf.A.setFromTriplets(atrip.begin(), atrip.end());
  sf.b = Eigen::Map<Vec>(bvec.data(), static_cast<int>(bvec.size()));
  sf.G.resize(static_cast<int>(hvec.size()), sf.n);
  sf.G.setFromTriplets(gtrip.begin(), gtrip.end());
  sf.h = Eigen::Map<Vec>(hvec.data(), static_cast<int>(hvec.size()));
  sf.c = Vec::Zero(sf.n);
  for (const auto& [idx, coef] : p.objective) sf.c(idx) += coef;
  return sf;
}

}  // namespace detail

ConicSolution solve_continuous(const ConicProgram& p, const ContinuousSettings& settings,
                               const Fixings& fixings) {
  const auto sf = detail::lower_program(p, fixings);
  auto r = detail::ipm_solve(sf, settings);

  ConicSolution sol;
  sol.status = r.status;
  sol.iterations = r.iterations;
  sol.history = std::move(r.history);
  sol.message = std::move(r.message);
  sol.primal_residual = r.pres;
  sol.dual_residual = r.dres;
  sol.gap = r.relgap;
  sol.x.assign(r.x.data(), r.x.data() + r.x.size());
  sol.objective = p.objective_value(sol.x);

  sol.dual_rows.assign(p.rows.size(), 0.0);
  sol.dual_socs.resize(p.socs.size());
  for (std::size_t k = 0; k < p.socs.size(); ++k) {
    sol.dual_socs[k].assign(p.socs[k].f_terms.size() + 1, 0.0);
  }
  sol.dual_rsocs.resize(p.rsocs.size());
  for (std::size_t k = 0; k < p.rsocs.size(); ++k) {
    sol.dual_rsocs[k].assign(p.rsocs[k].f_terms.size() + 2, 0.0);
  }
  for (int i = 0; i < static_cast<int>(sf.eq_origin.size()); ++i) {
    const auto& o = sf.eq_origin[i];
    if (o.kind == detail::StandardForm::RowOrigin::EqRow) sol.dual_rows[o.block] = r.y(i);
  }
  for (int i = 0; i < static_cast<int>(sf.cone_origin.size()); ++i) {
    const auto& o = sf.cone_origin[i];
    switch (o.kind) {
      case detail::StandardForm::RowOrigin::IneqRow: sol.dual_rows[o.block] = r.z(i); break;
      case detail::StandardForm::RowOrigin::SocRhs: sol.dual_socs[o.block][0] = r.z(i); break;
      case detail::StandardForm::RowOrigin::SocF:
        sol.dual_socs[o.block][o.component + 1] = r.z(i);
        break;
      case detail::StandardForm::RowOrigin::RsocRow:
        sol.dual_rsocs[o.block][o.component] = r.z(i);
        break;
      default: break;
    }
  }
  return sol;
}

FeasibilityReport verify_point(const ConicProgram& p, const std::vector<double>& x, double tol) {
  if (x.size() != p.vars.size()) throw dimension_error("verify_point: dimension mismatch");
  FeasibilityReport rep;
  auto value = [&](const LinTerms& terms, double constant) {
    double v = constant;
    for (const auto& [i, c] : terms) v += c * x[i];
    return v;
  };
  auto add = [&](const std::string& kind, int index, const std::string& tag, double viol) {
    rep.entries.push_back({kind, index, tag, std::max(viol, 0.0)});
    rep.max_violation = std::max(rep.max_violation, viol);
  };
  for (int i = 0; i < static_cast<int>(p.rows.size()); ++i) {
    const auto& r = p.rows[i];
    const double v = value(r.terms, -r.rhs);
    add("row", i, r.tag, r.kind == RowKind::Eq ? std::abs(v) : v);
  }
  for (int i = 0; i < static_cast<int>(p.vars.size()); ++i) {
    const auto& v = p.vars[i];
    double viol = 0.0;
    if (v.lb > -kInf) viol = std::max(viol, v.lb - x[i]);
    if (v.ub < kInf) viol = std::max(viol, x[i] - v.ub);
    if (viol > 0.0) add("bound", i, v.name, viol);
    if (v.is_binary) {
      const double dist = std::abs(x[i] - std::round(x[i]));
      if (dist > tol) add("integrality", i, v.name, dist);
    }
  }
  for (int k = 0; k < static_cast<int>(p.socs.size()); ++k) {
    const auto& s = p.socs[k];
    double norm2 = 0.0;
    for (std::size_t r = 0; r < s.f_terms.size(); ++r) {
      const double fr = value(s.f_terms[r], s.g[r]);
      norm2 += fr * fr;
    }
    add("soc", k, s.tag, std::sqrt(norm2) - value(s.a, s.b));
  }
  for (int k = 0; k < static_cast<int>(p.rsocs.size()); ++k) {
    const auto& s = p.rsocs[k];
    const double u = value(s.u, s.u0);
    const double v = value(s.v, s.v0);
    double norm2 = 0.0;
    for (std::size_t r = 0; r < s.f_terms.size(); ++r) {
      const double fr = value(s.f_terms[r], s.g[r]);
      norm2 += fr * fr;
    }
    add("rsoc", k, s.tag, std::max({norm2 - 2.0 * u * v, -u, -v}));
  }
  rep.feasible = rep.max_violation <= tol;
  return rep;
}

void polish_equalities(const ConicProgram& p, const Fixings& fixings, std::vector<double>* x) {
  const int n = static_cast<int>(p.vars.size());
  if (static_cast<int>(x->size()) != n) throw dimension_error("polish: dimension mismatch");

  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> target;
  auto add_row = [&](const LinTerms& terms, double rhs) {
    const int row = static_cast<int>(target.size());
    for (const auto& [idx, coef] : terms) trip.emplace_back(row, idx, coef);
    target.push_back(rhs);
  };
  for (const auto& r : p.rows) {
    if (r.kind == RowKind::Eq) add_row(r.terms, r.rhs);
  }
  for (const auto& [idx, val] : fixings) add_row({{idx, 1.0}}, val);
  for (const auto& l : p.product_links) {
    const bool on = std::round((*x)[l.bit]) > 0.5;
    if (on) {
      add_row({{l.product, 1.0}, {l.scalar, -1.0}}, 0.0);
    } else {
      add_row({{l.product, 1.0}}, 0.0);
    }
  }
  const int m = static_cast<int>(target.size());
  if (m == 0) return;

  Eigen::SparseMatrix<double> E(m, n);
  E.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd xin = Eigen::Map<Eigen::VectorXd>(x->data(), n);
  Eigen::VectorXd resid = Eigen::Map<Eigen::VectorXd>(target.data(), m) - E * xin;

  // min |dx|^2 s.t. E dx = resid, via the regularized KKT [I E'; E -dI]
  const double reg = 1e-12;
  Eigen::SparseMatrix<double> K(n + m, n + m);
  std::vector<Eigen::Triplet<double>> ktrip;
  ktrip.reserve(n + m + E.nonZeros());
  for (int i = 0; i < n; ++i) ktrip.emplace_back(i, i, 1.0);
  for (int k = 0; k < E.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(E, k); it; ++it) {
      ktrip.emplace_back(it.col(), n + it.row(), it.value());
    }
  }
  for (int i = 0; i < m; ++i) ktrip.emplace_back(n + i, n + i, -reg);
  K.setFromTriplets(ktrip.begin(), ktrip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Upper> ldlt(K);
  if (ldlt.info() != Eigen::Success) return;  // leave the point untouched

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
  rhs.tail(m) = resid;
  Eigen::VectorXd sol = ldlt.solve(rhs);
  for (int step = 0; step < 3; ++step) {
    Eigen::VectorXd kr = rhs;
    kr.head(n) -= sol.head(n) + E.transpose() * sol.tail(m);
    kr.tail(m) -= E * sol.head(n) - reg * sol.tail(m);
    sol += ldlt.solve(kr);
  }
  const Eigen::VectorXd dx = sol.head(n);
  if (!dx.allFinite()) return;
  for (int i = 0; i < n; ++i) (*x)[i] += dx(i);
}

namespace {

struct Node {
  double bound;
  long id;
  Fixings fixings;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;                                // then oldest first
  }
};

bool finite_point(const std::vector<double>& x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return !x.empty();
}

}  // namespace

ConicSolution solve_misocp(const ConicProgram& p, const BranchBoundParams& bb) {
  bb.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto binaries = p.binary_indices();

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  open.push({-kInf, next_id++, {}});

  ConicSolution incumbent;
  bool have_incumbent = false;
  double best_bound = -kInf;
  long nodes = 0;
  bool hit_limit = false;

  auto gap_ok = [&](double bound, double obj) {
    return obj - bound <= std::max(bb.abs_gap, bb.rel_gap * std::max(1.0, std::abs(obj)));
  };

  while (!open.empty()) {
    if (nodes >= bb.node_limit ||
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
            bb.time_limit_sec) {
      hit_limit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    best_bound = std::max(best_bound, node.bound);
    if (have_incumbent && gap_ok(node.bound, incumbent.objective)) break;  // best-bound order

    ++nodes;
    auto relax = solve_continuous(p, bb.relax, node.fixings);
    if (relax.status == SolveStatus::IterLimit && !finite_point(relax.x)) {
      // numerical failure: one retry with heavier regularization
      ContinuousSettings retry = bb.relax;
      retry.static_reg *= 1e3;
      retry.max_iters += 100;
      relax = solve_continuous(p, retry, node.fixings);
    }
    if (relax.status == SolveStatus::Infeasible) continue;
    if (relax.status == SolveStatus::Unbounded) {
      if (node.fixings.empty()) {
        relax.nodes = nodes;
        return relax;  // root relaxation unbounded
      }
      continue;  // cannot happen when the root was bounded; treat as pruned
    }
    if (!finite_point(relax.x)) continue;  // unusable node
    const double node_bound =
        relax.status == SolveStatus::Optimal ? relax.objective : node.bound;
    if (have_incumbent && gap_ok(node_bound, incumbent.objective)) continue;

    // most fractional unfixed binary, ties by lowest index
    int branch_var = -1;
    double best_frac = bb.int_tol;
    for (int idx : binaries) {
      const double v = relax.x[idx];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac) {
        best_frac = frac;
        branch_var = idx;
      }
    }
    if (branch_var < 0) {
      // integral: re-solve with every binary pinned to its rounded value,
      // then project onto the implied equality face
      Fixings full;
      full.reserve(binaries.size());
      for (int idx : binaries) full.emplace_back(idx, std::round(relax.x[idx]));
      auto polished = solve_continuous(p, bb.relax, full);
      ConicSolution candidate =
          polished.status == SolveStatus::Optimal && finite_point(polished.x) ? polished : relax;
      polish_equalities(p, full, &candidate.x);
      candidate.objective = p.objective_value(candidate.x);
      if (!std::isfinite(candidate.objective)) continue;
      if (!have_incumbent || candidate.objective < incumbent.objective) {
        incumbent = candidate;
        have_incumbent = true;
      }
      continue;
    }
    Fixings lo = node.fixings;
    lo.emplace_back(branch_var, 0.0);
    Fixings hi = node.fixings;
    hi.emplace_back(branch_var, 1.0);
    open.push({node_bound, next_id++, std::move(lo)});
    open.push({node_bound, next_id++, std::move(hi)});
  }

  if (!have_incumbent) {
    ConicSolution sol;
    sol.status = hit_limit ? SolveStatus::IterLimit : SolveStatus::Infeasible;
    sol.message = hit_limit ? "node or time limit before an incumbent was found"
                            : "all branches infeasible";
    sol.nodes = nodes;
    return sol;
  }
  if (!hit_limit || open.empty()) best_bound = incumbent.objective;
  incumbent.status = hit_limit && !open.empty() ? SolveStatus::IterLimit : SolveStatus::Optimal;
  incumbent.best_bound = std::min(best_bound, incumbent.objective);
  incumbent.mip_gap = (incumbent.objective - incumbent.best_bound) /
                      std::max(1.0, std::abs(incumbent.objective));
  incumbent.nodes = nodes;
  return incumbent;
}

void write_solution_csv(const ConicProgram& p, const ConicSolution& sol, const std::string& path,
                        const std::string& provenance) {
  csv::Writer w(path, provenance);
  w.raw_row("# status=" + to_string(sol.status) +
            " objective=" + csv::format_double(sol.objective) +
            " best_bound=" + csv::format_double(sol.best_bound) +
            " mip_gap=" + csv::format_double(sol.mip_gap) + " nodes=" + std::to_string(sol.nodes));
  w.header({"name", "value"});
  for (std::size_t i = 0; i < p.vars.size(); ++i) {
    w.raw_row(p.vars[i].name + "," + csv::format_double(sol.x[i]));
  }
}

std::vector<double> load_solution_csv(const ConicProgram& p, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open solution file '" + path + "'");
  std::map<std::string, double> values;
  std::string line;
  bool saw_header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw io_error(path + ":" + std::to_string(lineno) + ": expected name,value");
    }
    const std::string name = line.substr(0, comma);
    if (!saw_header && name == "name") {
      saw_header = true;
      continue;
    }
    char* end = nullptr;
    const std::string vs = line.substr(comma + 1);
    const double v = std::strtod(vs.c_str(), &end);
    if (end == vs.c_str()) {
      throw io_error(path + ":" + std::to_string(lineno) + ": bad value '" + vs + "'");
    }
    values[name] = v;
  }
  std::vector<double> x(p.vars.size(), 0.0);
  for (std::size_t i = 0; i < p.vars.size(); ++i) {
    const auto it = values.find(p.vars[i].name);
    if (it == values.end()) {
      throw io_error(path + ": solution is missing variable '" + p.vars[i].name + "'");
    }
    x[i] = it->second;
  }
  return x;
}

}  // namespace flexplan
