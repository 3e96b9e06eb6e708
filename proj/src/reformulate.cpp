#include "flexplan/reformulate.hpp"

#include <cmath>
#include <sstream>

#include "flexplan/csv.hpp"

namespace flexplan {

void ReformulationMode::validate() const {
  if (model == ChanceModel::Drcc) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
      throw config_error("reformulation: epsilon must be in (0, 1) for the robust model");
    }
  } else {
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
      throw config_error(
          "reformulation: Gaussian factor undefined for epsilon >= 0.5 (Phi^-1(1-eps) <= 0)");
    }
  }
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw domain_error("inverse_normal_cdf: p must be in (0, 1)");
  // Acklam's rational approximation
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // polish with Newton steps on Phi(x) - p
  for (int it = 0; it < 2; ++it) {
    const double err = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    x -= err / pdf;
  }
  return x;
}

double safety_factor(const ReformulationMode& mode) {
  mode.validate();
  if (mode.model == ChanceModel::Drcc) {
    return std::sqrt(mode.epsilon / (1.0 - mode.epsilon));
  }
  return 1.0 / inverse_normal_cdf(1.0 - mode.epsilon);
}

// ---------------------------------------------------------------------------
// variable index
// ---------------------------------------------------------------------------

std::uint64_t VarIndex::encode(const VarKey& k) {
  const auto u = [](int v) { return static_cast<std::uint64_t>(v + 2) & 0xffff; };
  return (static_cast<std::uint64_t>(k.sym) << 48) | (u(k.r) << 32) | (u(k.t) << 16) | u(k.comp);
}

void VarIndex::insert(const VarKey& k, int idx) { map_[encode(k)] = idx; }

bool VarIndex::has(const VarKey& k) const { return map_.count(encode(k)) > 0; }

int VarIndex::at(const VarKey& k) const {
  const auto it = map_.find(encode(k));
  if (it == map_.end()) {
    throw reformulation_error("unresolved decision symbol (sym=" +
                              std::to_string(static_cast<int>(k.sym)) + ", r=" +
                              std::to_string(k.r) + ", t=" + std::to_string(k.t) + ")");
  }
  return it->second;
}

namespace {

LinTerms resolve(const LinExpr& e, const VarIndex& index) {
  LinTerms out;
  out.reserve(e.terms.size());
  for (const auto& [key, coef] : e.terms) out.emplace_back(index.at(key), coef);
  return out;
}

Eigen::VectorXd checked_sqrt_times_one(const WindMoments& m, int r, int t) {
  const auto& cov = m.cov[m.index(r, t)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.eigenvalues().minCoeff() < -1e-8 * std::max(1.0, cov.norm())) {
    throw reformulation_error("covariance at (r=" + std::to_string(r) + ", t=" +
                              std::to_string(t) + ") is not PSD");
  }
  return m.cov_sqrt[m.index(r, t)] * Eigen::VectorXd::Ones(m.plants);
}

}  // namespace

void reformulate_drcc(const SymbolicConstraint& c, const WindMoments& moments,
                      const ReformulationMode& mode, const VarIndex& index, ConicProgram* out) {
  if (c.kind != CKind::DrccInequality || c.intertemporal) {
    throw reformulation_error("reformulate_drcc expects a single-period chance constraint");
  }
  const double factor = safety_factor(mode);
  if (c.load_cur.terms.empty() && c.load_cur.constant == 0.0) {
    // zero loading: the chance constraint is the deterministic row bound >= 0
    LinearRow row;
    for (const auto& [key, coef] : c.bound.terms) row.terms.emplace_back(index.at(key), -coef);
    row.rhs = c.bound.constant;
    row.kind = RowKind::Le;
    row.tag = c.tag;
    out->rows.push_back(std::move(row));
    return;
  }
  const Eigen::VectorXd sv = checked_sqrt_times_one(moments, c.r, c.t);
  SocBlock soc;
  soc.tag = c.tag;
  const LinTerms load = resolve(c.load_cur, index);
  for (int j = 0; j < sv.size(); ++j) {
    LinTerms fj = load;
    for (auto& [idx, coef] : fj) coef *= sv(j);
    soc.f_terms.push_back(std::move(fj));
    soc.g.push_back(sv(j) * c.load_cur.constant);
  }
  soc.a = resolve(c.bound, index);
  for (auto& [idx, coef] : soc.a) coef *= factor;
  soc.b = factor * c.bound.constant;
  out->socs.push_back(std::move(soc));
}

void split_stochastic_equality(const SymbolicConstraint& c, const VarIndex& index,
                               ConicProgram* out) {
  if (c.kind != CKind::StochasticEquality) {
    throw reformulation_error("split_stochastic_equality expects a stochastic equality");
  }
  LinearRow nom;
  nom.terms = resolve(c.nominal, index);
  nom.rhs = -c.nominal.constant;
  nom.kind = RowKind::Eq;
  nom.tag = c.tag + ".nom";
  out->rows.push_back(std::move(nom));
  LinearRow fac;
  fac.terms = resolve(c.factor, index);
  fac.rhs = -c.factor.constant;
  fac.kind = RowKind::Eq;
  fac.tag = c.tag + ".fac";
  out->rows.push_back(std::move(fac));
}

void reformulate_intertemporal(const SymbolicConstraint& c, const WindMoments& moments,
                               const ReformulationMode& mode, const VarIndex& index,
                               ConicProgram* out) {
  if (c.kind == CKind::StochasticEquality) {
    split_stochastic_equality(c, index, out);
    return;
  }
  if (c.kind != CKind::DrccInequality || !c.intertemporal || c.t < 1) {
    throw reformulation_error("reformulate_intertemporal expects a two-hour chance constraint");
  }
  const int Z = moments.plants;
  if (static_cast<int>(moments.lag_cov.size()) <= moments.index(c.r, c.t)) {
    throw reformulation_error("joint covariance unavailable for the ramping constraint");
  }
  const Eigen::MatrixXd joint = joint_covariance(moments, c.r, c.t);
  const Eigen::MatrixXd root = psd_sqrt(joint);
  const double factor = safety_factor(mode);

  SocBlock soc;
  soc.tag = c.tag;
  const LinTerms prev = resolve(c.load_prev, index);
  const LinTerms cur = resolve(c.load_cur, index);
  for (int j = 0; j < 2 * Z; ++j) {
    const double sprev = root.row(j).head(Z).sum();
    const double scur = root.row(j).tail(Z).sum();
    LinTerms fj;
    fj.reserve(prev.size() + cur.size());
    for (const auto& [idx, coef] : prev) fj.emplace_back(idx, sprev * coef);
    for (const auto& [idx, coef] : cur) fj.emplace_back(idx, scur * coef);
    soc.f_terms.push_back(std::move(fj));
    soc.g.push_back(sprev * c.load_prev.constant + scur * c.load_cur.constant);
  }
  soc.a = resolve(c.bound, index);
  for (auto& [idx, coef] : soc.a) coef *= factor;
  soc.b = factor * c.bound.constant;
  out->socs.push_back(std::move(soc));
}

void build_objective(const IesInstance& inst, const VarIndex& index, ConicProgram* out) {
  const auto& p = inst.params;
  auto obj = [&](VarKey k, double c) { out->objective.emplace_back(index.at(k), c); };
  obj({Sym::NumCells}, p.cell_cost);
  obj({Sym::ConvCap}, p.conv_cost);
  obj({Sym::CompCap}, p.comp_cost);
  obj({Sym::TankCap}, p.tank_cost);
  obj({Sym::EbCap}, p.eb_cost);
  for (int r = 0; r < inst.n_days(); ++r) {
    const double kr = inst.days.weight[r];
    for (int t = 0; t < inst.n_hours(); ++t) {
      obj({Sym::StartUp, r, t}, kr * p.startup_cost);
      obj({Sym::ShutDown, r, t}, kr * p.shutdown_cost);
      for (int k = 0; k < 4; ++k) obj({Sym::ChpWeight, r, t, k}, kr * inst.chp.cost[k]);
      obj({Sym::H2Mass, r, t}, -kr * p.h2_price);
      obj({Sym::TransEpigraph, r, t}, kr * p.trans_cost);

      // w >= ptrans^2 + (sigma_agg * beta)^2 via one rotated cone
      RotatedBlock epi;
      epi.tag = "obj.trans";
      epi.u = {{index.at({Sym::TransEpigraph, r, t}), 1.0}};
      epi.v0 = 0.5;
      epi.f_terms.push_back({{index.at({Sym::TransPower, r, t}), 1.0}});
      epi.g.push_back(0.0);
      const double sigma_agg = inst.moments.aggregate_sigma(r, t);
      epi.f_terms.push_back({{index.at({Sym::Beta, r, t}), sigma_agg}});
      epi.g.push_back(0.0);
      out->rsocs.push_back(std::move(epi));
    }
  }
}

void linearize_stack_coupling(const IesInstance& inst, const VarIndex& index, ConicProgram* out) {
  const int N = inst.params.bits;
  const double M = inst.effective_big_m();
  if (M < max_cell_power_mw(inst.cell)) {
    throw reformulation_error("big-M below the single-cell power bound");
  }

  // n_el = sum_j 2^j z_j
  {
    LinearRow bits;
    bits.terms.emplace_back(index.at({Sym::NumCells}), 1.0);
    for (int j = 0; j < N; ++j) {
      bits.terms.emplace_back(index.at({Sym::Bit, -1, -1, j}), -std::ldexp(1.0, j));
    }
    bits.rhs = 0.0;
    bits.kind = RowKind::Eq;
    bits.tag = "stack.bits";
    out->rows.push_back(std::move(bits));
  }

  // (stack symbol, cell symbol, product symbol) triples sharing the pattern
  const std::array<std::array<Sym, 3>, 6> couplings = {{
      {Sym::StackPower, Sym::CellPower, Sym::ProdPower},
      {Sym::DeltaStack, Sym::DeltaCell, Sym::ProdDeltaStack},
      {Sym::StackH2, Sym::CellH2, Sym::ProdH2},
      {Sym::PiStack, Sym::PiCell, Sym::ProdPiStack},
      {Sym::StackExch, Sym::CellExch, Sym::ProdExch},
      {Sym::LambdaStack, Sym::LambdaCell, Sym::ProdLambdaStack},
  }};

  for (int r = 0; r < inst.n_days(); ++r) {
    for (int t = 0; t < inst.n_hours(); ++t) {
      for (const auto& [stack_sym, cell_sym, prod_sym] : couplings) {
        const int stack = index.at({stack_sym, r, t});
        const int cell = index.at({cell_sym, r, t});
        LinearRow sum;
        sum.terms.emplace_back(stack, 1.0);
        for (int j = 0; j < N; ++j) {
          const int e = index.at({prod_sym, r, t, j});
          const int z = index.at({Sym::Bit, -1, -1, j});
          out->product_links.push_back({e, z, cell});
          sum.terms.emplace_back(e, -std::ldexp(1.0, j));
          // -M z <= e <= M z
          out->rows.push_back({{{e, 1.0}, {z, -M}}, 0.0, RowKind::Le, "stack.bigm"});
          out->rows.push_back({{{e, -1.0}, {z, -M}}, 0.0, RowKind::Le, "stack.bigm"});
          // s - M (1-z) <= e <= s + M (1-z)
          out->rows.push_back({{{cell, 1.0}, {e, -1.0}, {z, M}}, M, RowKind::Le, "stack.bigm"});
          out->rows.push_back({{{e, 1.0}, {cell, -1.0}, {z, M}}, M, RowKind::Le, "stack.bigm"});
        }
        sum.rhs = 0.0;
        sum.kind = RowKind::Eq;
        sum.tag = "stack.sum";
        out->rows.push_back(std::move(sum));
      }
    }
  }
}

std::string CompiledProgram::audit_csv() const {
  std::ostringstream out;
  out << "template,count\n";
  for (const auto& [tag, count] : audit) out << tag << ',' << count << "\n";
  out << "covariance_repairs," << covariance_repairs << "\n";
  return out.str();
}

CompiledProgram compile_program(const IesInstance& inst, const ReformulationMode& mode,
                                const ScenarioToggles& toggles) {
  mode.validate();
  CompiledProgram cp;
  cp.mode = mode;

  // variable table in schema order
  const auto schema = decision_schema(inst);
  for (const auto& entry : schema) {
    const int idx = entry.is_binary ? cp.program.add_var(entry.name, true, 0.0, 1.0)
                                    : cp.program.add_var(entry.name);
    cp.index.insert(entry.key, idx);
  }

  ConicProgram& prog = cp.program;

  // commitment logic
  for (const auto& c : build_commitment_constraints(inst)) {
    LinearRow row;
    row.terms = resolve(c.expr, cp.index);
    row.rhs = -c.expr.constant;
    row.kind = c.is_equality ? RowKind::Eq : RowKind::Le;
    row.tag = c.tag;
    prog.rows.push_back(std::move(row));
  }

  // component switches: pin the disabled capacities to zero
  if (!toggles.eb) {
    prog.rows.push_back({{{cp.index.at({Sym::EbCap}), 1.0}}, 0.0, RowKind::Eq, "toggle.eb"});
  }
  if (!toggles.p2hh) {
    for (Sym s : {Sym::NumCells, Sym::ConvCap, Sym::CompCap, Sym::TankCap}) {
      prog.rows.push_back({{{cp.index.at({s}), 1.0}}, 0.0, RowKind::Eq, "toggle.p2hh"});
    }
  }

  // stochastic constraint set
  for (const auto& c : build_stochastic_constraints(inst)) {
    switch (c.kind) {
      case CKind::DeterministicLinear: {
        LinearRow row;
        row.terms = resolve(c.expr, cp.index);
        row.rhs = -c.expr.constant;
        row.kind = c.is_equality ? RowKind::Eq : RowKind::Le;
        row.tag = c.tag;
        prog.rows.push_back(std::move(row));
        break;
      }
      case CKind::StochasticEquality:
        split_stochastic_equality(c, cp.index, &prog);
        break;
      case CKind::DrccInequality:
        if (c.intertemporal) {
          reformulate_intertemporal(c, inst.moments, mode, cp.index, &prog);
        } else {
          reformulate_drcc(c, inst.moments, mode, cp.index, &prog);
        }
        break;
    }
  }

  linearize_stack_coupling(inst, cp.index, &prog);
  build_objective(inst, cp.index, &prog);

  prog.bit_groups.push_back({"nel", cp.index.at({Sym::NumCells}), {}});
  for (int j = 0; j < inst.params.bits; ++j) {
    prog.bit_groups.back().bits.push_back(cp.index.at({Sym::Bit, -1, -1, j}));
  }

  prog.check();

  for (const auto& r : prog.rows) ++cp.audit[r.tag];
  for (const auto& s : prog.socs) ++cp.audit[s.tag];
  for (const auto& s : prog.rsocs) ++cp.audit[s.tag];
  cp.covariance_repairs = inst.moments.joint_repairs;
  return cp;
}

}  // namespace flexplan
