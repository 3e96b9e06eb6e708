#include "flexplan/ies_model.hpp"

#include <cmath>
#include <sstream>

namespace flexplan {

void IesParameters::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0)) throw config_error(std::string("ies: ") + name + " must be >= 0");
  };
  nonneg(cell_cost, "cell_cost");
  nonneg(conv_cost, "conv_cost");
  nonneg(comp_cost, "comp_cost");
  nonneg(tank_cost, "tank_cost");
  nonneg(eb_cost, "eb_cost");
  nonneg(startup_cost, "startup_cost");
  nonneg(shutdown_cost, "shutdown_cost");
  nonneg(trans_cost, "trans_cost");
  if (!(h2_price > 0.0)) throw config_error("ies: h2_price must be > 0");
  if (!(conv_eff > 0.0 && conv_eff <= 1.0)) throw config_error("ies: conv_eff in (0, 1]");
  if (!(eb_eff > 0.0 && eb_eff <= 1.0)) throw config_error("ies: eb_eff in (0, 1]");
  nonneg(comp_mwh_per_kg, "comp_mwh_per_kg");
  if (!(ramp_up > 0.0 && ramp_down > 0.0 && startup_ramp > 0.0 && shutdown_ramp > 0.0)) {
    throw config_error("ies: ramp limits must be > 0");
  }
  if (min_up < 1 || min_down < 1) throw config_error("ies: min up/down times must be >= 1");
  if (!(heat_capacity > 0.0 && thermal_resistance > 0.0)) {
    throw config_error("ies: thermal constants must be > 0");
  }
  if (!(tank_max_kg >= 0.0)) throw config_error("ies: tank_max_kg must be >= 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw config_error("ies: epsilon must be in (0, 1)");
  if (bits < 1 || bits > 20) throw config_error("ies: bits must be in [1, 20]");
  if (!(faraday > 0.0)) throw config_error("ies: faraday constant must be > 0");
}

void ChpRegion::validate() const {
  for (int k = 0; k < 4; ++k) {
    if (cost[k] < 0.0) throw config_error("chp: corner costs must be >= 0");
    if (power_mw[k] < 0.0 || heat_mw[k] < 0.0) {
      throw config_error("chp: corner outputs must be >= 0");
    }
  }
  // corners must trace a convex quadrilateral in (P, Q)
  double sign = 0.0;
  for (int k = 0; k < 4; ++k) {
    const int a = k, b = (k + 1) % 4, c = (k + 2) % 4;
    const double cross = (power_mw[b] - power_mw[a]) * (heat_mw[c] - heat_mw[b]) -
                         (heat_mw[b] - heat_mw[a]) * (power_mw[c] - power_mw[b]);
    if (std::abs(cross) < 1e-15) continue;
    if (sign == 0.0) {
      sign = cross;
    } else if (sign * cross < 0.0) {
      throw config_error("chp: corners do not form a convex quadrilateral");
    }
  }
}

int IesInstance::variable_count_forecast() const {
  const int R = n_days(), T = n_hours(), N = params.bits;
  const int planning = 5 + N;
  const int binaries = 3;
  const int nominal = 4 + 11 + 4 + 2;  // x, scalars, y, (T, mH2); T missing at t=0
  const int factors = 4 + 11 + 4 + 2;  // mirror of the nominal set
  const int products = 6 * N;
  const int epigraph = 1;
  return planning + R * T * (binaries + nominal + factors + products + epigraph) - 2 * R;
}

IesInstance build_instance(const IesParameters& params, const ChpRegion& chp,
                           const CellParameters& cell, const CellOperatingRegion& region,
                           const RepresentativeDaySet& days, const WindMoments& moments,
                           double t_init) {
  params.validate();
  chp.validate();
  cell.validate();
  if (days.hours < 2) throw config_error("instance: need at least 2 hours per day");
  if (days.days < 1) throw config_error("instance: need at least one representative day");
  if (moments.days != days.days || moments.hours != days.hours) {
    throw dimension_error("instance: moments and representative days disagree on (r, t) space");
  }
  if (moments.plants < 1) throw dimension_error("instance: need at least one wind plant");
  if (t_init < cell.temp_min || t_init > cell.temp_max) {
    throw config_error("instance: initial temperature outside the cell band");
  }
  for (double w : days.weight) {
    if (!(w > 0.0)) throw config_error("instance: day weights must be > 0");
  }
  if (params.big_m > 0.0 && params.big_m < max_cell_power_mw(cell)) {
    throw config_error("instance: big_m is below the cell power bound");
  }
  IesInstance inst{params, chp, cell, region, days, moments, t_init};
  return inst;
}

// ---------------------------------------------------------------------------
// schema
// ---------------------------------------------------------------------------

namespace {

std::string rt_name(const char* base, int r, int t) {
  return std::string(base) + "_" + std::to_string(r) + "_" + std::to_string(t);
}

std::string rtc_name(const char* base, int r, int t, int c) {
  return rt_name(base, r, t) + "_" + std::to_string(c);
}

}  // namespace

std::vector<SchemaEntry> decision_schema(const IesInstance& inst) {
  std::vector<SchemaEntry> out;
  const int R = inst.n_days(), T = inst.n_hours(), N = inst.params.bits;
  out.push_back({{Sym::NumCells}, "nel", false});
  out.push_back({{Sym::ConvCap}, "Pconv", false});
  out.push_back({{Sym::CompCap}, "mcomp", false});
  out.push_back({{Sym::TankCap}, "mtank", false});
  out.push_back({{Sym::EbCap}, "Peb", false});
  for (int j = 0; j < N; ++j) {
    out.push_back({{Sym::Bit, -1, -1, j}, "zbit_" + std::to_string(j), true});
  }
  for (int r = 0; r < R; ++r) {
    for (int t = 0; t < T; ++t) {
      out.push_back({{Sym::OnOff, r, t}, rt_name("u", r, t), true});
      out.push_back({{Sym::StartUp, r, t}, rt_name("usu", r, t), true});
      out.push_back({{Sym::ShutDown, r, t}, rt_name("usd", r, t), true});
      for (int k = 0; k < 4; ++k) {
        out.push_back({{Sym::ChpWeight, r, t, k}, rtc_name("x", r, t, k), false});
      }
      out.push_back({{Sym::TransPower, r, t}, rt_name("ptrans", r, t), false});
      out.push_back({{Sym::EbPower, r, t}, rt_name("pEB", r, t), false});
      out.push_back({{Sym::EbHeat, r, t}, rt_name("qEB", r, t), false});
      out.push_back({{Sym::H2Mass, r, t}, rt_name("nH2", r, t), false});
      out.push_back({{Sym::StackPower, r, t}, rt_name("pP2HH", r, t), false});
      out.push_back({{Sym::CellPower, r, t}, rt_name("pp2hh", r, t), false});
      out.push_back({{Sym::StackExch, r, t}, rt_name("qEXC", r, t), false});
      out.push_back({{Sym::CellExch, r, t}, rt_name("qexc", r, t), false});
      out.push_back({{Sym::StackH2, r, t}, rt_name("hP2HH", r, t), false});
      out.push_back({{Sym::CellH2, r, t}, rt_name("hp2hh", r, t), false});
      out.push_back({{Sym::CellHeat, r, t}, rt_name("qp2hh", r, t), false});
      for (int k = 0; k < 4; ++k) {
        out.push_back({{Sym::CellWeight, r, t, k}, rtc_name("y", r, t, k), false});
      }
      if (t >= 1) out.push_back({{Sym::Temp, r, t}, rt_name("T", r, t), false});
      out.push_back({{Sym::TankLevel, r, t}, rt_name("mH2", r, t), false});
      for (int k = 0; k < 4; ++k) {
        out.push_back({{Sym::Alpha, r, t, k}, rtc_name("alpha", r, t, k), false});
      }
      out.push_back({{Sym::Beta, r, t}, rt_name("beta", r, t), false});
      out.push_back({{Sym::Rho, r, t}, rt_name("rho", r, t), false});
      out.push_back({{Sym::Nu, r, t}, rt_name("nu", r, t), false});
      out.push_back({{Sym::Gamma, r, t}, rt_name("gamma", r, t), false});
      out.push_back({{Sym::DeltaStack, r, t}, rt_name("Delta", r, t), false});
      out.push_back({{Sym::DeltaCell, r, t}, rt_name("delta", r, t), false});
      out.push_back({{Sym::LambdaStack, r, t}, rt_name("Lambda", r, t), false});
      out.push_back({{Sym::LambdaCell, r, t}, rt_name("lambda", r, t), false});
      out.push_back({{Sym::PiStack, r, t}, rt_name("Pi", r, t), false});
      out.push_back({{Sym::PiCell, r, t}, rt_name("pi", r, t), false});
      out.push_back({{Sym::Kappa, r, t}, rt_name("kappa", r, t), false});
      for (int k = 0; k < 4; ++k) {
        out.push_back({{Sym::Zeta, r, t, k}, rtc_name("zeta", r, t, k), false});
      }
      if (t >= 1) out.push_back({{Sym::MuTemp, r, t}, rt_name("mu", r, t), false});
      out.push_back({{Sym::UpsilonTank, r, t}, rt_name("upsilon", r, t), false});
      for (int j = 0; j < N; ++j) {
        out.push_back({{Sym::ProdPower, r, t, j}, rtc_name("e_p", r, t, j), false});
        out.push_back({{Sym::ProdDeltaStack, r, t, j}, rtc_name("e_Delta", r, t, j), false});
        out.push_back({{Sym::ProdH2, r, t, j}, rtc_name("e_h", r, t, j), false});
        out.push_back({{Sym::ProdPiStack, r, t, j}, rtc_name("e_Pi", r, t, j), false});
        out.push_back({{Sym::ProdExch, r, t, j}, rtc_name("e_q", r, t, j), false});
        out.push_back({{Sym::ProdLambdaStack, r, t, j}, rtc_name("e_Lambda", r, t, j), false});
      }
      out.push_back({{Sym::TransEpigraph, r, t}, rt_name("wtrans", r, t), false});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// commitment logic
// ---------------------------------------------------------------------------

std::vector<SymbolicConstraint> build_commitment_constraints(const IesInstance& inst) {
  std::vector<SymbolicConstraint> out;
  const int R = inst.n_days(), T = inst.n_hours();
  const int vup = inst.params.min_up, vdn = inst.params.min_down;

  auto det = [&](std::string tag, int r, int t, LinExpr e) {
    SymbolicConstraint c;
    c.kind = CKind::DeterministicLinear;
    c.tag = std::move(tag);
    c.r = r;
    c.t = t;
    c.expr = std::move(e);
    out.push_back(std::move(c));
  };

  for (int r = 0; r < R; ++r) {
    // the plant starts each representative day in the off state
    det("uc.startup0", r, 0,
        LinExpr{}.add({Sym::OnOff, r, 0}, 1.0).add({Sym::StartUp, r, 0}, -1.0));
    for (int t = 1; t < T; ++t) {
      det("uc.startup", r, t,
          LinExpr{}
              .add({Sym::OnOff, r, t - 1}, -1.0)
              .add({Sym::OnOff, r, t}, 1.0)
              .add({Sym::StartUp, r, t}, -1.0));
      det("uc.shutdown", r, t,
          LinExpr{}
              .add({Sym::OnOff, r, t - 1}, 1.0)
              .add({Sym::OnOff, r, t}, -1.0)
              .add({Sym::ShutDown, r, t}, -1.0));
    }
    for (int tau = 1; tau <= std::min(T, vup) - 1; ++tau) {
      det("uc.minup0", r, 0,
          LinExpr{}.add({Sym::OnOff, r, 0}, 1.0).add({Sym::OnOff, r, tau}, -1.0));
    }
    for (int t = 1; t <= T - 2; ++t) {
      for (int tau = t + 1; tau <= std::min(T, vup + t) - 1; ++tau) {
        det("uc.minup", r, t,
            LinExpr{}
                .add({Sym::OnOff, r, t - 1}, -1.0)
                .add({Sym::OnOff, r, t}, 1.0)
                .add({Sym::OnOff, r, tau}, -1.0));
      }
      for (int tau = t + 1; tau <= std::min(T, vdn + t) - 1; ++tau) {
        det("uc.mindown", r, t,
            LinExpr{}
                .add({Sym::OnOff, r, t - 1}, 1.0)
                .add({Sym::OnOff, r, t}, -1.0)
                .add({Sym::OnOff, r, tau}, 1.0)
                .add_const(-1.0));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// stochastic constraints
// ---------------------------------------------------------------------------

std::vector<SymbolicConstraint> build_stochastic_constraints(const IesInstance& inst) {
  std::vector<SymbolicConstraint> out;
  const int R = inst.n_days(), T = inst.n_hours();
  const auto& p = inst.params;
  const double cF = inst.faraday_coeff();
  const double invC = 1.0 / p.heat_capacity;
  const double invRC = 1.0 / (p.thermal_resistance * p.heat_capacity);

  auto det = [&](std::string tag, LinExpr e, bool equality = false) {
    SymbolicConstraint c;
    c.kind = CKind::DeterministicLinear;
    c.tag = std::move(tag);
    c.expr = std::move(e);
    c.is_equality = equality;
    out.push_back(std::move(c));
  };
  auto split = [&](std::string tag, int r, int t, LinExpr nominal, LinExpr factor) {
    SymbolicConstraint c;
    c.kind = CKind::StochasticEquality;
    c.tag = std::move(tag);
    c.r = r;
    c.t = t;
    c.nominal = std::move(nominal);
    c.factor = std::move(factor);
    out.push_back(std::move(c));
  };
  auto drcc = [&](std::string tag, int r, int t, LinExpr load_cur, LinExpr bound) {
    SymbolicConstraint c;
    c.kind = CKind::DrccInequality;
    c.tag = std::move(tag);
    c.r = r;
    c.t = t;
    c.load_cur = std::move(load_cur);
    c.bound = std::move(bound);
    out.push_back(std::move(c));
  };

  // facility bounds
  det("facility", LinExpr{}.add({Sym::ConvCap}, -1.0));
  det("facility", LinExpr{}.add({Sym::CompCap}, -1.0));
  det("facility", LinExpr{}.add({Sym::EbCap}, -1.0));
  det("facility", LinExpr{}.add({Sym::TankCap}, -1.0));
  det("facility", LinExpr{}.add({Sym::TankCap}, 1.0).add_const(-p.tank_max_kg));

  for (int r = 0; r < R; ++r) {
    for (int t = 0; t < T; ++t) {
      // CHP region weights sum to the commitment state
      {
        LinExpr nom, fac;
        for (int k = 0; k < 4; ++k) nom.add({Sym::ChpWeight, r, t, k}, 1.0);
        nom.add({Sym::OnOff, r, t}, -1.0);
        for (int k = 0; k < 4; ++k) fac.add({Sym::Alpha, r, t, k}, 1.0);
        split("chp.integrity", r, t, std::move(nom), std::move(fac));
      }
      for (int k = 0; k < 4; ++k) {
        drcc("chp.weight.lo", r, t, LinExpr{}.add({Sym::Alpha, r, t, k}, -1.0),
             LinExpr{}.add({Sym::ChpWeight, r, t, k}, 1.0));
        drcc("chp.weight.hi", r, t, LinExpr{}.add({Sym::Alpha, r, t, k}, 1.0),
             LinExpr{}.add({Sym::ChpWeight, r, t, k}, -1.0).add_const(1.0));
      }

      // electricity balance
      {
        LinExpr nom, fac;
        nom.add({Sym::TransPower, r, t}, 1.0);
        for (int k = 0; k < 4; ++k) nom.add({Sym::ChpWeight, r, t, k}, inst.chp.power_mw[k]);
        nom.add_const(inst.moments.mean[inst.moments.index(r, t)].sum());
        nom.add({Sym::StackPower, r, t}, -1.0 / p.conv_eff);
        nom.add({Sym::H2Mass, r, t}, -p.comp_mwh_per_kg);
        nom.add({Sym::EbPower, r, t}, -1.0);
        nom.add_const(-inst.days.electric(r, t));
        fac.add({Sym::Beta, r, t}, 1.0);
        for (int k = 0; k < 4; ++k) fac.add({Sym::Alpha, r, t, k}, inst.chp.power_mw[k]);
        fac.add_const(1.0);
        fac.add({Sym::DeltaStack, r, t}, -1.0 / p.conv_eff);
        fac.add({Sym::Gamma, r, t}, -p.comp_mwh_per_kg);
        fac.add({Sym::Rho, r, t}, -1.0);
        split("balance.power", r, t, std::move(nom), std::move(fac));
      }
      // heat balance
      {
        LinExpr nom, fac;
        for (int k = 0; k < 4; ++k) nom.add({Sym::ChpWeight, r, t, k}, inst.chp.heat_mw[k]);
        nom.add({Sym::StackExch, r, t}, 1.0);
        nom.add({Sym::EbHeat, r, t}, 1.0);
        nom.add_const(-inst.days.heat(r, t));
        for (int k = 0; k < 4; ++k) fac.add({Sym::Alpha, r, t, k}, inst.chp.heat_mw[k]);
        fac.add({Sym::LambdaStack, r, t}, 1.0);
        fac.add({Sym::Nu, r, t}, 1.0);
        split("balance.heat", r, t, std::move(nom), std::move(fac));
      }

      // electric boiler
      drcc("eb.lo", r, t, LinExpr{}.add({Sym::Rho, r, t}, -1.0),
           LinExpr{}.add({Sym::EbPower, r, t}, 1.0));
      drcc("eb.hi", r, t, LinExpr{}.add({Sym::Rho, r, t}, 1.0),
           LinExpr{}.add({Sym::EbCap}, 1.0).add({Sym::EbPower, r, t}, -1.0));
      split("eb.ratio", r, t,
            LinExpr{}.add({Sym::EbHeat, r, t}, 1.0).add({Sym::EbPower, r, t}, -p.eb_eff),
            LinExpr{}.add({Sym::Nu, r, t}, 1.0).add({Sym::Rho, r, t}, -p.eb_eff));

      // recycled heat stays nonnegative
      drcc("exc.lo", r, t, LinExpr{}.add({Sym::LambdaCell, r, t}, -1.0),
           LinExpr{}.add({Sym::CellExch, r, t}, 1.0));

      // per-cell energy split
      split("cell.power", r, t,
            LinExpr{}
                .add({Sym::CellPower, r, t}, 1.0)
                .add({Sym::CellH2, r, t}, -1.0)
                .add({Sym::CellHeat, r, t}, -1.0),
            LinExpr{}
                .add({Sym::DeltaCell, r, t}, 1.0)
                .add({Sym::PiCell, r, t}, -1.0)
                .add({Sym::Kappa, r, t}, -1.0));

      // hydrogen mass from stack hydrogen power (Faraday)
      split("h2.stack", r, t,
            LinExpr{}.add({Sym::H2Mass, r, t}, 1.0).add({Sym::StackH2, r, t}, -cF),
            LinExpr{}.add({Sym::Gamma, r, t}, 1.0).add({Sym::PiStack, r, t}, -cF));

      // cell operating-region weights
      {
        LinExpr nom, fac;
        for (int k = 0; k < 4; ++k) nom.add({Sym::CellWeight, r, t, k}, 1.0);
        nom.add_const(-1.0);
        for (int k = 0; k < 4; ++k) fac.add({Sym::Zeta, r, t, k}, 1.0);
        split("cell.integrity", r, t, std::move(nom), std::move(fac));
      }
      for (int k = 0; k < 4; ++k) {
        drcc("cell.weight.lo", r, t, LinExpr{}.add({Sym::Zeta, r, t, k}, -1.0),
             LinExpr{}.add({Sym::CellWeight, r, t, k}, 1.0));
        drcc("cell.weight.hi", r, t, LinExpr{}.add({Sym::Zeta, r, t, k}, 1.0),
             LinExpr{}.add({Sym::CellWeight, r, t, k}, -1.0).add_const(1.0));
      }
      {
        LinExpr nom, fac;
        for (int k = 0; k < 4; ++k) nom.add({Sym::CellWeight, r, t, k}, inst.region.hydrogen_mw[k]);
        nom.add({Sym::CellH2, r, t}, -1.0);
        for (int k = 0; k < 4; ++k) fac.add({Sym::Zeta, r, t, k}, inst.region.hydrogen_mw[k]);
        fac.add({Sym::PiCell, r, t}, -1.0);
        split("cell.h2power", r, t, std::move(nom), std::move(fac));
      }
      {
        LinExpr nom, fac;
        for (int k = 0; k < 4; ++k) nom.add({Sym::CellWeight, r, t, k}, inst.region.heat_mw[k]);
        nom.add({Sym::CellHeat, r, t}, -1.0);
        for (int k = 0; k < 4; ++k) fac.add({Sym::Zeta, r, t, k}, inst.region.heat_mw[k]);
        fac.add({Sym::Kappa, r, t}, -1.0);
        split("cell.heatpower", r, t, std::move(nom), std::move(fac));
      }
      if (t == 0) {
        LinExpr nom, fac;
        for (int k = 0; k < 4; ++k) nom.add({Sym::CellWeight, r, t, k}, inst.region.temperature[k]);
        nom.add_const(-inst.t_init);
        for (int k = 0; k < 4; ++k) fac.add({Sym::Zeta, r, t, k}, inst.region.temperature[k]);
        split("cell.temp0", r, t, std::move(nom), std::move(fac));
      } else {
        LinExpr nom, fac;
        for (int k = 0; k < 4; ++k) nom.add({Sym::CellWeight, r, t, k}, inst.region.temperature[k]);
        nom.add({Sym::Temp, r, t}, -1.0);
        for (int k = 0; k < 4; ++k) fac.add({Sym::Zeta, r, t, k}, inst.region.temperature[k]);
        fac.add({Sym::MuTemp, r, t}, -1.0);
        split("cell.temp", r, t, std::move(nom), std::move(fac));
      }

      // temperature band (the start temperature is known, so t >= 1)
      if (t >= 1) {
        drcc("temp.lo", r, t, LinExpr{}.add({Sym::MuTemp, r, t}, -1.0),
             LinExpr{}.add({Sym::Temp, r, t}, 1.0).add_const(-inst.cell.temp_min));
        drcc("temp.hi", r, t, LinExpr{}.add({Sym::MuTemp, r, t}, 1.0),
             LinExpr{}.add({Sym::Temp, r, t}, -1.0).add_const(inst.cell.temp_max));
      }

      // electrolyte temperature recursion
      if (t == 0) {
        LinExpr nom, fac;
        nom.add({Sym::Temp, r, 1}, 1.0);
        nom.add_const(-inst.t_init);
        nom.add({Sym::CellHeat, r, 0}, -invC);
        nom.add({Sym::CellExch, r, 0}, invC);
        nom.add_const(invRC * (inst.t_init - p.ambient_temp));
        fac.add({Sym::MuTemp, r, 1}, 1.0);
        fac.add({Sym::Kappa, r, 0}, -invC);
        fac.add({Sym::LambdaCell, r, 0}, invC);
        split("temp.evolve0", r, t, std::move(nom), std::move(fac));
      } else if (t <= T - 2) {
        LinExpr nom, fac;
        nom.add({Sym::Temp, r, t + 1}, 1.0);
        nom.add({Sym::Temp, r, t}, -(1.0 - invRC));
        nom.add({Sym::CellHeat, r, t}, -invC);
        nom.add({Sym::CellExch, r, t}, invC);
        nom.add_const(-invRC * p.ambient_temp);
        fac.add({Sym::MuTemp, r, t + 1}, 1.0);
        fac.add({Sym::MuTemp, r, t}, -(1.0 - invRC));
        fac.add({Sym::Kappa, r, t}, -invC);
        fac.add({Sym::LambdaCell, r, t}, invC);
        split("temp.evolve", r, t, std::move(nom), std::move(fac));
      }

      // end-of-day temperature band on the post-horizon state
      if (t == T - 1) {
        LinExpr load, lo_bound, hi_bound;
        load.add({Sym::MuTemp, r, t}, 1.0 - invRC);
        load.add({Sym::Kappa, r, t}, invC);
        load.add({Sym::LambdaCell, r, t}, -invC);
        LinExpr next_temp;  // nominal post-horizon temperature
        next_temp.add({Sym::Temp, r, t}, 1.0 - invRC);
        next_temp.add({Sym::CellHeat, r, t}, invC);
        next_temp.add({Sym::CellExch, r, t}, -invC);
        next_temp.add_const(invRC * p.ambient_temp);

        lo_bound = next_temp;
        lo_bound.add_const(-inst.cell.temp_min);
        LinExpr neg_load;
        for (const auto& [k, c] : load.terms) neg_load.add(k, -c);
        drcc("temp.end.lo", r, t, std::move(neg_load), std::move(lo_bound));

        hi_bound.add_const(inst.cell.temp_max);
        for (const auto& [k, c] : next_temp.terms) hi_bound.add(k, -c);
        hi_bound.add_const(-next_temp.constant);
        drcc("temp.end.hi", r, t, load, std::move(hi_bound));
      }

      // hydrogen tank level
      if (t == 0) {
        split("tank.init", r, t,
              LinExpr{}.add({Sym::TankLevel, r, 0}, 1.0).add({Sym::H2Mass, r, 0}, -1.0),
              LinExpr{}.add({Sym::UpsilonTank, r, 0}, 1.0).add({Sym::Gamma, r, 0}, -1.0));
      } else {
        split("tank.evolve", r, t,
              LinExpr{}
                  .add({Sym::TankLevel, r, t}, 1.0)
                  .add({Sym::TankLevel, r, t - 1}, -1.0)
                  .add({Sym::H2Mass, r, t}, -1.0),
              LinExpr{}
                  .add({Sym::UpsilonTank, r, t}, 1.0)
                  .add({Sym::UpsilonTank, r, t - 1}, -1.0)
                  .add({Sym::Gamma, r, t}, -1.0));
      }
      if (t == T - 1) {
        drcc("tank.end", r, t, LinExpr{}.add({Sym::UpsilonTank, r, t}, 1.0),
             LinExpr{}.add({Sym::TankCap}, 1.0).add({Sym::TankLevel, r, t}, -1.0));
      }

      // converter and compressor capacity
      drcc("conv.cap", r, t, LinExpr{}.add({Sym::DeltaStack, r, t}, 1.0),
           LinExpr{}.add({Sym::ConvCap}, p.conv_eff).add({Sym::StackPower, r, t}, -1.0));
      drcc("comp.cap", r, t, LinExpr{}.add({Sym::Gamma, r, t}, 1.0),
           LinExpr{}.add({Sym::CompCap}, 1.0).add({Sym::H2Mass, r, t}, -1.0));

      // CHP ramping
      if (t == 0) {
        LinExpr load, bound;
        for (int k = 0; k < 4; ++k) load.add({Sym::Alpha, r, 0, k}, inst.chp.power_mw[k]);
        bound.add_const(p.startup_ramp);
        for (int k = 0; k < 4; ++k) bound.add({Sym::ChpWeight, r, 0, k}, -inst.chp.power_mw[k]);
        drcc("chp.rampup0", r, t, std::move(load), std::move(bound));
      } else {
        SymbolicConstraint up;
        up.kind = CKind::DrccInequality;
        up.tag = "chp.rampup";
        up.r = r;
        up.t = t;
        up.intertemporal = true;
        for (int k = 0; k < 4; ++k) {
          up.load_cur.add({Sym::Alpha, r, t, k}, inst.chp.power_mw[k]);
          up.load_prev.add({Sym::Alpha, r, t - 1, k}, -inst.chp.power_mw[k]);
          up.bound.add({Sym::ChpWeight, r, t - 1, k}, inst.chp.power_mw[k]);
          up.bound.add({Sym::ChpWeight, r, t, k}, -inst.chp.power_mw[k]);
        }
        up.bound.add_const(p.startup_ramp);
        up.bound.add({Sym::OnOff, r, t - 1}, p.ramp_up - p.startup_ramp);
        out.push_back(up);

        SymbolicConstraint dn;
        dn.kind = CKind::DrccInequality;
        dn.tag = "chp.rampdown";
        dn.r = r;
        dn.t = t;
        dn.intertemporal = true;
        for (int k = 0; k < 4; ++k) {
          dn.load_cur.add({Sym::Alpha, r, t, k}, -inst.chp.power_mw[k]);
          dn.load_prev.add({Sym::Alpha, r, t - 1, k}, inst.chp.power_mw[k]);
          dn.bound.add({Sym::ChpWeight, r, t - 1, k}, -inst.chp.power_mw[k]);
          dn.bound.add({Sym::ChpWeight, r, t, k}, inst.chp.power_mw[k]);
        }
        dn.bound.add_const(p.shutdown_ramp);
        dn.bound.add({Sym::OnOff, r, t}, p.ramp_down - p.shutdown_ramp);
        out.push_back(dn);
      }
    }
  }
  return out;
}

std::string constraints_to_text(const std::vector<SymbolicConstraint>& list) {
  std::ostringstream out;
  auto expr_text = [](const LinExpr& e) {
    std::ostringstream s;
    for (const auto& [k, c] : e.terms) {
      s << (c >= 0 ? " +" : " ") << c << "*sym" << static_cast<int>(k.sym);
      if (k.r >= 0) s << "[" << k.r << "," << k.t << (k.comp >= 0 ? "," : "") << "]";
    }
    if (e.constant != 0.0) s << (e.constant >= 0 ? " +" : " ") << e.constant;
    return s.str();
  };
  for (const auto& c : list) {
    out << c.tag << " (r=" << c.r << ", t=" << c.t << "): ";
    switch (c.kind) {
      case CKind::DeterministicLinear:
        out << expr_text(c.expr) << (c.is_equality ? " == 0" : " <= 0");
        break;
      case CKind::StochasticEquality:
        out << "nominal:" << expr_text(c.nominal) << " == 0; factor:" << expr_text(c.factor)
            << " == 0";
        break;
      case CKind::DrccInequality:
        out << "P[" << expr_text(c.load_prev) << " (1'w_prev) +" << expr_text(c.load_cur)
            << " (1'w) <= " << expr_text(c.bound) << "] >= 1-eps";
        break;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace flexplan
