#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <map>

#include "flexplan/ies_model.hpp"
#include "support/fixtures.hpp"

using namespace flexplan;
using flexplan::testing::desk_instance;
using flexplan::testing::tiny_instance;

namespace {

// evaluate a symbolic expression against a value function
double eval_expr(const LinExpr& e, const std::function<double(const VarKey&)>& value) {
  double v = e.constant;
  for (const auto& [key, coef] : e.terms) v += coef * value(key);
  return v;
}

// check every commitment row against a concrete (u, usu, usd) assignment
bool commitment_feasible(const IesInstance& inst, const std::vector<double>& u,
                         const std::vector<double>& usu, const std::vector<double>& usd) {
  const auto rows = build_commitment_constraints(inst);
  auto value = [&](const VarKey& k) {
    switch (k.sym) {
      case Sym::OnOff: return u[k.t];
      case Sym::StartUp: return usu[k.t];
      case Sym::ShutDown: return usd[k.t];
      default: return 0.0;
    }
  };
  for (const auto& c : rows) {
    if (c.r != 0) continue;
    if (eval_expr(c.expr, value) > 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("instance echoes its dimensions") {
  auto d = desk_instance();
  CHECK(d.instance.n_days() == 2);
  CHECK(d.instance.n_hours() == 8);
  CHECK(d.instance.n_plants() == 2);
  CHECK(d.instance.variable_count_forecast() ==
        static_cast<int>(decision_schema(d.instance).size()));
}

TEST_CASE("initial temperature outside the band is rejected") {
  auto d = desk_instance();
  CHECK_THROWS_AS(build_instance(d.instance.params, d.instance.chp, d.instance.cell,
                                 d.instance.region, d.instance.days, d.instance.moments, 90.0),
                  Error);
}

TEST_CASE("epsilon outside the open interval is rejected") {
  auto d = desk_instance();
  IesParameters bad = d.instance.params;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(build_instance(bad, d.instance.chp, d.instance.cell, d.instance.region,
                                 d.instance.days, d.instance.moments, 70.0),
                  Error);
}

TEST_CASE("commitment logic over a 4-hour day") {
  auto d = tiny_instance();  // min up/down default to 2 hours

  SUBCASE("a clean on-block with matching start/stop flags is accepted") {
    CHECK(commitment_feasible(d.instance, {0, 1, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}));
  }
  SUBCASE("being on at the first hour demands a start-up flag") {
    CHECK_FALSE(commitment_feasible(d.instance, {1, 1, 1, 1}, {0, 0, 0, 0}, {0, 0, 0, 0}));
    CHECK(commitment_feasible(d.instance, {1, 1, 1, 1}, {1, 0, 0, 0}, {0, 0, 0, 0}));
  }
  SUBCASE("exhaustive 4-hour patterns against direct rule evaluation") {
    // oracle re-states the start/stop linking and windowed min up/down rules
    const int T = 4, vup = d.instance.params.min_up, vdn = d.instance.params.min_down;
    for (int mask = 0; mask < (1 << T); ++mask) {
      std::vector<double> u(T), usu(T), usd(T);
      for (int t = 0; t < T; ++t) u[t] = (mask >> t) & 1;
      for (int t = 0; t < T; ++t) {
        const double prev = t == 0 ? 0.0 : u[t - 1];
        usu[t] = std::max(0.0, u[t] - prev);
        usd[t] = t == 0 ? 0.0 : std::max(0.0, u[t - 1] - u[t]);
      }
      bool ok = true;
      for (int t = 0; t <= T - 2 && ok; ++t) {
        const double prev = t == 0 ? 0.0 : u[t - 1];
        if (t == 0 || t >= 1) {
          if (u[t] - prev > 0.5) {  // switched on: must stay on within the window
            for (int tau = t + 1; tau <= std::min(T, vup + t) - 1; ++tau) {
              if (u[tau] < 0.5) ok = false;
            }
          }
          if (t >= 1 && prev - u[t] > 0.5) {  // switched off: must stay off
            for (int tau = t + 1; tau <= std::min(T, vdn + t) - 1; ++tau) {
              if (u[tau] > 0.5) ok = false;
            }
          }
        }
      }
      CHECK(commitment_feasible(d.instance, u, usu, usd) == ok);
    }
  }
  SUBCASE("min-up of 3 rejects a single-hour on-block") {
    auto d3 = tiny_instance();
    IesParameters p3 = d3.instance.params;
    p3.min_up = 3;
    const auto inst = build_instance(p3, d3.instance.chp, d3.instance.cell, d3.instance.region,
                                     d3.instance.days, d3.instance.moments, 70.0);
    CHECK_FALSE(commitment_feasible(inst, {0, 1, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}));
    CHECK(commitment_feasible(inst, {0, 1, 1, 1}, {0, 1, 0, 0}, {0, 0, 0, 0}));
  }
}

TEST_CASE("hydrogen conversion factor from Faraday's law") {
  auto d = desk_instance();
  // 1 MW of hydrogen power for one hour with U_tn(25C) = 1.4813 V
  CHECK(d.instance.faraday_coeff() == doctest::Approx(25.19).epsilon(2e-4));

  // the h2.stack factor row ties gamma to Pi with the same coefficient
  const auto list = build_stochastic_constraints(d.instance);
  bool found = false;
  for (const auto& c : list) {
    if (c.tag == "h2.stack" && c.r == 0 && c.t == 0) {
      found = true;
      REQUIRE(c.factor.terms.size() == 2);
      CHECK(c.factor.terms[0].first.sym == Sym::Gamma);
      CHECK(c.factor.terms[0].second == 1.0);
      CHECK(c.factor.terms[1].first.sym == Sym::PiStack);
      CHECK(c.factor.terms[1].second ==
            doctest::Approx(-d.instance.faraday_coeff()).epsilon(1e-12));
    }
  }
  CHECK(found);
}

TEST_CASE("tank recursion emits one anchor and one recursion row per day") {
  auto d = tiny_instance();
  // shrink to 2 hours
  RepresentativeDaySet days;
  days.days = 1;
  days.hours = 2;
  days.electric_mw = {0.06, 0.055};
  days.heat_mw = {0.11, 0.115};
  days.weight = {365.0};
  std::vector<std::vector<double>> means = {{0.05, 0.055}, {0.04, 0.045}};
  const auto sc = flexplan::testing::synthetic_wind(means, 1, 2, 100,
                                                    flexplan::testing::desk_wind_cov(), 0.5, 3);
  const auto inst = build_instance(d.instance.params, d.instance.chp, d.instance.cell,
                                   d.instance.region, days, estimate_moments(sc), 70.0);
  int init = 0, evolve = 0;
  for (const auto& c : build_stochastic_constraints(inst)) {
    if (c.tag == "tank.init") ++init;
    if (c.tag == "tank.evolve") ++evolve;
  }
  CHECK(init == 1);
  CHECK(evolve == 1);
}

TEST_CASE("power balance factor row matches the split template") {
  auto d = tiny_instance();
  const auto& inst = d.instance;
  for (const auto& c : build_stochastic_constraints(inst)) {
    if (c.tag != "balance.power" || c.r != 0 || c.t != 1) continue;
    // beta + P'alpha + 1 = Delta/eta_conv + gamma*eta_comp + rho
    std::map<int, double> by_sym;
    for (const auto& [key, coef] : c.factor.terms) {
      by_sym[static_cast<int>(key.sym)] += coef * (key.sym == Sym::Alpha ? 0.0 : 1.0);
      if (key.sym == Sym::Alpha) by_sym[static_cast<int>(Sym::Alpha)] += coef;
    }
    CHECK(c.factor.constant == 1.0);
    CHECK(by_sym[static_cast<int>(Sym::Beta)] == 1.0);
    const double psum =
        inst.chp.power_mw[0] + inst.chp.power_mw[1] + inst.chp.power_mw[2] + inst.chp.power_mw[3];
    CHECK(by_sym[static_cast<int>(Sym::Alpha)] == doctest::Approx(psum));
    CHECK(by_sym[static_cast<int>(Sym::DeltaStack)] ==
          doctest::Approx(-1.0 / inst.params.conv_eff));
    CHECK(by_sym[static_cast<int>(Sym::Gamma)] ==
          doctest::Approx(-inst.params.comp_mwh_per_kg));
    CHECK(by_sym[static_cast<int>(Sym::Rho)] == -1.0);
    return;
  }
  FAIL("balance.power at (0, 1) not found");
}

TEST_CASE("temperature factor recursion at the first hour is (kappa - lambda)/C") {
  auto d = tiny_instance();
  for (const auto& c : build_stochastic_constraints(d.instance)) {
    if (c.tag != "temp.evolve0" || c.r != 0) continue;
    std::map<int, double> by_sym;
    for (const auto& [key, coef] : c.factor.terms) by_sym[static_cast<int>(key.sym)] += coef;
    const double invC = 1.0 / d.instance.params.heat_capacity;
    CHECK(by_sym[static_cast<int>(Sym::MuTemp)] == 1.0);
    CHECK(by_sym[static_cast<int>(Sym::Kappa)] == doctest::Approx(-invC));
    CHECK(by_sym[static_cast<int>(Sym::LambdaCell)] == doctest::Approx(invC));
    return;
  }
  FAIL("temp.evolve0 not found");
}

TEST_CASE("every emitted symbol resolves against the schema") {
  auto d = tiny_instance();
  const auto schema = decision_schema(d.instance);
  std::map<std::string, int> names;
  for (const auto& e : schema) ++names[e.name];
  for (const auto& [name, count] : names) CHECK(count == 1);

  auto contains = [&](const VarKey& k) {
    for (const auto& e : schema) {
      if (e.key == k) return true;
    }
    return false;
  };
  auto check_expr = [&](const LinExpr& e) {
    for (const auto& [key, coef] : e.terms) CHECK(contains(key));
  };
  for (const auto& c : build_commitment_constraints(d.instance)) check_expr(c.expr);
  for (const auto& c : build_stochastic_constraints(d.instance)) {
    check_expr(c.expr);
    check_expr(c.nominal);
    check_expr(c.factor);
    check_expr(c.load_prev);
    check_expr(c.load_cur);
    check_expr(c.bound);
  }
}

TEST_CASE("constraint counts per template follow the closed forms") {
  auto d = desk_instance();
  const int R = 2, T = 8;
  std::map<std::string, int> counts;
  for (const auto& c : build_stochastic_constraints(d.instance)) ++counts[c.tag];
  CHECK(counts["chp.integrity"] == R * T);
  CHECK(counts["balance.power"] == R * T);
  CHECK(counts["balance.heat"] == R * T);
  CHECK(counts["eb.ratio"] == R * T);
  CHECK(counts["cell.power"] == R * T);
  CHECK(counts["h2.stack"] == R * T);
  CHECK(counts["cell.integrity"] == R * T);
  CHECK(counts["cell.h2power"] == R * T);
  CHECK(counts["cell.heatpower"] == R * T);
  CHECK(counts["cell.temp0"] == R);
  CHECK(counts["cell.temp"] == R * (T - 1));
  CHECK(counts["temp.evolve0"] == R);
  CHECK(counts["temp.evolve"] == R * (T - 2));
  CHECK(counts["tank.init"] == R);
  CHECK(counts["tank.evolve"] == R * (T - 1));
  CHECK(counts["chp.weight.lo"] == 4 * R * T);
  CHECK(counts["chp.weight.hi"] == 4 * R * T);
  CHECK(counts["cell.weight.lo"] == 4 * R * T);
  CHECK(counts["cell.weight.hi"] == 4 * R * T);
  CHECK(counts["eb.lo"] == R * T);
  CHECK(counts["eb.hi"] == R * T);
  CHECK(counts["exc.lo"] == R * T);
  CHECK(counts["temp.lo"] == R * (T - 1));
  CHECK(counts["temp.hi"] == R * (T - 1));
  CHECK(counts["temp.end.lo"] == R);
  CHECK(counts["temp.end.hi"] == R);
  CHECK(counts["tank.end"] == R);
  CHECK(counts["conv.cap"] == R * T);
  CHECK(counts["comp.cap"] == R * T);
  CHECK(counts["chp.rampup0"] == R);
  CHECK(counts["chp.rampup"] == R * (T - 1));
  CHECK(counts["chp.rampdown"] == R * (T - 1));
  CHECK(counts["facility"] == 5);

  std::map<std::string, int> uc;
  for (const auto& c : build_commitment_constraints(d.instance)) ++uc[c.tag];
  CHECK(uc["uc.startup0"] == R);
  CHECK(uc["uc.startup"] == R * (T - 1));
  CHECK(uc["uc.shutdown"] == R * (T - 1));
  const int vup = d.instance.params.min_up;
  CHECK(uc["uc.minup0"] == R * (std::min(T, vup) - 1));
}
