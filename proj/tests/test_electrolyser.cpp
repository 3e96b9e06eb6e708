#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "flexplan/electrolyser.hpp"

using namespace flexplan;

TEST_CASE("zero current leaves only the reversible voltage") {
  CellParameters p;
  for (double temp : {60.0, 70.0, 80.0}) {
    const double urev = p.urev_ref + p.urev_slope * (temp - 25.0);
    CHECK(cell_voltage(0.0, temp, p) == doctest::Approx(urev).epsilon(1e-12));
  }
}

TEST_CASE("over-potentials grow with current") {
  CellParameters p;
  CHECK(cell_voltage(0.4, 70.0, p) > cell_voltage(0.2, 70.0, p));
}

TEST_CASE("higher temperature lowers the cell voltage") {
  CellParameters p;
  CHECK(cell_voltage(0.3, 80.0, p) < cell_voltage(0.3, 60.0, p));
}

TEST_CASE("voltage is strictly increasing in current density (finite differences)") {
  CellParameters p;
  const double step = 1e-4;
  for (int a = 0; a <= 10; ++a) {
    const double temp = 60.0 + 2.0 * a;
    for (int b = 0; b < 40; ++b) {
      const double i = 0.2 + 0.005 * b;
      CHECK(cell_voltage(i + step, temp, p) - cell_voltage(i, temp, p) > 0.0);
    }
  }
}

TEST_CASE("non-finite input is rejected") {
  CellParameters p;
  CHECK_THROWS_AS(cell_voltage(std::nan(""), 70.0, p), Error);
  CHECK_THROWS_AS(thermal_neutral_voltage(std::nan(""), p), Error);
}

TEST_CASE("thermal neutral voltage at 25C from tabulated enthalpy") {
  CellParameters p;
  // dH/(2F) with dH = 285.84 kJ/mol, F = 96485 C/mol
  const double expected = 285840.0 / (2.0 * 96485.0);
  CHECK(thermal_neutral_voltage(25.0, p) == doctest::Approx(expected).epsilon(2e-5));
}

TEST_CASE("thermal neutral voltage is near-constant over the temperature box") {
  CellParameters p;
  const double u60 = thermal_neutral_voltage(60.0, p);
  const double u80 = thermal_neutral_voltage(80.0, p);
  CHECK(std::abs(u80 - u60) / u60 <= 0.0044);
}

TEST_CASE("U_tn stays below the cell voltage across the box") {
  CellParameters p;
  for (int a = 0; a <= 20; ++a) {
    const double temp = 60.0 + a;
    CHECK(thermal_neutral_voltage(temp, p) < cell_voltage(p.i_min, temp, p));
  }
}

TEST_CASE("power split identity and ratio bands on a 41x41 grid") {
  CellParameters p;
  double q_lo = 1.0, q_hi = 0.0, h_lo = 1.0, h_hi = 0.0;
  for (int a = 0; a <= 40; ++a) {
    for (int b = 0; b <= 40; ++b) {
      const double temp = 60.0 + 0.5 * a;
      const double i = 0.2 + 0.005 * b;
      const auto pt = cell_power_split(i, temp, p);
      CHECK(pt.power_mw - pt.hydrogen_mw - pt.heat_mw == doctest::Approx(0.0).epsilon(1e-15));
      CHECK(pt.heat_mw >= 0.0);
      CHECK(pt.hydrogen_mw > 0.0);
      const double qr = pt.heat_mw / pt.power_mw;
      const double hr = pt.hydrogen_mw / pt.power_mw;
      q_lo = std::min(q_lo, qr);
      q_hi = std::max(q_hi, qr);
      h_lo = std::min(h_lo, hr);
      h_hi = std::max(h_hi, hr);
    }
  }
  CHECK(q_lo >= 0.18);
  CHECK(q_hi <= 0.26);
  CHECK(h_lo >= 0.74);
  CHECK(h_hi <= 0.82);
}

TEST_CASE("power split rejects points outside the admissible box") {
  CellParameters p;
  CHECK_THROWS_AS(cell_power_split(0.1, 70.0, p), Error);
  CHECK_THROWS_AS(cell_power_split(0.3, 90.0, p), Error);
}

TEST_CASE("region corners sit at the box corners") {
  CellParameters p;
  const auto r = build_cell_region(p);
  CHECK(r.temperature[0] == 60.0);
  CHECK(r.temperature[1] == 60.0);
  CHECK(r.temperature[2] == 80.0);
  CHECK(r.temperature[3] == 80.0);
  const auto c0 = cell_power_split(0.2, 60.0, p);
  CHECK(r.hydrogen_mw[0] == doctest::Approx(c0.hydrogen_mw));
  CHECK(r.heat_mw[0] == doctest::Approx(c0.heat_mw));
  const auto c3 = cell_power_split(0.4, 80.0, p);
  CHECK(r.hydrogen_mw[3] == doctest::Approx(c3.hydrogen_mw));
}

TEST_CASE("doubling the area doubles corner powers, temperatures unchanged") {
  CellParameters p;
  const auto r1 = build_cell_region(p);
  CellParameters p2 = p;
  p2.area_cm2 *= 2.0;
  const auto r2 = build_cell_region(p2);
  for (int k = 0; k < 4; ++k) {
    CHECK(r2.hydrogen_mw[k] == doctest::Approx(2.0 * r1.hydrogen_mw[k]).epsilon(1e-12));
    CHECK(r2.heat_mw[k] == doctest::Approx(2.0 * r1.heat_mw[k]).epsilon(1e-12));
    CHECK(r2.temperature[k] == r1.temperature[k]);
  }
}

TEST_CASE("degenerate box is rejected") {
  CellParameters p;
  p.temp_min = p.temp_max = 70.0;
  CHECK_THROWS_AS(build_cell_region(p), Error);
}

namespace {

// Independent projection oracle: exact nearest point on the corner hull by
// enumerating every vertex subset and solving the equality-constrained least
// squares on its affine hull, keeping candidates with nonnegative weights.
double hull_distance_brute(const CellOperatingRegion& r, double temp, double h, double q) {
  // scale temperature into the power range so the metric is comparable
  const double tscale = 1e-3;
  Eigen::Matrix<double, 3, 4> v;
  for (int k = 0; k < 4; ++k) {
    v(0, k) = r.hydrogen_mw[k];
    v(1, k) = r.heat_mw[k];
    v(2, k) = tscale * r.temperature[k];
  }
  const Eigen::Vector3d x(h, q, tscale * temp);

  double best = 1e100;
  for (int mask = 1; mask < 16; ++mask) {
    std::vector<int> idx;
    for (int k = 0; k < 4; ++k) {
      if (mask & (1 << k)) idx.push_back(k);
    }
    const int m = static_cast<int>(idx.size());
    // minimize |V l - x|^2 subject to 1'l = 1 via the KKT system
    Eigen::MatrixXd vs(3, m);
    for (int k = 0; k < m; ++k) vs.col(k) = v.col(idx[k]);
    Eigen::MatrixXd kkt(m + 1, m + 1);
    kkt.topLeftCorner(m, m) = vs.transpose() * vs;
    kkt.topRightCorner(m, 1).setOnes();
    kkt.bottomLeftCorner(1, m).setOnes();
    kkt(m, m) = 0.0;
    Eigen::VectorXd rhs(m + 1);
    rhs.head(m) = vs.transpose() * x;
    rhs(m) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    bool ok = true;
    for (int k = 0; k < m; ++k) {
      if (sol(k) < -1e-9) ok = false;
    }
    if (!ok) continue;
    best = std::min(best, (vs * sol.head(m) - x).norm());
  }
  return best;
}

}  // namespace

TEST_CASE("hull residual over the sampled surface stays within tolerance") {
  CellParameters p;
  const auto r = build_cell_region(p);
  CHECK(r.max_residual_mw <= r.tolerance_mw);

  // brute-force projection agrees on a coarser grid
  double worst = 0.0;
  for (int a = 0; a <= 8; ++a) {
    for (int b = 0; b <= 8; ++b) {
      const double temp = 60.0 + 2.5 * a;
      const double i = 0.2 + 0.025 * b;
      const auto pt = cell_power_split(i, temp, p);
      worst = std::max(worst,
                       hull_distance_brute(r, pt.temperature, pt.hydrogen_mw, pt.heat_mw));
    }
  }
  CHECK(worst <= r.tolerance_mw);
}

TEST_CASE("convex combinations of corners keep positive hydrogen and heat") {
  CellParameters p;
  const auto r = build_cell_region(p);
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; a + b <= 5; ++b) {
      for (int c = 0; a + b + c <= 5; ++c) {
        const double l0 = a / 5.0, l1 = b / 5.0, l2 = c / 5.0, l3 = 1.0 - l0 - l1 - l2;
        double h = 0.0, q = 0.0;
        const double l[4] = {l0, l1, l2, l3};
        for (int k = 0; k < 4; ++k) {
          h += l[k] * r.hydrogen_mw[k];
          q += l[k] * r.heat_mw[k];
        }
        CHECK(h >= 0.0);
        CHECK(q >= 0.0);
      }
    }
  }
}

TEST_CASE("thh residual vanishes on the surface and is affine in q") {
  CellParameters p;
  const auto pt = cell_power_split(0.31, 72.0, p);
  const double r0 = thh_residual(pt.hydrogen_mw, pt.heat_mw, pt.temperature, p);
  CHECK(std::abs(r0) <= 1e-9 * pt.heat_mw);

  const double bump = 0.01 * pt.heat_mw;
  const double r1 = thh_residual(pt.hydrogen_mw, pt.heat_mw + bump, pt.temperature, p);
  CHECK(r1 == doctest::Approx(bump).epsilon(1e-9));

  CHECK_THROWS_AS(thh_residual(0.0, pt.heat_mw, pt.temperature, p), Error);
}

TEST_CASE("all four region corners lie on the surface") {
  CellParameters p;
  const auto r = build_cell_region(p);
  for (int k = 0; k < 4; ++k) {
    const double resid = thh_residual(r.hydrogen_mw[k], r.heat_mw[k], r.temperature[k], p);
    CHECK(std::abs(resid) <= 1e-9 * std::max(1e-12, r.heat_mw[k]));
  }
}
