#include "flexplan/electrolyser.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flexplan/csv.hpp"

namespace flexplan {

namespace {

constexpr double kWattToMw = 1e-6;

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void CellParameters::validate() const {
  if (!(0.0 < i_min && i_min < i_max)) {
    throw config_error("cell: need 0 < i_min < i_max");
  }
  if (!(temp_min < temp_max)) throw config_error("cell: need temp_min < temp_max");
  if (!(area_cm2 > 0.0)) throw config_error("cell: need positive area");
  if (!(hull_tol_rel > 0.0)) throw config_error("cell: need positive hull tolerance");
  // Exothermic over the whole box: heat release must never be negative.
  for (int a = 0; a <= 20; ++a) {
    const double temp = temp_min + (temp_max - temp_min) * a / 20.0;
    if (cell_voltage(i_min, temp, *this) <= thermal_neutral_voltage(temp, *this)) {
      throw config_error("cell: U_cell <= U_tn at i_min, electrolysis not exothermic");
    }
  }
}

double cell_voltage(double i, double temp, const CellParameters& p) {
  if (!finite(i) || !finite(temp)) throw domain_error("cell_voltage: non-finite input");
  if (i < 0.0) throw domain_error("cell_voltage: negative current density");
  if (temp < p.temp_min - 20.0 || temp > p.temp_max + 20.0) {
    throw domain_error("cell_voltage: temperature outside extrapolation window");
  }
  const double urev = p.urev_ref + p.urev_slope * (temp - 25.0);
  const double uohm = (p.r1 + p.r2 * temp) * i;
  const double arg = 1.0 + (p.t1 + p.t2 / temp + p.t3 / (temp * temp)) * i;
  if (arg <= 0.0) throw domain_error("cell_voltage: activation argument non-positive");
  const double uact = p.s * std::log10(arg);
  return urev + uohm + uact;
}

double thermal_neutral_voltage(double temp, const CellParameters& p) {
  if (!finite(temp)) throw domain_error("thermal_neutral_voltage: non-finite input");
  const double dh = p.enthalpy_ref + p.enthalpy_slope * (temp - 25.0);
  return dh / (2.0 * kFaraday);
}

CellOperatingPoint cell_power_split(double i, double temp, const CellParameters& p) {
  if (!finite(i) || !finite(temp)) throw domain_error("cell_power_split: non-finite input");
  if (i < p.i_min || i > p.i_max || temp < p.temp_min || temp > p.temp_max) {
    throw region_error("cell_power_split: (i, T) outside admissible box");
  }
  CellOperatingPoint pt;
  pt.current_density = i;
  pt.temperature = temp;
  const double ucell = cell_voltage(i, temp, p);
  const double utn = thermal_neutral_voltage(temp, p);
  pt.power_mw = ucell * i * p.area_cm2 * kWattToMw;
  pt.hydrogen_mw = utn * i * p.area_cm2 * kWattToMw;
  pt.heat_mw = pt.power_mw - pt.hydrogen_mw;
  return pt;
}

double thh_residual(double h_mw, double q_mw, double temp, const CellParameters& p) {
  if (h_mw <= 0.0) throw domain_error("thh_residual: hydrogen power must be positive");
  const double utn = thermal_neutral_voltage(temp, p);
  // invert h = U_tn * i * area to recover the current density
  const double i = h_mw / (utn * p.area_cm2 * kWattToMw);
  const double q_surface = (cell_voltage(i, temp, p) - utn) * i * p.area_cm2 * kWattToMw;
  return q_mw - q_surface;
}

namespace {

// Range of heat power spanned by the hull at a fixed (T, h), via enumeration
// of the basic solutions of  sum l_j (T_j, h_j) = (T, h), sum l_j = 1, l >= 0.
// Returns false when (T, h) is outside the hull's projection.
bool hull_heat_range(const CellOperatingRegion& r, double temp, double h, double* q_lo,
                     double* q_hi) {
  bool any = false;
  double lo = 0.0, hi = 0.0;
  // all 3-subsets of the 4 corners (plus degenerate repeats, harmless)
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      for (int c = b + 1; c < 4; ++c) {
        // solve [[Ta Tb Tc],[ha hb hc],[1 1 1]] l = (T,h,1)
        const double m[3][3] = {{r.temperature[a], r.temperature[b], r.temperature[c]},
                                {r.hydrogen_mw[a], r.hydrogen_mw[b], r.hydrogen_mw[c]},
                                {1.0, 1.0, 1.0}};
        const double det = m[0][0] * (m[1][1] - m[1][2]) - m[0][1] * (m[1][0] - m[1][2]) +
                           m[0][2] * (m[1][0] - m[1][1]);
        if (std::abs(det) < 1e-14) continue;
        const double rhs[3] = {temp, h, 1.0};
        double l[3];
        for (int k = 0; k < 3; ++k) {
          double mm[3][3];
          for (int rr = 0; rr < 3; ++rr)
            for (int cc = 0; cc < 3; ++cc) mm[rr][cc] = m[rr][cc];
          for (int rr = 0; rr < 3; ++rr) mm[rr][k] = rhs[rr];
          const double dk = mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1]) -
                            mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0]) +
                            mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0]);
          l[k] = dk / det;
        }
        if (l[0] < -1e-9 || l[1] < -1e-9 || l[2] < -1e-9) continue;
        const int idx[3] = {a, b, c};
        double q = 0.0;
        for (int k = 0; k < 3; ++k) q += l[k] * r.heat_mw[idx[k]];
        if (!any) {
          lo = hi = q;
          any = true;
        } else {
          lo = std::min(lo, q);
          hi = std::max(hi, q);
        }
      }
    }
  }
  *q_lo = lo;
  *q_hi = hi;
  return any;
}

}  // namespace

CellOperatingRegion build_cell_region(const CellParameters& p) {
  if (p.temp_min == p.temp_max || p.i_min == p.i_max) {
    throw config_error("build_cell_region: degenerate (T, i) box");
  }
  p.validate();
  CellOperatingRegion region;
  const double temps[2] = {p.temp_min, p.temp_max};
  const double currents[2] = {p.i_min, p.i_max};
  int c = 0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const auto pt = cell_power_split(currents[b], temps[a], p);
      region.temperature[c] = pt.temperature;
      region.hydrogen_mw[c] = pt.hydrogen_mw;
      region.heat_mw[c] = pt.heat_mw;
      ++c;
    }
  }

  double max_power = 0.0;
  for (int k = 0; k < 4; ++k) {
    max_power = std::max(max_power, region.hydrogen_mw[k] + region.heat_mw[k]);
  }
  region.tolerance_mw = p.hull_tol_rel * max_power;

  // residual of the true surface against the hull over a 41x41 grid
  double worst = 0.0;
  for (int a = 0; a <= 40; ++a) {
    for (int b = 0; b <= 40; ++b) {
      const double temp = p.temp_min + (p.temp_max - p.temp_min) * a / 40.0;
      const double i = p.i_min + (p.i_max - p.i_min) * b / 40.0;
      const auto pt = cell_power_split(i, temp, p);
      double q_lo, q_hi;
      if (!hull_heat_range(region, temp, pt.hydrogen_mw, &q_lo, &q_hi)) {
        // (T, h) itself escaped the projected hull; treat the full heat value
        // as residual so the configuration is flagged loudly.
        worst = std::max(worst, pt.heat_mw);
        continue;
      }
      const double dist = std::max({q_lo - pt.heat_mw, pt.heat_mw - q_hi, 0.0});
      worst = std::max(worst, dist);
    }
  }
  region.max_residual_mw = worst;
  return region;
}

double max_cell_power_mw(const CellParameters& p) {
  return cell_voltage(p.i_max, p.temp_min, p) * p.i_max * p.area_cm2 * kWattToMw;
}

std::string region_to_csv(const CellOperatingRegion& region) {
  std::ostringstream out;
  out << "corner,temperature_c,hydrogen_mw,heat_mw\n";
  for (int k = 0; k < 4; ++k) {
    out << k << ',' << csv::format_double(region.temperature[k]) << ','
        << csv::format_double(region.hydrogen_mw[k]) << ','
        << csv::format_double(region.heat_mw[k]) << "\n";
  }
  return out.str();
}

}  // namespace flexplan
