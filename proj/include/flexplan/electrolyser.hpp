#pragma once

#include <array>
#include <string>

#include "flexplan/common.hpp"

namespace flexplan {

/// Empirical alkaline polarization parameters. The cell voltage model is
///
///   U_cell(i, T) = U_rev(T) + (r1 + r2 T) i + s log10(1 + (t1 + t2/T + t3/T^2) i)
///
/// with current density i in A/cm2 and temperature T in degC. The thermal
/// neutral voltage comes from the molar reaction enthalpy,
/// U_tn(T) = (dh_ref + dh_slope (T - 25)) / (2 F). All coefficients are
/// configuration inputs; the defaults below are tuned so that the heat and
/// hydrogen shares over the admissible box land in the documented
/// 0.18-0.26 / 0.74-0.82 bands.
struct CellParameters {
  // reversible voltage, V and V/degC
  double urev_ref = 1.229;
  double urev_slope = -0.0009;
  // ohmic, Ohm*cm2 and Ohm*cm2/degC
  double r1 = 0.5;
  double r2 = -0.002;
  // activation, V and cm2/A, cm2*degC/A, cm2*degC^2/A
  double s = 0.19;
  double t1 = 3300.0;
  double t2 = 160000.0;
  double t3 = 200000.0;
  // geometry and admissible box
  double area_cm2 = 2500.0;  // 0.25 m2
  double i_min = 0.2;        // A/cm2
  double i_max = 0.4;
  double temp_min = 60.0;  // degC
  double temp_max = 80.0;
  // molar enthalpy data for U_tn, J/mol and J/(mol*degC)
  double enthalpy_ref = 285840.0;
  double enthalpy_slope = 16.0;
  // reference temperature for the constant-U_tn approximation used by the
  // planning model (Faraday conversion)
  double utn_ref_temp = 25.0;
  // admissible relative residual of the corner-point hull, fraction of the
  // largest corner power
  double hull_tol_rel = 0.02;

  void validate() const;
};

struct CellOperatingPoint {
  double current_density = 0.0;  // A/cm2
  double temperature = 0.0;      // degC
  double power_mw = 0.0;         // injected electric power
  double hydrogen_mw = 0.0;      // hydrogen production power
  double heat_mw = 0.0;          // heat release, power_mw - hydrogen_mw
};

/// Corner points of the linearized (T, P_H2, P_Heat) operating region, in the
/// fixed order (T_min,i_min), (T_min,i_max), (T_max,i_min), (T_max,i_max).
struct CellOperatingRegion {
  std::array<double, 4> temperature{};  // degC
  std::array<double, 4> hydrogen_mw{};
  std::array<double, 4> heat_mw{};
  /// Largest heat-power distance (MW) between a sampled surface point and
  /// the hull, over a dense (T, i) grid.
  double max_residual_mw = 0.0;
  /// Residual tolerance in MW implied by hull_tol_rel.
  double tolerance_mw = 0.0;
};

/// Cell voltage in V. Accepts a modest extrapolation window around the
/// temperature box; rejects non-finite input and negative current.
double cell_voltage(double i, double temp, const CellParameters& p);

/// Thermal neutral voltage in V.
double thermal_neutral_voltage(double temp, const CellParameters& p);

/// Splits injected power into hydrogen and heat at an admissible (i, T).
CellOperatingPoint cell_power_split(double i, double temp, const CellParameters& p);

/// Residual of the T-H-H surface relation at (h, q, T): zero iff the triple
/// lies on the surface. h, q in MW; returns MW.
double thh_residual(double h_mw, double q_mw, double temp, const CellParameters& p);

/// Enumerates the four box corners and reports the hull approximation error
/// over a 41x41 sample of the true surface.
CellOperatingRegion build_cell_region(const CellParameters& p);

/// Largest single-cell electric power over the admissible box, MW. This is
/// the default big-M for the stack linearization.
double max_cell_power_mw(const CellParameters& p);

/// Corner table as CSV text (header + 4 rows), for plotting.
std::string region_to_csv(const CellOperatingRegion& region);

}  // namespace flexplan
