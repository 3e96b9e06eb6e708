#pragma once

#include <string>
#include <vector>

#include "flexplan/electrolyser.hpp"
#include "flexplan/scenarios.hpp"

namespace flexplan {

/// Cost, efficiency and physical parameters of the integrated energy system.
struct IesParameters {
  // annualized unit costs
  double cell_cost = 60.0;      // $/cell*yr
  double conv_cost = 3000.0;    // $/MW*yr
  double comp_cost = 50.0;      // $/(kg/h)*yr
  double tank_cost = 10.0;      // $/kg*yr
  double eb_cost = 5000.0;      // $/MW*yr
  double startup_cost = 20.0;   // $/event
  double shutdown_cost = 20.0;  // $/event
  double trans_cost = 1500.0;   // $/MW^2 h
  double h2_price = 2.5;        // $/kg
  // efficiencies
  double conv_eff = 0.95;          // AC/DC converter
  double eb_eff = 0.99;            // electric boiler power-to-heat
  double comp_mwh_per_kg = 0.0025; // compressor specific energy
  // CHP operational limits
  double ramp_up = 0.08;        // MW/h
  double ramp_down = 0.08;
  double startup_ramp = 0.15;
  double shutdown_ramp = 0.15;
  int min_up = 2;               // hours
  int min_down = 2;
  // electrolyte thermal model
  double heat_capacity = 2e-4;        // MWh/degC per cell
  double thermal_resistance = 2.5e5;  // degC/MW per cell
  double ambient_temp = 20.0;         // degC
  // limits and knobs
  double tank_max_kg = 20.0;
  double epsilon = 0.05;      // chance-constraint risk level
  int bits = 5;               // binary expansion width N
  double big_m = 0.0;         // 0: derive from the cell power bound
  double faraday = kFaraday;  // C/mol

  void validate() const;
};

/// Corner representation of the CHP feasible set in (P, Q) with fuel cost.
struct ChpRegion {
  std::array<double, 4> power_mw{0.04, 0.15, 0.105, 0.028};
  std::array<double, 4> heat_mw{0.0, 0.0, 0.135, 0.054};
  std::array<double, 4> cost{4.2, 12.0, 11.1, 3.32};  // $/h

  void validate() const;
};

struct IesInstance {
  IesParameters params;
  ChpRegion chp;
  CellParameters cell;
  CellOperatingRegion region;
  RepresentativeDaySet days;
  WindMoments moments;
  double t_init = 80.0;  // degC, pre-known start temperature

  int n_days() const { return days.days; }
  int n_hours() const { return days.hours; }
  int n_plants() const { return moments.plants; }
  /// Constant thermal-neutral voltage used by the Faraday conversion.
  double utn_const() const { return thermal_neutral_voltage(cell.utn_ref_temp, cell); }
  /// kg of hydrogen per MWh of hydrogen power: 3.6e6 / (U_tn F).
  double faraday_coeff() const { return 3.6e6 / (utn_const() * params.faraday); }
  /// Big-M actually in force (configured or derived).
  double effective_big_m() const {
    return params.big_m > 0.0 ? params.big_m : max_cell_power_mw(cell);
  }
  /// Forecast of the compiled variable count, reported at build time.
  int variable_count_forecast() const;
};

/// Cross-checks every component and returns the assembled instance.
IesInstance build_instance(const IesParameters& params, const ChpRegion& chp,
                           const CellParameters& cell, const CellOperatingRegion& region,
                           const RepresentativeDaySet& days, const WindMoments& moments,
                           double t_init);

// ---------------------------------------------------------------------------
// symbolic decision space
// ---------------------------------------------------------------------------

enum class Sym {
  // planning
  NumCells, ConvCap, CompCap, TankCap, EbCap, Bit,
  // commitment binaries, per (r,t)
  OnOff, StartUp, ShutDown,
  // nominal recourse, per (r,t)
  ChpWeight, TransPower, EbPower, EbHeat, H2Mass, StackPower, CellPower, StackExch, CellExch,
  StackH2, CellH2, CellHeat, CellWeight, Temp, TankLevel,
  // participation factors, per (r,t)
  Alpha, Beta, Rho, Nu, Gamma, DeltaStack, DeltaCell, LambdaStack, LambdaCell, PiStack, PiCell,
  Kappa, Zeta, MuTemp, UpsilonTank,
  // linearization products and objective epigraphs
  ProdPower, ProdDeltaStack, ProdH2, ProdPiStack, ProdExch, ProdLambdaStack, TransEpigraph,
};

struct VarKey {
  Sym sym{};
  int r = -1;
  int t = -1;
  int comp = -1;

  friend bool operator==(const VarKey&, const VarKey&) = default;
};

using SymTerms = std::vector<std::pair<VarKey, double>>;

struct LinExpr {
  SymTerms terms;
  double constant = 0.0;

  LinExpr& add(VarKey k, double c) {
    terms.emplace_back(k, c);
    return *this;
  }
  LinExpr& add_const(double c) {
    constant += c;
    return *this;
  }
};

/// One entry of the decision schema: a concrete scalar variable.
struct SchemaEntry {
  VarKey key;
  std::string name;
  bool is_binary = false;
};

/// Canonical enumeration of every decision variable of an instance: planning
/// variables first, then per-(r,t) blocks in (r, t) order. The factor set is
/// complete by construction: each recourse symbol appears with its
/// participation-factor partner.
std::vector<SchemaEntry> decision_schema(const IesInstance& instance);

enum class CKind { DeterministicLinear, StochasticEquality, DrccInequality };

/// Symbolic constraint prior to reformulation. DrccInequality encodes
/// P[ prev(v) (1'w_{r,t-1}) + cur(v) (1'w_{r,t}) <= bound(v) ] >= 1 - eps
/// with scalar loading expressions (policies respond to the aggregated
/// error, so the loading vector is expr * 1).
struct SymbolicConstraint {
  CKind kind = CKind::DeterministicLinear;
  std::string tag;
  int r = -1;
  int t = -1;

  // DeterministicLinear: expr <= 0 (or == 0 when is_equality)
  LinExpr expr;
  bool is_equality = false;

  // StochasticEquality: nominal == 0 and factor == 0
  LinExpr nominal;
  LinExpr factor;

  // DrccInequality
  LinExpr load_prev;  // empty unless intertemporal
  LinExpr load_cur;
  LinExpr bound;
  bool intertemporal = false;
};

/// Unit-commitment logic (start-up/shut-down linking, min up/down windows).
std::vector<SymbolicConstraint> build_commitment_constraints(const IesInstance& instance);

/// Everything stochastic: facility bounds, split equalities and the tagged
/// chance constraints of the planning model. The bilinear stack couplings are
/// not emitted here; the compiler linearizes them from the schema directly.
std::vector<SymbolicConstraint> build_stochastic_constraints(const IesInstance& instance);

/// Human-readable tagged dump for audits.
std::string constraints_to_text(const std::vector<SymbolicConstraint>& list);

}  // namespace flexplan
