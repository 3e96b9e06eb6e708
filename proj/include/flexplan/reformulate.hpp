#pragma once

#include <map>
#include <unordered_map>

#include "flexplan/conic_program.hpp"
#include "flexplan/ies_model.hpp"

namespace flexplan {

enum class ChanceModel { Drcc, GaussianCc };

struct ReformulationMode {
  ChanceModel model = ChanceModel::Drcc;
  double epsilon = 0.05;

  void validate() const;
};

/// Second-order-cone safety factor: sqrt(eps/(1-eps)) for the moment-robust
/// model, 1/Phi^{-1}(1-eps) for the Gaussian benchmark.
double safety_factor(const ReformulationMode& mode);

/// Inverse standard normal CDF (rational approximation polished with Newton
/// steps on erfc; ~1e-15 accurate).
double inverse_normal_cdf(double p);

/// Index of every schema entry in the compiled variable table.
class VarIndex {
 public:
  void insert(const VarKey& k, int idx);
  int at(const VarKey& k) const;  // throws on unknown keys
  bool has(const VarKey& k) const;

 private:
  static std::uint64_t encode(const VarKey& k);
  std::unordered_map<std::uint64_t, int> map_;
};

/// Table-1 style component switches; disabled components get their
/// capacities pinned to zero so the program shape stays comparable.
struct ScenarioToggles {
  bool p2hh = true;
  bool eb = true;
};

struct CompiledProgram {
  ConicProgram program;
  VarIndex index;
  std::map<std::string, long> audit;  // rows/cones per template tag
  int covariance_repairs = 0;
  ReformulationMode mode;

  std::string audit_csv() const;  // template,count
};

// --- building blocks (also used standalone in tests) ---

/// Cantelli / Gaussian reformulation of a single-period chance constraint:
/// emits || Sigma^{1/2} 1 * load(v) ||_2 <= factor * bound(v). A loading that
/// is identically zero degenerates to the linear row bound(v) >= 0.
void reformulate_drcc(const SymbolicConstraint& c, const WindMoments& moments,
                      const ReformulationMode& mode, const VarIndex& index, ConicProgram* out);

/// Splits a stochastic equality into its nominal and factor rows
/// (tagged .nom / .fac).
void split_stochastic_equality(const SymbolicConstraint& c, const VarIndex& index,
                               ConicProgram* out);

/// Inter-temporal constraints: ramping DRCCs against the 2Z joint covariance;
/// recursion equalities fall back to the nominal/factor split (the
/// consecutive-hour approximation is already encoded in the factor rows).
void reformulate_intertemporal(const SymbolicConstraint& c, const WindMoments& moments,
                               const ReformulationMode& mode, const VarIndex& index,
                               ConicProgram* out);

/// Deterministic objective: investment and start-stop terms plus
/// k_r-weighted fuel, transmission and hydrogen terms; the quadratic
/// transmission expectation becomes one rotated-cone epigraph per (r, t).
void build_objective(const IesInstance& inst, const VarIndex& index, ConicProgram* out);

/// Binary expansion of the cell count and big-M product rows tying stack
/// quantities (and their participation factors) to per-cell quantities.
void linearize_stack_coupling(const IesInstance& inst, const VarIndex& index, ConicProgram* out);

/// End-to-end compilation of an instance into a mixed-integer conic program.
CompiledProgram compile_program(const IesInstance& inst, const ReformulationMode& mode,
                                const ScenarioToggles& toggles = {});

}  // namespace flexplan
