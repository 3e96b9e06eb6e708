#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "flexplan/common.hpp"

namespace flexplan {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Sparse linear expression over the program's variable table.
using LinTerms = std::vector<std::pair<int, double>>;

struct Variable {
  std::string name;
  bool is_binary = false;
  double lb = -kInf;
  double ub = kInf;
};

enum class RowKind { Eq, Le };  // a'x = rhs  /  a'x <= rhs

struct LinearRow {
  LinTerms terms;
  double rhs = 0.0;
  RowKind kind = RowKind::Eq;
  std::string tag;
};

/// || F x + g ||_2 <= a'x + b
struct SocBlock {
  std::vector<LinTerms> f_terms;
  std::vector<double> g;
  LinTerms a;
  double b = 0.0;
  std::string tag;
};

/// 2 (u'x + u0)(v'x + v0) >= || F x + g ||^2,  u'x + u0 >= 0,  v'x + v0 >= 0
struct RotatedBlock {
  LinTerms u;
  double u0 = 0.0;
  LinTerms v;
  double v0 = 0.0;
  std::vector<LinTerms> f_terms;
  std::vector<double> g;
  std::string tag;
};

/// Binary-expansion group: total = sum_j 2^j bits[j].
struct BitGroup {
  std::string name;
  int total = -1;  // variable index of the expanded integer
  std::vector<int> bits;
};

/// Big-M product structure: product = bit * scalar once the bit is integer.
/// Recorded so that integer-feasible points can be polished onto the implied
/// equality face.
struct ProductLink {
  int product = -1;
  int bit = -1;
  int scalar = -1;
};

/// Mixed-integer conic intermediate representation. Minimization objective.
struct ConicProgram {
  std::vector<Variable> vars;
  std::vector<LinearRow> rows;
  std::vector<SocBlock> socs;
  std::vector<RotatedBlock> rsocs;
  LinTerms objective;
  double objective_constant = 0.0;
  std::vector<BitGroup> bit_groups;
  std::vector<ProductLink> product_links;

  int add_var(const std::string& name, bool binary = false, double lb = -kInf, double ub = kInf);
  void check() const;  // no dangling variable references

  std::vector<int> binary_indices() const;
  double objective_value(const std::vector<double>& x) const;
};

/// Canonical, byte-stable text form: variables, rows, cones and metadata in
/// table order, doubles printed with "%.17g". Intended for diffing and the
/// determinism guarantees; `parse_canonical` inverts it exactly.
std::string canonical_text(const ConicProgram& p);
ConicProgram parse_canonical(const std::string& text);

}  // namespace flexplan
