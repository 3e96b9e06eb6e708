#pragma once

// Internal bridge between the conic IR and the interior-point core:
//
//   min c'x  s.t.  Ax = b,  Gx + s = h,  s in K = R+^l x Q^{d1} x ... x Q^{dk}
//
// Rotated cones are mapped onto plain second-order cones via the orthogonal
// change of coordinates (u, v, w) -> (u+v, u-v, sqrt(2) w).

#include <Eigen/Sparse>
#include <vector>

#include "flexplan/conic_program.hpp"
#include "flexplan/solver.hpp"

namespace flexplan::detail {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

struct ConeLayout {
  int nonneg = 0;              // leading nonnegative-orthant rows
  std::vector<int> soc_dims;   // second-order cone sizes, in order
  int total() const {
    int t = nonneg;
    for (int d : soc_dims) t += d;
    return t;
  }
  // barrier order: one per LP row, one per SOC
  int order() const { return nonneg + static_cast<int>(soc_dims.size()); }
};

struct StandardForm {
  int n = 0;
  SpMat A;  // p x n
  Vec b;
  SpMat G;  // m x n
  Vec h;
  Vec c;
  ConeLayout cones;

  // provenance of G/A rows for mapping duals back to the IR
  struct RowOrigin {
    enum Kind { EqRow, IneqRow, BoundLo, BoundHi, FixRow, SocRhs, SocF, RsocRow } kind;
    int block = -1;    // row/soc/rsoc index in the IR
    int component = -1;
  };
  std::vector<RowOrigin> eq_origin;    // per A row
  std::vector<RowOrigin> cone_origin;  // per G row
};

/// Lowers the IR (with integrality relaxed) to standard form. Fixed variables
/// become equality rows; their bound rows are dropped.
StandardForm lower_program(const ConicProgram& p, const Fixings& fixings);

struct IpmResult {
  SolveStatus status = SolveStatus::IterLimit;
  Vec x;  // primal (divided by tau)
  Vec y;  // equality duals
  Vec z;  // cone duals
  Vec s;  // cone slacks
  double pcost = 0.0;
  double pres = 0.0;
  double dres = 0.0;
  double relgap = 0.0;
  int iterations = 0;
  std::vector<IterInfo> history;
  std::string message;
};

/// Homogeneous self-dual interior-point method with Nesterov-Todd scaling.
IpmResult ipm_solve(const StandardForm& sf, const ContinuousSettings& settings);

}  // namespace flexplan::detail
