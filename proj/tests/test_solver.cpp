#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flexplan/solver.hpp"

using namespace flexplan;

namespace {

// min t  s.t.  ||(3, 4)||_2 <= t
ConicProgram norm_fixture() {
  ConicProgram p;
  const int t = p.add_var("t");
  p.objective = {{t, 1.0}};
  SocBlock s;
  s.a = {{t, 1.0}};
  s.b = 0.0;
  s.f_terms = {{}, {}};
  s.g = {3.0, 4.0};
  s.tag = "norm";
  p.socs.push_back(s);
  return p;
}

}  // namespace

TEST_CASE("norm epigraph solves to 5") {
  const auto p = norm_fixture();
  const auto sol = solve_continuous(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(5.0).epsilon(1e-7));
  CHECK(sol.primal_residual <= 1e-7);
  CHECK(sol.dual_residual <= 1e-7);
}

TEST_CASE("solver's own optimal point verifies feasible") {
  const auto p = norm_fixture();
  const auto sol = solve_continuous(p);
  const auto rep = verify_point(p, sol.x, 1e-7);
  CHECK(rep.feasible);

  // all-zeros point violates the cone and the report names it
  const auto bad = verify_point(p, {0.0}, 1e-9);
  CHECK_FALSE(bad.feasible);
  bool cone_flagged = false;
  for (const auto& e : bad.entries) {
    if (e.kind == "soc" && e.violation > 1.0) cone_flagged = true;
  }
  CHECK(cone_flagged);
}

TEST_CASE("pure LP matches vertex enumeration") {
  // min -x - 2y - 3z  s.t. x + y + z <= 1, x,y,z in [0, 1]
  ConicProgram p;
  const int x = p.add_var("x", false, 0.0, 1.0);
  const int y = p.add_var("y", false, 0.0, 1.0);
  const int z = p.add_var("z", false, 0.0, 1.0);
  p.objective = {{x, -1.0}, {y, -2.0}, {z, -3.0}};
  p.rows.push_back({{{x, 1.0}, {y, 1.0}, {z, 1.0}}, 1.0, RowKind::Le, "sum"});

  // brute-force vertex enumeration over the unit-box corners intersected with
  // the simplex face (tight or slack constraint); feasible vertices of this
  // polytope have at most one fractional coordinate forced by the sum row.
  double best = 0.0;
  const double vals[2] = {0.0, 1.0};
  for (double xv : vals) {
    for (double yv : vals) {
      for (double zv : vals) {
        if (xv + yv + zv <= 1.0 + 1e-12) {
          best = std::min(best, -xv - 2.0 * yv - 3.0 * zv);
        }
      }
    }
  }
  const auto sol = solve_continuous(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(best).epsilon(1e-7));
}

TEST_CASE("infeasible box is certified") {
  ConicProgram p;
  const int x = p.add_var("x");
  p.objective = {{x, 1.0}};
  p.rows.push_back({{{x, -1.0}}, -1.0, RowKind::Le, "ge1"});  // -x <= -1  i.e. x >= 1
  p.rows.push_back({{{x, 1.0}}, 0.0, RowKind::Le, "le0"});    // x <= 0
  const auto sol = solve_continuous(p);
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("unbounded objective is certified") {
  ConicProgram p;
  const int x = p.add_var("x");
  p.objective = {{x, 1.0}};
  p.rows.push_back({{{x, 1.0}}, 0.0, RowKind::Le, "le0"});  // x <= 0, minimize x
  const auto sol = solve_continuous(p);
  CHECK(sol.status == SolveStatus::Unbounded);
}

TEST_CASE("rotated cone epigraph equals quadratic at optimum") {
  // min w  s.t.  2 * w * 0.5 >= x^2, x = 3  ->  w = 9
  ConicProgram p;
  const int w = p.add_var("w");
  const int x = p.add_var("x");
  p.objective = {{w, 1.0}};
  p.rows.push_back({{{x, 1.0}}, 3.0, RowKind::Eq, "fix"});
  RotatedBlock r;
  r.u = {{w, 1.0}};
  r.v0 = 0.5;
  r.f_terms = {{{x, 1.0}}};
  r.g = {0.0};
  r.tag = "epi";
  p.rsocs.push_back(r);
  const auto sol = solve_continuous(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(9.0).epsilon(1e-7));
}

TEST_CASE("weak duality holds along the iterate history") {
  const auto p = norm_fixture();
  const auto sol = solve_continuous(p);
  for (const auto& it : sol.history) {
    CHECK(it.dcost <= it.pcost + 1e-6 * (1.0 + std::abs(it.pcost)) + it.pres + it.dres);
  }
}

TEST_CASE("objective scaling leaves the argmin unchanged") {
  ConicProgram p;
  const int x = p.add_var("x", false, 0.0, kInf);
  const int y = p.add_var("y", false, 0.0, kInf);
  p.rows.push_back({{{x, 1.0}, {y, 2.0}}, 4.0, RowKind::Eq, "mix"});
  p.objective = {{x, 1.0}, {y, 3.0}};
  const auto a = solve_continuous(p);
  for (auto& [i, c] : p.objective) c *= 1000.0;
  const auto b = solve_continuous(p);
  REQUIRE(a.status == SolveStatus::Optimal);
  REQUIRE(b.status == SolveStatus::Optimal);
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    CHECK(a.x[i] == doctest::Approx(b.x[i]).epsilon(1e-5));
  }
}

TEST_CASE("branch and bound: ceiling of 2.3 via 3 bits") {
  // min n  s.t. n >= 2.3, n = 4 b2 + 2 b1 + b0
  ConicProgram p;
  const int b0 = p.add_var("b0", true, 0.0, 1.0);
  const int b1 = p.add_var("b1", true, 0.0, 1.0);
  const int b2 = p.add_var("b2", true, 0.0, 1.0);
  const int n = p.add_var("n");
  p.rows.push_back(
      {{{n, 1.0}, {b0, -1.0}, {b1, -2.0}, {b2, -4.0}}, 0.0, RowKind::Eq, "bits"});
  p.rows.push_back({{{n, -1.0}}, -2.3, RowKind::Le, "ge"});
  p.objective = {{n, 1.0}};
  p.bit_groups.push_back({"n", n, {b0, b1, b2}});
  const auto sol = solve_misocp(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("branch and bound matches exhaustive enumeration on 6 binaries") {
  // min c'b + t  s.t. ||(b1 + b2 - 1, b3 - b4)|| <= t, sum b >= 2, couplings
  ConicProgram p;
  std::vector<int> b(6);
  for (int i = 0; i < 6; ++i) b[i] = p.add_var("b" + std::to_string(i), true, 0.0, 1.0);
  const int t = p.add_var("t");
  const double cost[6] = {1.0, -2.0, 0.5, -1.5, 0.25, -0.75};
  p.objective = {{t, 1.0}};
  for (int i = 0; i < 6; ++i) p.objective.emplace_back(b[i], cost[i]);
  LinTerms sum;
  for (int i = 0; i < 6; ++i) sum.emplace_back(b[i], -1.0);
  p.rows.push_back({sum, -2.0, RowKind::Le, "atleast2"});
  p.rows.push_back({{{b[0], 1.0}, {b[5], 1.0}}, 1.0, RowKind::Le, "conflict"});
  SocBlock s;
  s.a = {{t, 1.0}};
  s.f_terms = {{{b[1], 1.0}, {b[2], 1.0}}, {{b[3], 1.0}, {b[4], -1.0}}};
  s.g = {-1.0, 0.0};
  s.tag = "cone";
  p.socs.push_back(s);

  // oracle: all 64 fixings, each solved as a continuous cone program
  double best = kInf;
  for (int mask = 0; mask < 64; ++mask) {
    Fixings fix;
    for (int i = 0; i < 6; ++i) fix.emplace_back(b[i], (mask >> i) & 1 ? 1.0 : 0.0);
    const auto sub = solve_continuous(p, {}, fix);
    if (sub.status == SolveStatus::Optimal) best = std::min(best, sub.objective);
  }

  const auto sol = solve_misocp(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(best).epsilon(1e-6));
  CHECK(sol.best_bound <= sol.objective + 1e-9);
}

TEST_CASE("branch and bound is deterministic") {
  ConicProgram p;
  std::vector<int> b(4);
  for (int i = 0; i < 4; ++i) b[i] = p.add_var("b" + std::to_string(i), true, 0.0, 1.0);
  LinTerms sum;
  for (int i = 0; i < 4; ++i) sum.emplace_back(b[i], -0.7 - 0.1 * i);
  p.rows.push_back({sum, -1.3, RowKind::Le, "cover"});
  for (int i = 0; i < 4; ++i) p.objective.emplace_back(b[i], 1.0 + 0.01 * i);
  const auto a = solve_misocp(p);
  const auto c = solve_misocp(p);
  REQUIRE(a.status == SolveStatus::Optimal);
  CHECK(a.objective == c.objective);
  CHECK(a.nodes == c.nodes);
  for (std::size_t i = 0; i < a.x.size(); ++i) CHECK(a.x[i] == c.x[i]);
}
