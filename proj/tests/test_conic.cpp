#include <cmath>

#include "doctest.h"
#include "isac/conic.hpp"

using namespace isac;

namespace {

std::vector<SymTriplet> diag_triplet(int i, double v) { return {{i, i, v}}; }

// max x0 + x1 s.t. x0 + 2 x1 <= 4, x0 <= 3, x >= 0 (via 1x1 PSD blocks).
ConicProblem small_lp() {
  ConicProblem p;
  p.num_vars = 2;
  p.objective = Eigen::Vector2d(1.0, 1.0);
  p.add_linear_row(Eigen::Vector2d(1.0, 2.0), 4.0);
  p.add_linear_row(Eigen::Vector2d(1.0, 0.0), 3.0);
  for (int i = 0; i < 2; ++i) {
    PsdBlockExpr b;
    b.dim = 1;
    b.f0 = Eigen::MatrixXd::Zero(1, 1);
    b.add_coeff(i, diag_triplet(0, 1.0));
    p.psd_blocks.push_back(b);
  }
  return p;
}

// max t s.t. [[1, t], [t, 1]] >= 0, i.e. t* = 1.
ConicProblem correlation_sdp() {
  ConicProblem p;
  p.num_vars = 1;
  p.objective = Eigen::VectorXd::Ones(1);
  PsdBlockExpr b;
  b.dim = 2;
  b.f0 = Eigen::MatrixXd::Identity(2, 2);
  b.add_coeff(0, {{0, 1, 1.0}});
  p.psd_blocks.push_back(b);
  return p;
}

}  // namespace

TEST_CASE("linear program with a known vertex optimum") {
  const ConicSolution sol = solve_conic(small_lp(), 1e-9);
  REQUIRE(sol.status == SolveStatus::Optimal);
  // Optimum at x = (3, 0.5).
  CHECK(sol.objective == doctest::Approx(3.5).epsilon(1e-7));
  CHECK(sol.x[0] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(sol.x[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.primal_residual < 1e-7);
  CHECK(sol.dual_residual < 1e-7);
  CHECK(sol.duality_gap < 1e-7);
}

TEST_CASE("semidefinite bound on an off-diagonal entry") {
  const ConicSolution sol = solve_conic(correlation_sdp(), 1e-9);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("largest eigenvalue as an SDP") {
  // max tr(A X) over X >= 0, tr X = 1 equals lambda_max(A). Parametrize X by
  // its three free entries (2x2 symmetric) with the trace as a linear row
  // pair, objective tr(A X).
  Eigen::Matrix2d a;
  a << 2.0, 1.0, 1.0, -1.0;
  const double lam = 0.5 * (1.0 + std::sqrt(13.0));  // largest eigenvalue

  ConicProblem p;
  p.num_vars = 3;  // x = (X00, X11, X01)
  p.objective = Eigen::Vector3d(a(0, 0), a(1, 1), 2.0 * a(0, 1));
  p.add_linear_row(Eigen::Vector3d(1.0, 1.0, 0.0), 1.0);
  p.add_linear_row(Eigen::Vector3d(-1.0, -1.0, 0.0), -1.0);
  PsdBlockExpr b;
  b.dim = 2;
  b.f0 = Eigen::MatrixXd::Zero(2, 2);
  b.add_coeff(0, {{0, 0, 1.0}});
  b.add_coeff(1, {{1, 1, 1.0}});
  b.add_coeff(2, {{0, 1, 1.0}});
  p.psd_blocks.push_back(b);

  const ConicSolution sol = solve_conic(p, 1e-9);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(lam).epsilon(1e-6));
}

TEST_CASE("infeasible problems are certified") {
  SUBCASE("contradictory linear rows") {
    ConicProblem p;
    p.num_vars = 1;
    p.objective = Eigen::VectorXd::Ones(1);
    p.add_linear_row(Eigen::VectorXd::Ones(1), -1.0);
    p.add_linear_row(-Eigen::VectorXd::Ones(1), -1.0);  // x <= -1 and x >= 1
    const ConicSolution sol = solve_conic(p);
    CHECK(sol.status == SolveStatus::Infeasible);
  }

  SUBCASE("PSD block forced negative") {
    // x I >= 0 and x <= -1 together are infeasible.
    ConicProblem p;
    p.num_vars = 1;
    p.objective = -Eigen::VectorXd::Ones(1);
    PsdBlockExpr b;
    b.dim = 2;
    b.f0 = Eigen::MatrixXd::Zero(2, 2);
    b.add_coeff(0, {{0, 0, 1.0}, {1, 1, 1.0}});
    p.psd_blocks.push_back(b);
    p.add_linear_row(Eigen::VectorXd::Ones(1), -1.0);
    const ConicSolution sol = solve_conic(p);
    CHECK(sol.status == SolveStatus::Infeasible);
  }
}

TEST_CASE("deterministic across repeated solves") {
  const ConicSolution a = solve_conic(small_lp(), 1e-9);
  const ConicSolution b = solve_conic(small_lp(), 1e-9);
  CHECK(a.iterations == b.iterations);
  CHECK((a.x - b.x).norm() == 0.0);
  CHECK(a.objective == b.objective);
}

TEST_CASE("mixed LP/SDP with an interior optimum") {
  // max -x0^2-ish surrogate: max t s.t. [[x0, t], [t, 1]] >= 0, x0 <= 2
  // => t* = sqrt(2) (t^2 <= x0).
  ConicProblem p;
  p.num_vars = 2;  // (x0, t)
  p.objective = Eigen::Vector2d(0.0, 1.0);
  p.add_linear_row(Eigen::Vector2d(1.0, 0.0), 2.0);
  PsdBlockExpr b;
  b.dim = 2;
  b.f0 = Eigen::MatrixXd::Zero(2, 2);
  b.f0(1, 1) = 1.0;
  b.add_coeff(0, {{0, 0, 1.0}});
  b.add_coeff(1, {{0, 1, 1.0}});
  p.psd_blocks.push_back(b);
  const ConicSolution sol = solve_conic(p, 1e-9);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("problem dump names every block and row") {
  const ConicProblem p = small_lp();
  const std::string text = p.dump();
  CHECK(text.find("vars 2") != std::string::npos);
  CHECK(text.find("lin_row") != std::string::npos);
  CHECK(text.find("psd_block") != std::string::npos);
}
