#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "hinf/sdp_solver.hpp"
#include "support/test_systems.hpp"

using namespace hinf;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

StateSpace scalar_system(double a, double b, double c, double d) {
  return StateSpace(CMat::Constant(1, 1, a), CMat::Constant(1, 1, b),
                    CMat::Constant(1, 1, c), CMat::Constant(1, 1, d));
}

}  // namespace

TEST_CASE("primal solve reproduces known optima") {
  SECTION("pure feedthrough") {
    const StateSpace ex(scalar_system(0, 0, 1, 1));
    const SolverSolution sol = solve(build_primal(ex, FrequencyBand::full()));
    CHECK(sol.status == SolverStatus::Optimal);
    CHECK(sol.objective == Approx(1.0).margin(1e-6));
    // The constraint forces the state block of V to vanish.
    CHECK(std::abs(sol.V.mat()(0, 0)) < 1e-6);
    CHECK(std::abs(sol.V.mat()(1, 1)) == Approx(1.0).margin(1e-6));
  }

  SECTION("scalar lag") {
    const SolverSolution sol =
        solve(build_primal(scalar_system(0.5, 1, 1, 0), FrequencyBand::full()));
    CHECK(sol.status == SolverStatus::Optimal);
    CHECK(sol.objective == Approx(4.0).margin(1e-5));
  }

  SECTION("high band clips the peak") {
    const SolverSolution sol = solve(
        build_primal(scalar_system(0.5, 1, 1, 0), FrequencyBand::high(kPi / 2)));
    CHECK(sol.status == SolverStatus::Optimal);
    CHECK(sol.objective == Approx(0.8).margin(1e-5));
  }

  SECTION("middle band equals the shifted high construction") {
    const SolverSolution sol = solve(build_primal(
        scalar_system(0.5, 1, 1, 0), FrequencyBand::middle(kPi / 2, kPi)));
    CHECK(sol.objective == Approx(0.8).margin(1e-5));
  }
}

TEST_CASE("optimal solutions satisfy the declared residual invariants") {
  testing::Rng rng(7);
  const SolverSettings settings;
  for (int t = 0; t < 5; ++t) {
    const StateSpace sys = testing::random_stable_system(rng, 3, 2, 2, 0.8);
    const SolverSolution sol = solve(build_primal(sys, FrequencyBand::full()));
    REQUIRE(sol.status == SolverStatus::Optimal);
    CHECK(sol.residuals.primal_eq <= settings.tol_feas);
    CHECK(sol.residuals.psd_violation <= settings.tol_feas);
    CHECK(sol.residuals.duality_gap <=
          settings.tol_gap * (1.0 + std::abs(sol.objective)));
    CHECK(sol.dual_objective >= sol.objective - 1e-6);  // weak duality
    // Weakly monotone duality gap along the iterates.
    REQUIRE(sol.gap_history.size() >= 2);
    CHECK(sol.gap_history.back() <= sol.gap_history.front() + 1e-12);
  }
}

TEST_CASE("infeasible and malformed problems") {
  SECTION("trivially infeasible trace bound") {
    ConicProblem toy;
    toy.dim = 2;
    toy.cost = HermitianMatrix::zero(2);
    toy.inequalities.push_back({HermitianMatrix::identity(2), -1.0});
    CHECK(solve(toy).status == SolverStatus::Infeasible);
  }

  SECTION("size cap") {
    ConicProblem big;
    big.dim = 201;
    big.cost = HermitianMatrix::zero(201);
    CHECK_THROWS_AS(solve(big), SolverError);
  }
}

TEST_CASE("solve is deterministic") {
  testing::Rng rng(11);
  const StateSpace sys = testing::random_stable_system(rng, 3, 2, 2, 0.8);
  const ConicProblem problem = build_primal(sys, FrequencyBand::low(1.2));
  const SolverSolution a = solve(problem);
  const SolverSolution b = solve(problem);
  CHECK(a.objective == b.objective);  // bitwise
  CHECK((a.V.mat() - b.V.mat()).norm() == 0.0);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("dual LMI solves") {
  SECTION("controllable scalar system attains lambda = 4") {
    const DualSolution d = solve_dual_lmi(build_dual_kyp(scalar_system(0.5, 1, 1, 0)));
    CHECK(d.status == SolverStatus::Optimal);
    CHECK(d.lambda == Approx(4.0).margin(1e-5));
    CHECK_FALSE(d.not_attained);
    CHECK(d.p_norm == Approx(2.0).margin(1e-3));  // analytic minimizer P = 2
  }

  SECTION("uncontrollable feedthrough: infimum 1 approached by escaping P") {
    const DualSolution d = solve_dual_lmi(build_dual_kyp(scalar_system(0, 0, 1, 1)));
    CHECK(d.lambda == Approx(1.0).margin(1e-3));
    CHECK(d.status == SolverStatus::NearOptimal);
    CHECK(d.not_attained);
    CHECK(d.p_norm > 1e8);
  }

  SECTION("zero system") {
    const DualSolution d = solve_dual_lmi(build_dual_kyp(scalar_system(0.5, 1, 0, 0)));
    CHECK(d.lambda == Approx(0.0).margin(1e-6));
    CHECK_FALSE(d.not_attained);
  }
}

TEST_CASE("generalized KYP duals match the band primals") {
  const StateSpace sys = scalar_system(0.5, 1, 1, 0);

  SECTION("wide low band sees the full peak") {
    const DualSolution d = solve_dual_lmi(build_dual_gkyp(sys, FrequencyBand::low(3.0)));
    CHECK(d.status == SolverStatus::Optimal);
    CHECK(d.lambda == Approx(4.0).margin(1e-4));
  }

  SECTION("low band containing the peak") {
    const DualSolution d =
        solve_dual_lmi(build_dual_gkyp(sys, FrequencyBand::low(kPi / 2)));
    CHECK(d.lambda == Approx(4.0).margin(1e-4));
    REQUIRE(d.Q.has_value());
    Eigen::SelfAdjointEigenSolver<CMat> es(d.Q->mat(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  }

  SECTION("high band via the middle shift") {
    const DualSolution d = solve_dual_lmi(
        build_dual_gkyp(sys, FrequencyBand::middle(kPi / 2, kPi)));
    CHECK(d.lambda == Approx(0.8).margin(1e-4));
  }

  SECTION("weak duality against band primals") {
    testing::Rng rng(13);
    for (int t = 0; t < 3; ++t) {
      const StateSpace rand_sys = testing::random_stable_system(rng, 2, 2, 2, 0.7);
      const FrequencyBand band = FrequencyBand::low(1.0);
      const SolverSolution primal = solve(build_primal(rand_sys, band));
      const DualSolution dual = solve_dual_lmi(build_dual_gkyp(rand_sys, band));
      CHECK(primal.objective <= dual.lambda + 1e-6 * (1.0 + dual.lambda));
    }
  }
}
