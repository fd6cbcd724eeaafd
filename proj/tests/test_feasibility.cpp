/*
 * This code is part of povm-forge.
 *
 * (C) Copyright 2026 povm-forge contributors.
 *
 * Licensed under the Apache License, Version 2.0; see the LICENSE file in
 * the repository root or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "catch2/catch_amalgamated.hpp"
#include "test_helpers.hpp"

using namespace povmforge;

namespace {

MatrixMap conjugation(const ComplexMatrix& k) {
  return [k](const ComplexMatrix& x) { return ComplexMatrix(k * x * k.adjoint()); };
}

MatrixMap identity_map() {
  return [](const ComplexMatrix& x) { return x; };
}

}  // namespace

TEST_CASE("builder rejects ill formed problems") {
  REQUIRE_THROWS_AS(FeasibilityProblemBuilder({-1}), IllFormedProblem);
  FeasibilityProblemBuilder builder({2, 3});
  REQUIRE_THROWS_AS(builder.add_identity_sum({0, 1}, 2), IllFormedProblem);
  REQUIRE_THROWS_AS(builder.add_identity_sum({5}, 2), IllFormedProblem);
}

TEST_CASE("a planted conjugation problem is feasible") {
  Rng rng(61);
  ComplexMatrix k = random_gaussian_matrix(3, 2, rng);
  ComplexMatrix g = random_gaussian_matrix(2, 2, rng);
  ComplexMatrix planted = g * g.adjoint();

  FeasibilityProblemBuilder builder({2});
  builder.add_operator_equation({{0, conjugation(k)}}, k * planted * k.adjoint());
  builder.add_operator_equation({{0, identity_map()}}, planted);
  FeasibilityOutcome out = solve_feasibility(builder.build());

  REQUIRE(out.status == FeasibilityStatus::feasible);
  REQUIRE(out.residual <= kCertTol);
  REQUIRE(out.solution.size() == 1);
  REQUIRE(is_psd(out.solution[0]));
  REQUIRE((out.solution[0] - planted).norm() < 1e-6);
}

TEST_CASE("psd constraints bite when the affine solution is indefinite") {
  // X = diag(2, -1) is the unique affine solution; no PSD point exists,
  // and the candidate residual stays bounded away from zero.
  FeasibilityProblemBuilder builder({2});
  ComplexMatrix target(2, 2);
  target << 2.0, 0.0, 0.0, -1.0;
  builder.add_operator_equation({{0, identity_map()}}, target);
  FeasibilityOutcome out = solve_feasibility(builder.build(), 200);

  REQUIRE(out.status == FeasibilityStatus::budget_exhausted);
  REQUIRE(out.affine_floor < 1e-12);
  REQUIRE(out.residual > 0.5);
  REQUIRE(is_psd(out.solution[0]));
}

TEST_CASE("an inconsistent affine system short circuits") {
  // tr-like scalar equations that contradict each other.
  FeasibilityProblemBuilder builder({2});
  builder.add_operator_equation({{0, identity_map()}}, identity(2));
  builder.add_operator_equation({{0, identity_map()}}, 2.0 * identity(2));
  FeasibilityOutcome out = solve_feasibility(builder.build());

  REQUIRE(out.status == FeasibilityStatus::budget_exhausted);
  REQUIRE(out.iterations == 0);
  REQUIRE(out.affine_floor > kCertTol);
}

TEST_CASE("two blocks with an identity sum constraint") {
  Rng rng(67);
  // X_0 + X_1 = I with X_b PSD: pick a planted split to force feasibility.
  ComplexMatrix g = random_gaussian_matrix(2, 2, rng);
  ComplexMatrix w = g * g.adjoint();
  w /= 2.0 * hermitian_eig(w).eigenvalues(0);  // now 0 <= W <= I/2 < I

  FeasibilityProblemBuilder builder({2, 2});
  builder.add_identity_sum({0, 1}, 2);
  builder.add_operator_equation({{0, identity_map()}}, w);
  FeasibilityOutcome out = solve_feasibility(builder.build());

  REQUIRE(out.status == FeasibilityStatus::feasible);
  REQUIRE((out.solution[0] + out.solution[1] - identity(2)).norm() < 1e-6);
  REQUIRE(is_psd(out.solution[0]));
  REQUIRE(is_psd(out.solution[1]));
}

TEST_CASE("alternation escapes an indefinite least squares seed") {
  // Constraints X00 - X11 = 1, Re X01 = 0.3. The minimum norm affine
  // solution [[0.5, 0.3], [0.3, -0.5]] is indefinite, yet PSD solutions
  // exist (any X00 = t + 1, X11 = t with t large enough), so the solver
  // has to iterate its way up the cone.
  MatrixMap diag_gap = [](const ComplexMatrix& x) {
    ComplexMatrix out(1, 1);
    out(0, 0) = x(0, 0) - x(1, 1);
    return out;
  };
  MatrixMap re_corner = [](const ComplexMatrix& x) {
    ComplexMatrix out(1, 1);
    out(0, 0) = 0.5 * (x(0, 1) + x(1, 0));
    return out;
  };
  ComplexMatrix one(1, 1), corner(1, 1);
  one(0, 0) = 1.0;
  corner(0, 0) = 0.3;

  FeasibilityProblemBuilder builder({2});
  builder.add_operator_equation({{0, diag_gap}}, one);
  builder.add_operator_equation({{0, re_corner}}, corner);
  FeasibilityOutcome out = solve_feasibility(builder.build());

  REQUIRE(out.status == FeasibilityStatus::feasible);
  REQUIRE(out.iterations >= 1);
  const ComplexMatrix& x = out.solution[0];
  REQUIRE(is_psd(x));
  REQUIRE(std::abs((x(0, 0) - x(1, 1)) - 1.0) < 1e-6);
  REQUIRE(std::abs(0.5 * (x(0, 1) + x(1, 0)).real() - 0.3) < 1e-6);
}

TEST_CASE("empty constraint set is trivially feasible") {
  FeasibilityProblemBuilder builder({2});
  FeasibilityOutcome out = solve_feasibility(builder.build());
  REQUIRE(out.status == FeasibilityStatus::feasible);
  REQUIRE(out.iterations == 0);
}

TEST_CASE("dimension mismatches are rejected") {
  FeasibilityProblem p;
  p.block_dims = {2};
  p.constraints = RealMatrix::Zero(3, 5);  // wrong column count (4 expected)
  p.rhs = RealVector::Zero(3);
  REQUIRE_THROWS_AS(solve_feasibility(p), IllFormedProblem);
  p.constraints = RealMatrix::Zero(3, 4);
  p.rhs = RealVector::Zero(2);  // row mismatch
  REQUIRE_THROWS_AS(solve_feasibility(p), IllFormedProblem);
}
