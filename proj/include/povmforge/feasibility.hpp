/*
 * This code is part of povm-forge.
 *
 * (C) Copyright 2026 povm-forge contributors.
 *
 * Licensed under the Apache License, Version 2.0; see the LICENSE file in
 * the repository root or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "povmforge/errors.hpp"
#include "povmforge/matrix.hpp"

namespace povmforge {

/// Real-linear map taking a Hermitian block to a Hermitian matrix; used to
/// express operator equations as affine constraints.
using MatrixMap = std::function<ComplexMatrix(const ComplexMatrix&)>;

/// Convex feasibility instance: find Hermitian PSD blocks X_b satisfying a
/// stacked affine system. Everything (operator equations, identity-sum
/// normalizations) is compiled into one real matrix over the isometric
/// Hermitian coordinates, so Euclidean projections match Frobenius ones.
struct FeasibilityProblem {
  std::vector<int> block_dims;
  RealMatrix constraints;  // rows: equations, cols: sum of block_dim^2
  RealVector rhs;
};

/// Assembles a FeasibilityProblem from operator equations.
class FeasibilityProblemBuilder {
 public:
  explicit FeasibilityProblemBuilder(std::vector<int> block_dims)
      : block_dims_(std::move(block_dims)) {
    offsets_.reserve(block_dims_.size());
    for (int d : block_dims_) {
      if (d < 0) throw IllFormedProblem("builder: negative block dimension");
      offsets_.push_back(total_);
      total_ += d * d;
    }
  }

  /// Adds the equation sum_over_terms map_t(X_{block_t}) = target, where
  /// each map must be real-linear and send Hermitian input to Hermitian
  /// output of the target's shape.
  void add_operator_equation(
      const std::vector<std::pair<int, MatrixMap>>& terms,
      const ComplexMatrix& target) {
    require_square(target, "builder");
    const int t = static_cast<int>(target.rows());
    const int n_rows = t * t;
    RealMatrix rows = RealMatrix::Zero(n_rows, total_);
    for (const auto& [block, map] : terms) {
      if (block < 0 || block >= static_cast<int>(block_dims_.size())) {
        throw IllFormedProblem("builder: equation references unknown block");
      }
      const int d = block_dims_[block];
      for (int alpha = 0; alpha < d * d; ++alpha) {
        RealVector unit = RealVector::Zero(d * d);
        unit(alpha) = 1.0;
        ComplexMatrix image = map(vec_to_herm(unit, d));
        if (image.rows() != t || image.cols() != t) {
          throw IllFormedProblem("builder: map output does not match the equation target");
        }
        rows.col(offsets_[block] + alpha) += herm_to_vec(image);
      }
    }
    append(rows, herm_to_vec(target));
  }

  /// Adds sum over the listed blocks of X_b = I. All listed blocks must
  /// share the dimension `dim`.
  void add_identity_sum(const std::vector<int>& blocks, int dim) {
    std::vector<std::pair<int, MatrixMap>> terms;
    terms.reserve(blocks.size());
    for (int b : blocks) {
      if (b < 0 || b >= static_cast<int>(block_dims_.size()) ||
          block_dims_[b] != dim) {
        throw IllFormedProblem("builder: identity sum over mismatched blocks");
      }
      terms.emplace_back(b, [](const ComplexMatrix& x) { return x; });
    }
    add_operator_equation(terms, identity(dim));
  }

  FeasibilityProblem build() {
    FeasibilityProblem p;
    p.block_dims = block_dims_;
    p.constraints = RealMatrix::Zero(static_cast<Eigen::Index>(n_rows_), total_);
    p.rhs = RealVector::Zero(static_cast<Eigen::Index>(n_rows_));
    Eigen::Index at = 0;
    for (std::size_t i = 0; i < chunks_.size(); ++i) {
      p.constraints.middleRows(at, chunks_[i].rows()) = chunks_[i];
      p.rhs.segment(at, chunk_rhs_[i].size()) = chunk_rhs_[i];
      at += chunks_[i].rows();
    }
    return p;
  }

 private:
  void append(RealMatrix rows, RealVector rhs) {
    n_rows_ += rows.rows();
    chunks_.push_back(std::move(rows));
    chunk_rhs_.push_back(std::move(rhs));
  }

  std::vector<int> block_dims_;
  std::vector<int> offsets_;
  int total_ = 0;
  std::size_t n_rows_ = 0;
  std::vector<RealMatrix> chunks_;
  std::vector<RealVector> chunk_rhs_;
};

enum class FeasibilityStatus { feasible, budget_exhausted };

/// Solver verdict. `solution` always carries the best PSD candidate found;
/// `residual` is the Euclidean (= stacked Frobenius) violation of the
/// affine system at that candidate. status == feasible implies
/// residual <= cert_tol. `affine_floor` is the least-squares residual of
/// the affine system alone; a floor above cert_tol proves that not even a
/// non-PSD solution exists.
struct FeasibilityOutcome {
  FeasibilityStatus status = FeasibilityStatus::budget_exhausted;
  std::vector<ComplexMatrix> solution;
  double residual = std::numeric_limits<double>::infinity();
  double affine_floor = 0.0;
  int iterations = 0;
};

namespace detail {

inline std::vector<ComplexMatrix> split_blocks(const RealVector& x,
                                               const std::vector<int>& dims) {
  std::vector<ComplexMatrix> blocks;
  blocks.reserve(dims.size());
  Eigen::Index at = 0;
  for (int d : dims) {
    blocks.push_back(vec_to_herm(x.segment(at, static_cast<Eigen::Index>(d) * d), d));
    at += static_cast<Eigen::Index>(d) * d;
  }
  return blocks;
}

inline RealVector project_blocks_psd(const RealVector& x,
                                     const std::vector<int>& dims) {
  RealVector out(x.size());
  Eigen::Index at = 0;
  for (int d : dims) {
    const Eigen::Index len = static_cast<Eigen::Index>(d) * d;
    out.segment(at, len) = herm_to_vec(psd_project(vec_to_herm(x.segment(at, len), d)));
    at += len;
  }
  return out;
}

}  // namespace detail

/// Alternating projections between the PSD-cone product and the affine
/// solution set, with the Dykstra correction on the cone side and a
/// least-squares seed. Candidates are always cone-feasible, so the reported
/// residual is purely the affine violation.
inline FeasibilityOutcome solve_feasibility(const FeasibilityProblem& p,
                                            int budget = kDefaultBudget,
                                            double cert_tol = kCertTol) {
  Eigen::Index total = 0;
  for (int d : p.block_dims) {
    if (d < 0) throw IllFormedProblem("solve_feasibility: negative block dimension");
    total += static_cast<Eigen::Index>(d) * d;
  }
  if (p.constraints.rows() != p.rhs.size()) {
    throw IllFormedProblem("solve_feasibility: constraint/rhs row mismatch");
  }
  if (p.constraints.rows() > 0 && p.constraints.cols() != total) {
    throw IllFormedProblem("solve_feasibility: constraint columns do not match variables");
  }

  FeasibilityOutcome out;
  if (p.constraints.rows() == 0) {
    out.status = FeasibilityStatus::feasible;
    out.solution = detail::split_blocks(RealVector::Zero(total), p.block_dims);
    out.residual = 0.0;
    return out;
  }

  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(p.constraints);
  RealVector seed = cod.solve(p.rhs);
  out.affine_floor = (p.constraints * seed - p.rhs).norm();

  auto record = [&](const RealVector& candidate) {
    double r = (p.constraints * candidate - p.rhs).norm();
    if (r < out.residual) {
      out.residual = r;
      out.solution = detail::split_blocks(candidate, p.block_dims);
    }
    return r;
  };

  RealVector y = detail::project_blocks_psd(seed, p.block_dims);
  if (record(y) <= cert_tol) {
    out.status = FeasibilityStatus::feasible;
    return out;
  }
  if (out.affine_floor > cert_tol) {
    return out;  // provably no affine solution at all; do not burn the budget
  }

  RealVector x = seed;
  RealVector correction = RealVector::Zero(total);
  for (out.iterations = 1; out.iterations <= budget; ++out.iterations) {
    y = detail::project_blocks_psd(x + correction, p.block_dims);
    correction = x + correction - y;
    x = y - cod.solve(p.constraints * y - p.rhs);
    if (record(y) <= cert_tol) {
      out.status = FeasibilityStatus::feasible;
      return out;
    }
  }
  return out;
}

}  // namespace povmforge
