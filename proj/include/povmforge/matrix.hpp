/*
 * This code is part of povm-forge.
 *
 * (C) Copyright 2026 povm-forge contributors.
 *
 * Licensed under the Apache License, Version 2.0; see the LICENSE file in
 * the repository root or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "povmforge/errors.hpp"

namespace povmforge {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// A matrix documented to be Hermitian. The alias carries intent only;
// validation happens in the functions that require it.
using HermitianMatrix = ComplexMatrix;

// Default tolerances. Spectral thresholds are relative to max(1, lambda_max)
// so they degrade gracefully for operators of small norm.
inline constexpr double kHermTol = 1e-10;
inline constexpr double kEigTol = 1e-10;
inline constexpr double kDefaultTol = 1e-8;
inline constexpr double kCertTol = 1e-7;
inline constexpr int kDefaultBudget = 20000;

/// Spectral decomposition of a Hermitian matrix.
///
/// `eigenvalues` are sorted in descending order; column k of `eigenvectors`
/// is a unit eigenvector for `eigenvalues(k)`.
struct Eigensystem {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};

inline ComplexMatrix identity(int dim) {
  return ComplexMatrix::Identity(dim, dim);
}

/// Matrix unit E_ab with a single 1 at row a, column b.
inline ComplexMatrix matrix_unit(int dim, int a, int b) {
  ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
  e(a, b) = Complex(1.0, 0.0);
  return e;
}

/// Hermiticity deviation ||M - M'||_F relative to max(1, ||M||_F).
inline double hermiticity_defect(const ComplexMatrix& m) {
  double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() / scale;
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kHermTol) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

inline void require_square(const ComplexMatrix& m, const std::string& what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x"
       << m.cols();
    throw DimensionMismatch(os.str());
  }
}

inline void require_hermitian(const ComplexMatrix& m, double tol,
                              const std::string& what) {
  require_square(m, what);
  double defect = hermiticity_defect(m);
  if (defect > tol) {
    std::ostringstream os;
    os << what << ": hermiticity defect " << defect << " exceeds tolerance "
       << tol;
    throw NotHermitian(os.str());
  }
}

/// Full spectral decomposition of a Hermitian matrix, eigenvalues descending.
///
/// Throws NotHermitian when the relative hermiticity defect exceeds `tol`.
/// The decomposition itself is computed on the Hermitian part (M + M')/2.
inline Eigensystem hermitian_eig(const HermitianMatrix& h,
                                 double tol = kHermTol) {
  require_hermitian(h, tol, "hermitian_eig");
  ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw PovmForgeError("hermitian_eig: eigensolver failed to converge");
  }
  const int n = static_cast<int>(h.rows());
  Eigensystem out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = ComplexMatrix(n, n);
  for (int k = 0; k < n; ++k) {
    out.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

/// Numerical rank of a PSD matrix: the count of eigenvalues above
/// tol * max(1, lambda_max).
///
/// Throws NotPsd when some eigenvalue lies below -tol * max(1, lambda_max),
/// and NotHermitian for non-Hermitian input.
inline int rank_eps(const HermitianMatrix& h, double tol = kEigTol) {
  Eigensystem es = hermitian_eig(h, std::max(tol, kHermTol));
  if (es.eigenvalues.size() == 0) return 0;
  double lambda_max = es.eigenvalues(0);
  double threshold = tol * std::max(1.0, lambda_max);
  double lambda_min = es.eigenvalues(es.eigenvalues.size() - 1);
  if (lambda_min < -threshold) {
    std::ostringstream os;
    os << "rank_eps: eigenvalue " << lambda_min
       << " is negative beyond tolerance " << threshold;
    throw NotPsd(os.str());
  }
  int rank = 0;
  for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
    if (es.eigenvalues(k) > threshold) ++rank;
  }
  return rank;
}

/// True iff the Hermitian matrix has min eigenvalue >= -tol * max(1, lambda_max).
inline bool is_psd(const HermitianMatrix& h, double tol = kEigTol) {
  if (h.rows() != h.cols()) return false;
  ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) return false;
  if (solver.eigenvalues().size() == 0) return true;
  double lambda_max = solver.eigenvalues().maxCoeff();
  double lambda_min = solver.eigenvalues().minCoeff();
  return lambda_min >= -tol * std::max(1.0, lambda_max);
}

/// Frobenius-nearest PSD matrix: eigenvalues clipped at zero.
inline ComplexMatrix psd_project(const HermitianMatrix& h) {
  ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  RealVector clipped = solver.eigenvalues().cwiseMax(0.0);
  return solver.eigenvectors() * clipped.asDiagonal() *
         solver.eigenvectors().adjoint();
}

/// Apply f to the spectrum of a PSD matrix. Eigenvalues are clipped at zero
/// before f is applied, so callers can pass sqrt and friends safely.
template <typename Fn>
inline ComplexMatrix psd_spectral_map(const HermitianMatrix& h, Fn f) {
  ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  RealVector vals = solver.eigenvalues().cwiseMax(0.0);
  for (Eigen::Index k = 0; k < vals.size(); ++k) vals(k) = f(vals(k));
  return solver.eigenvectors() * vals.asDiagonal() *
         solver.eigenvectors().adjoint();
}

/// Principal square root of a PSD matrix.
inline ComplexMatrix psd_sqrt(const HermitianMatrix& h) {
  return psd_spectral_map(h, [](double x) { return std::sqrt(x); });
}

/// Inverse square root on the support of a PSD matrix; eigenvalues at or
/// below `cutoff` map to zero (pseudoinverse behaviour).
inline ComplexMatrix psd_inv_sqrt(const HermitianMatrix& h,
                                  double cutoff = 1e-12) {
  return psd_spectral_map(
      h, [cutoff](double x) { return x > cutoff ? 1.0 / std::sqrt(x) : 0.0; });
}

/// Dimension of the span of a finite operator family, computed as the rank
/// of the Gram matrix G_ab = tr(A_a' A_b) under the Frobenius inner product.
///
/// Gram entries are quadratic in the operators, so eigenvalues are counted
/// against tol^2 * max(1, lambda_max); in particular gram_rank({M}, tol) = 0
/// exactly when ||M||_F <= tol. The cutoff never drops below the eigenvalue
/// noise floor of the solver, so exactly dependent families are never
/// promoted to full rank by rounding noise.
inline int gram_rank(const std::vector<ComplexMatrix>& ops,
                     double tol = kEigTol) {
  const int n = static_cast<int>(ops.size());
  if (n == 0) return 0;
  for (int a = 1; a < n; ++a) {
    if (ops[a].rows() != ops[0].rows() || ops[a].cols() != ops[0].cols()) {
      throw DimensionMismatch("gram_rank: operators have mixed shapes");
    }
  }
  ComplexMatrix gram(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      Complex g = (ops[a].adjoint() * ops[b]).trace();
      gram(a, b) = g;
      gram(b, a) = std::conj(g);
    }
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram);
  double lambda_max = solver.eigenvalues().maxCoeff();
  double noise_floor =
      16.0 * n * std::numeric_limits<double>::epsilon() * std::max(0.0, lambda_max);
  double threshold = std::max(tol * tol * std::max(1.0, lambda_max), noise_floor);
  int rank = 0;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    if (solver.eigenvalues()(k) > threshold) ++rank;
  }
  return rank;
}

/// Kronecker product a (x) b.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Partial trace over the first tensor factor of a (da*db) x (da*db) matrix
/// laid out as A (x) B; returns a db x db matrix.
inline ComplexMatrix partial_trace_first(const ComplexMatrix& m, int da,
                                         int db) {
  if (m.rows() != static_cast<Eigen::Index>(da) * db || m.rows() != m.cols()) {
    throw DimensionMismatch("partial_trace_first: shape mismatch");
  }
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (int a = 0; a < da; ++a) {
    out += m.block(a * db, a * db, db, db);
  }
  return out;
}

/// Partial trace over the second tensor factor; returns a da x da matrix.
inline ComplexMatrix partial_trace_second(const ComplexMatrix& m, int da,
                                          int db) {
  if (m.rows() != static_cast<Eigen::Index>(da) * db || m.rows() != m.cols()) {
    throw DimensionMismatch("partial_trace_second: shape mismatch");
  }
  ComplexMatrix out = ComplexMatrix::Zero(da, da);
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < da; ++j) {
      out(i, j) = m.block(i * db, j * db, db, db).trace();
    }
  }
  return out;
}

/// Trace norm ||M||_1 = sum of singular values.
inline double trace_norm(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

/// Isometric real coordinates of a d x d Hermitian matrix: d diagonal
/// entries, then sqrt(2)*Re and sqrt(2)*Im of the upper triangle row by
/// row. The scaling makes ||herm_to_vec(H)||_2 = ||H||_F, so Euclidean
/// projections in coordinates agree with Frobenius projections on matrices.
inline RealVector herm_to_vec(const ComplexMatrix& h) {
  require_square(h, "herm_to_vec");
  const int d = static_cast<int>(h.rows());
  // Non-Hermitian noise is symmetrized away.
  const double root2 = std::sqrt(2.0);
  RealVector x(static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i) x(i) = h(i, i).real();
  int pos = d;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      Complex avg = 0.5 * (h(i, j) + std::conj(h(j, i)));
      x(pos++) = root2 * avg.real();
      x(pos++) = root2 * avg.imag();
    }
  }
  return x;
}

/// Inverse of herm_to_vec.
inline ComplexMatrix vec_to_herm(const RealVector& x, int dim) {
  if (x.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw DimensionMismatch("vec_to_herm: coordinate count does not match dim");
  }
  const double inv_root2 = 1.0 / std::sqrt(2.0);
  ComplexMatrix h(dim, dim);
  for (int i = 0; i < dim; ++i) h(i, i) = Complex(x(i), 0.0);
  int pos = dim;
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      Complex v(inv_root2 * x(pos), inv_root2 * x(pos + 1));
      pos += 2;
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  return h;
}

}  // namespace povmforge
