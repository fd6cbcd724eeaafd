/*
 * This code is part of povm-forge.
 *
 * (C) Copyright 2026 povm-forge contributors.
 *
 * Licensed under the Apache License, Version 2.0; see the LICENSE file in
 * the repository root or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "povmforge/matrix.hpp"
#include "povmforge/observables.hpp"

namespace povmforge {

/// Deterministic random source for test instances and sample generation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double gaussian() { return normal_(engine_); }

  double uniform() { return uniform_(engine_); }

  int uniform_int(int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Matrix with independent standard complex Gaussian entries.
inline ComplexMatrix random_gaussian_matrix(int rows, int cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = Complex(rng.gaussian(), rng.gaussian());
    }
  }
  return m;
}

/// Haar-ish random unitary: QR of a Gaussian matrix with the phase of R's
/// diagonal absorbed into Q.
inline ComplexMatrix random_unitary(int dim, Rng& rng) {
  ComplexMatrix g = random_gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    Complex d = r(k, k);
    double a = std::abs(d);
    q.col(k) *= (a > 0.0) ? d / a : Complex(1.0, 0.0);
  }
  return q;
}

/// Random full-rank state: normalized G G' for Gaussian G.
inline DensityMatrix random_density(int dim, Rng& rng) {
  ComplexMatrix g = random_gaussian_matrix(dim, dim, rng);
  ComplexMatrix w = g * g.adjoint();
  DensityMatrix rho;
  rho.dim = dim;
  rho.matrix = w / w.trace().real();
  return rho;
}

/// Random pure state |v><v| with Haar-ish v.
inline DensityMatrix random_pure_state(int dim, Rng& rng) {
  ComplexVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(rng.gaussian(), rng.gaussian());
  v.normalize();
  DensityMatrix rho;
  rho.dim = dim;
  rho.matrix = v * v.adjoint();
  return rho;
}

/// Random observable: Wishart blocks G(j) = X_j X_j' whitened by the total,
/// A(j) = S^{-1/2} G(j) S^{-1/2} with S = sum_j G(j).
///
/// When `ranks` is given, effect j is built from a dim x ranks[j] factor so
/// its rank is min(dim, ranks[j]). Throws SingularNormalizer when S is not
/// invertible (possible only with rank-starved inputs).
inline Povm random_povm(int dim, int n_outcomes, Rng& rng,
                        const std::vector<int>& ranks = {}) {
  if (!ranks.empty() && static_cast<int>(ranks.size()) != n_outcomes) {
    throw OutcomeMismatch("random_povm: ranks/outcome count mismatch");
  }
  std::vector<ComplexMatrix> blocks;
  blocks.reserve(n_outcomes);
  ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
  for (int j = 0; j < n_outcomes; ++j) {
    int r = ranks.empty() ? dim : ranks[j];
    ComplexMatrix x = random_gaussian_matrix(dim, r, rng);
    blocks.push_back(x * x.adjoint());
    s += blocks.back();
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s);
  if (es.eigenvalues().minCoeff() <
      1e-12 * std::max(1.0, es.eigenvalues().maxCoeff())) {
    throw SingularNormalizer("random_povm: total is numerically singular");
  }
  ComplexMatrix whiten = psd_inv_sqrt(s);
  std::vector<ComplexMatrix> effects;
  effects.reserve(n_outcomes);
  for (const ComplexMatrix& g : blocks) {
    ComplexMatrix e = whiten * g * whiten;
    effects.push_back(0.5 * (e + e.adjoint()));
  }
  return validate_povm(std::move(effects));
}

}  // namespace povmforge
