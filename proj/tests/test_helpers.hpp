/*
 * This code is part of povm-forge.
 *
 * (C) Copyright 2026 povm-forge contributors.
 *
 * Licensed under the Apache License, Version 2.0; see the LICENSE file in
 * the repository root or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "povmforge/povmforge.hpp"

namespace th {

using namespace povmforge;

// Three rank-1 effects (2/3)|theta_k><theta_k| at angles 0, 120, 240 degrees.
inline Povm trine() {
  Povm a;
  a.dim = 2;
  a.outcomes = {0, 1, 2};
  for (int k = 0; k < 3; ++k) {
    double theta = 2.0 * M_PI * k / 3.0;
    ComplexVector v(2);
    v << std::cos(theta), std::sin(theta);
    a.effects.push_back((2.0 / 3.0) * v * v.adjoint());
  }
  return a;
}

inline Povm sharp_basis(int dim) {
  Povm a;
  a.dim = dim;
  for (int k = 0; k < dim; ++k) {
    a.outcomes.push_back(k);
    a.effects.push_back(matrix_unit(dim, k, k));
  }
  return a;
}

inline Povm sharp_z() { return sharp_basis(2); }

inline Povm sharp_x() {
  Povm a;
  a.dim = 2;
  a.outcomes = {0, 1};
  ComplexVector plus(2), minus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  a.effects = {plus * plus.adjoint(), minus * minus.adjoint()};
  return a;
}

// Binary qubit observable diag(1-eps/2, eps/2), diag(eps/2, 1-eps/2).
inline Povm noisy_z(double eps) {
  Povm a;
  a.dim = 2;
  a.outcomes = {0, 1};
  ComplexMatrix e0 = ComplexMatrix::Zero(2, 2);
  e0(0, 0) = 1.0 - eps / 2.0;
  e0(1, 1) = eps / 2.0;
  a.effects = {e0, identity(2) - e0};
  return a;
}

// B(j,n) = p_{j,n} A(j): splits every outcome into `parts` weighted copies.
inline Povm split_outcomes(const Povm& a, int parts, Rng& rng) {
  Povm b;
  b.dim = a.dim;
  int next = 0;
  for (std::size_t j = 0; j < a.effects.size(); ++j) {
    std::vector<double> w(parts);
    double total = 0.0;
    for (double& x : w) {
      x = 0.1 + rng.uniform();
      total += x;
    }
    for (int n = 0; n < parts; ++n) {
      b.outcomes.push_back(next++);
      b.effects.push_back((w[n] / total) * a.effects[j]);
    }
  }
  return b;
}

inline Povm shuffle_outcomes(const Povm& a, Rng& rng) {
  std::vector<int> perm(a.effects.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.uniform_int(0, static_cast<int>(i) - 1)]);
  }
  Relabeling f;
  for (std::size_t j = 0; j < perm.size(); ++j) {
    f.map[a.outcomes[j]] = perm[j];
  }
  return relabel(a, f);
}

// B = A^p for a random column-stochastic p with m rows.
inline std::pair<Povm, StochasticMatrix> planted_post_processing(
    const Povm& a, int m, Rng& rng) {
  const int n = a.n_outcomes();
  RealMatrix p(m, n);
  for (int j = 0; j < n; ++j) {
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
      p(k, j) = 0.05 + rng.uniform();
      total += p(k, j);
    }
    p.col(j) /= total;
  }
  Povm b;
  b.dim = a.dim;
  for (int k = 0; k < m; ++k) {
    b.outcomes.push_back(k);
    ComplexMatrix acc = ComplexMatrix::Zero(a.dim, a.dim);
    for (int j = 0; j < n; ++j) acc += p(k, j) * a.effects[j];
    b.effects.push_back(acc);
  }
  return {b, make_stochastic(p)};
}

// Channel with Kraus {sqrt(p_n) V_n} where the V_n are isometries with
// mutually orthogonal ranges; such channels are equivalent to the identity.
inline Channel random_flagged_isometry_channel(int dim, int n_flags, Rng& rng) {
  std::vector<double> p(n_flags);
  double total = 0.0;
  for (double& x : p) {
    x = 0.2 + rng.uniform();
    total += x;
  }
  ComplexMatrix u = random_unitary(dim * n_flags, rng);
  std::vector<ComplexMatrix> kraus;
  for (int n = 0; n < n_flags; ++n) {
    ComplexMatrix v = u.middleCols(n * dim, dim);
    kraus.push_back(std::sqrt(p[n] / total) * v);
  }
  return make_channel(kraus);
}

inline Channel depolarizing_qubit(double eps) {
  ComplexMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  sz << 1, 0, 0, -1;
  std::vector<ComplexMatrix> kraus = {
      std::sqrt(1.0 - 0.75 * eps) * identity(2), std::sqrt(eps / 4.0) * sx,
      std::sqrt(eps / 4.0) * sy, std::sqrt(eps / 4.0) * sz};
  return make_channel(kraus);
}

// Pinching onto the blocks of a dilation PVM.
inline Channel pinching(const NaimarkDilation& d) {
  return make_channel(d.pvm.effects);
}

inline double max_abs(const ComplexMatrix& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace th
