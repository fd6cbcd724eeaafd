/*
 * This code is part of povm-forge.
 *
 * (C) Copyright 2026 povm-forge contributors.
 *
 * Licensed under the Apache License, Version 2.0; see the LICENSE file in
 * the repository root or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <map>
#include <utility>
#include <vector>

#include "povmforge/channels.hpp"
#include "povmforge/errors.hpp"
#include "povmforge/matrix.hpp"
#include "povmforge/observables.hpp"

namespace povmforge {

/// A projective model of an observable on a larger space: an isometry J
/// into the dilation space and a projection-valued measure P there with
/// A(j) = J' P(j) J. `block_index` records, per outcome, the (offset, size)
/// range the construction assigns to that outcome.
struct NaimarkDilation {
  int dil_dim = 0;
  Povm pvm;
  ComplexMatrix isometry;
  std::map<int, std::pair<int, int>> block_index;
};

/// Builds the smallest projective model: each effect is spectrally
/// decomposed, A(j) = sum_k |d_{j,k}><d_{j,k}| over eigenvalues above
/// rank_tol, the dilation space is the direct sum of one coordinate per
/// kept eigenvector, J psi = sum_{j,k} <d_{j,k}|psi> e_{j,k}, and P(j) is
/// the coordinate projection onto block j.
///
/// Blocks follow outcome-label order; inside a block, descending eigenvalue
/// order. Zero effects get empty blocks.
inline NaimarkDilation minimal_naimark(const Povm& a,
                                       double rank_tol = kEigTol) {
  struct BlockData {
    int offset;
    std::vector<ComplexVector> vectors;  // d_{j,k}, scaled by sqrt(eigenvalue)
  };
  std::vector<BlockData> blocks;
  blocks.reserve(a.n_outcomes());
  int dil_dim = 0;
  for (int j = 0; j < a.n_outcomes(); ++j) {
    Eigensystem es = hermitian_eig(a.effects[j], std::max(rank_tol, kHermTol));
    double threshold = rank_tol * std::max(1.0, es.eigenvalues(0));
    BlockData block;
    block.offset = dil_dim;
    for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
      double lambda = es.eigenvalues(k);
      if (lambda <= threshold) continue;
      if (lambda < -threshold) {
        throw NotPsd("minimal_naimark: effect has a negative eigenvalue");
      }
      block.vectors.push_back(std::sqrt(lambda) * es.eigenvectors.col(k));
    }
    dil_dim += static_cast<int>(block.vectors.size());
    blocks.push_back(std::move(block));
  }
  NaimarkDilation d;
  d.dil_dim = dil_dim;
  d.isometry = ComplexMatrix::Zero(dil_dim, a.dim);
  d.pvm.dim = dil_dim;
  d.pvm.outcomes = a.outcomes;
  for (int j = 0; j < a.n_outcomes(); ++j) {
    const BlockData& block = blocks[j];
    const int size = static_cast<int>(block.vectors.size());
    for (int k = 0; k < size; ++k) {
      d.isometry.row(block.offset + k) = block.vectors[k].adjoint();
    }
    ComplexMatrix p = ComplexMatrix::Zero(dil_dim, dil_dim);
    p.block(block.offset, block.offset, size, size) = identity(size);
    d.pvm.effects.push_back(std::move(p));
    d.block_index[a.outcomes[j]] = {block.offset, size};
  }
  return d;
}

/// A channel paired with the instrument that produces it by forgetting
/// outcomes, plus the dilation both were built from.
struct LeastDisturbing {
  NaimarkDilation dilation;
  Channel channel;
  Instrument instrument;
};

/// The channel rho -> sum_j P(j) J rho J' P(j) over the minimal projective
/// model, together with the instrument assigning outcome j the single
/// branch P(j) J. Among all ways to measure A this disturbs the input the
/// least: any other measurement channel of A is a coarse-graining of it.
inline LeastDisturbing least_disturbing(const Povm& a,
                                        double rank_tol = kEigTol) {
  LeastDisturbing out;
  out.dilation = minimal_naimark(a, rank_tol);
  const NaimarkDilation& d = out.dilation;
  out.instrument.in_dim = a.dim;
  out.instrument.out_dim = d.dil_dim;
  out.instrument.outcomes = a.outcomes;
  std::vector<ComplexMatrix> kraus;
  for (int j = 0; j < a.n_outcomes(); ++j) {
    auto [offset, size] = d.block_index.at(a.outcomes[j]);
    ComplexMatrix k = ComplexMatrix::Zero(d.dil_dim, a.dim);
    k.middleRows(offset, size) = d.isometry.middleRows(offset, size);
    out.instrument.operations.push_back({k});
    kraus.push_back(std::move(k));
  }
  out.channel = make_channel(std::move(kraus));
  return out;
}

/// The measurement channel of an arbitrary (not necessarily minimal)
/// projective model. Throws InvalidDilation when the claimed model fails
/// its defining identities.
inline Channel least_disturbing_from(const NaimarkDilation& d,
                                     double tol = kDefaultTol) {
  const int dil = d.dil_dim;
  if (d.isometry.rows() != dil || d.pvm.dim != dil) {
    throw InvalidDilation("least_disturbing_from: inconsistent dilation dimensions");
  }
  const int in = static_cast<int>(d.isometry.cols());
  double scale = std::sqrt(static_cast<double>(dil));
  if ((d.isometry.adjoint() * d.isometry - identity(in)).norm() > tol * scale) {
    throw InvalidDilation("least_disturbing_from: J is not an isometry");
  }
  ComplexMatrix sum = ComplexMatrix::Zero(dil, dil);
  for (const ComplexMatrix& p : d.pvm.effects) {
    if (!is_hermitian(p, tol) || (p * p - p).norm() > tol * scale) {
      throw InvalidDilation("least_disturbing_from: a PVM element is not a projection");
    }
    sum += p;
  }
  if ((sum - identity(dil)).norm() > tol * scale) {
    throw InvalidDilation("least_disturbing_from: PVM does not sum to identity");
  }
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(d.pvm.effects.size());
  for (const ComplexMatrix& p : d.pvm.effects) {
    kraus.push_back(p * d.isometry);
  }
  return make_channel(std::move(kraus), tol);
}

/// Smallest output dimension over all measurement channels of A: the sum of
/// effect ranks after reducing A to minimally sufficient form. Always at
/// least dim H, with equality exactly when the reduction is projective.
inline int minimal_output_dimension(const Povm& a, double tol = kDefaultTol,
                                    double rank_tol = kEigTol) {
  Povm reduced = minimal_sufficient_reduction(a, tol).reduced;
  int total = 0;
  for (const ComplexMatrix& e : reduced.effects) {
    total += rank_eps(e, rank_tol);
  }
  return total;
}

}  // namespace povmforge
