/*
 * This code is part of povm-forge.
 *
 * (C) Copyright 2026 povm-forge contributors.
 *
 * Licensed under the Apache License, Version 2.0; see the LICENSE file in
 * the repository root or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "povmforge/channels.hpp"
#include "povmforge/dilation.hpp"
#include "povmforge/errors.hpp"
#include "povmforge/feasibility.hpp"
#include "povmforge/matrix.hpp"
#include "povmforge/observables.hpp"
#include "povmforge/random.hpp"

namespace povmforge {

/// Choi matrix of a channel: C = sum_ab E_ab (x) L(E_ab), laid out with the
/// input factor first (row index a*out_dim + s).
inline ComplexMatrix choi_matrix(const Channel& l) {
  const Eigen::Index dim = static_cast<Eigen::Index>(l.in_dim) * l.out_dim;
  ComplexMatrix c = ComplexMatrix::Zero(dim, dim);
  for (const ComplexMatrix& k : l.kraus) {
    ComplexVector flat(dim);
    for (int a = 0; a < l.in_dim; ++a) {
      for (int s = 0; s < l.out_dim; ++s) {
        flat(static_cast<Eigen::Index>(a) * l.out_dim + s) = k(s, a);
      }
    }
    c += flat * flat.adjoint();
  }
  return c;
}

/// Kraus form from a (near-)PSD Choi matrix: eigenvalues below `clip` are
/// dropped, and the Kraus list is renormalized to restore exact trace
/// preservation.
inline Channel channel_from_choi(const ComplexMatrix& choi, int in_dim,
                                 int out_dim, double clip = 1e-10) {
  if (choi.rows() != static_cast<Eigen::Index>(in_dim) * out_dim ||
      choi.rows() != choi.cols()) {
    throw DimensionMismatch("channel_from_choi: Choi shape does not match dims");
  }
  Eigensystem es = hermitian_eig(0.5 * (choi + choi.adjoint()), kDefaultTol);
  std::vector<ComplexMatrix> kraus;
  ComplexMatrix total = ComplexMatrix::Zero(in_dim, in_dim);
  for (Eigen::Index i = 0; i < es.eigenvalues.size(); ++i) {
    if (es.eigenvalues(i) <= clip) continue;
    double root = std::sqrt(es.eigenvalues(i));
    ComplexMatrix k(out_dim, in_dim);
    for (int a = 0; a < in_dim; ++a) {
      for (int s = 0; s < out_dim; ++s) {
        k(s, a) = root * es.eigenvectors(static_cast<Eigen::Index>(a) * out_dim + s, i);
      }
    }
    total += k.adjoint() * k;
    kraus.push_back(std::move(k));
  }
  if (kraus.empty()) {
    throw NotNormalized("channel_from_choi: Choi matrix has no mass above the clip threshold");
  }
  ComplexMatrix fix = psd_inv_sqrt(total);
  for (ComplexMatrix& k : kraus) k = k * fix;
  return make_channel(std::move(kraus));
}

struct RealizeOptions {
  int budget = kDefaultBudget;
  double cert_tol = kCertTol;
};

/// Search result for an observable on the measurement output realizing a
/// target observable on the input. `observable` is present iff the solver
/// certified feasibility; `details` carries residual, iteration count, and
/// the affine floor either way.
struct ObservableRealization {
  std::optional<Povm> observable;
  FeasibilityOutcome details;
  bool used_block_reduction = false;
};

/// Search result for a channel Gamma with target = Gamma o base.
struct ChannelRealization {
  std::optional<Channel> channel;
  FeasibilityOutcome details;
};

namespace detail {

// Action of a Choi block on a fixed Hermitian input M:
// Gamma_X(M) = Tr_in[(M^T (x) I) X] = sum_{p,q} M(p,q) X.block(p*o, q*o).
inline MatrixMap choi_action_on(const ComplexMatrix& m_fixed, int out_dim) {
  const int in_dim = static_cast<int>(m_fixed.rows());
  return [m_fixed, in_dim, out_dim](const ComplexMatrix& x) {
    ComplexMatrix out = ComplexMatrix::Zero(out_dim, out_dim);
    for (int p = 0; p < in_dim; ++p) {
      for (int q = 0; q < in_dim; ++q) {
        if (m_fixed(p, q) == Complex(0.0, 0.0)) continue;
        out += m_fixed(p, q) *
               x.block(static_cast<Eigen::Index>(p) * out_dim,
                       static_cast<Eigen::Index>(q) * out_dim, out_dim, out_dim);
      }
    }
    return out;
  };
}

// Feasibility search for Gamma with target = Gamma o base, over Gamma's
// Choi matrix: PSD, trace-preserving, matching the composition on an
// orthonormal Hermitian basis of the common input space.
inline ChannelRealization realize_channel_between(const Channel& base,
                                                  const Channel& target,
                                                  const RealizeOptions& opts) {
  if (base.in_dim != target.in_dim) {
    throw DimensionMismatch("channel realization: channels have different input spaces");
  }
  const int m = base.out_dim;
  const int o = target.out_dim;
  const int d = base.in_dim;
  FeasibilityProblemBuilder builder({m * o});
  for (int alpha = 0; alpha < d * d; ++alpha) {
    RealVector unit = RealVector::Zero(d * d);
    unit(alpha) = 1.0;
    ComplexMatrix h = vec_to_herm(unit, d);
    builder.add_operator_equation({{0, choi_action_on(apply_matrix(base, h), o)}},
                                  apply_matrix(target, h));
  }
  builder.add_operator_equation(
      {{0, [m, o](const ComplexMatrix& x) { return partial_trace_second(x, m, o); }}},
      identity(m));
  ChannelRealization out;
  out.details = solve_feasibility(builder.build(), opts.budget, opts.cert_tol);
  if (out.details.status == FeasibilityStatus::feasible) {
    out.channel = channel_from_choi(out.details.solution.front(), m, o);
  }
  return out;
}

}  // namespace detail

/// Finds a channel Gamma with Lambda = Gamma o Lambda_A, i.e. a way to
/// recover the target channel from the least disturbing measurement of A.
inline ChannelRealization realize_channel_after(const Povm& a,
                                                const Channel& lambda,
                                                const RealizeOptions& opts = {}) {
  if (lambda.in_dim != a.dim) {
    throw DimensionMismatch("realize_channel_after: channel input does not match the observable");
  }
  return detail::realize_channel_between(least_disturbing(a).channel, lambda,
                                         opts);
}

/// Finds an observable B' on the output of the least disturbing measurement
/// of A whose pullback is B: dual(Lambda_A)(B'(k)) = B(k), sum_k B'(k) = I.
///
/// The search first restricts B' to be block diagonal over the dilation
/// blocks (the compression of any solution under the block-dephasing
/// channel is again a solution, so this loses nothing) and falls back to
/// the full space only if the reduced search exhausts its budget.
inline ObservableRealization realize_observable_after(
    const Povm& a, const Povm& b, const RealizeOptions& opts = {}) {
  if (a.dim != b.dim) {
    throw DimensionMismatch("realize_observable_after: observables act on different spaces");
  }
  LeastDisturbing ld = least_disturbing(a);
  const int dil = ld.dilation.dil_dim;
  const int m = b.n_outcomes();

  struct Block {
    int offset;
    int size;
    ComplexMatrix rows;  // the block's slice of the dilation isometry
  };
  std::vector<Block> blocks;
  for (int j = 0; j < a.n_outcomes(); ++j) {
    auto [offset, size] = ld.dilation.block_index.at(a.outcomes[j]);
    if (size == 0) continue;
    blocks.push_back({offset, size, ld.dilation.isometry.middleRows(offset, size)});
  }
  const int nb = static_cast<int>(blocks.size());

  ObservableRealization out;
  out.used_block_reduction = true;
  {
    std::vector<int> dims;
    dims.reserve(static_cast<std::size_t>(m) * nb);
    for (int k = 0; k < m; ++k) {
      for (const Block& blk : blocks) dims.push_back(blk.size);
    }
    FeasibilityProblemBuilder builder(dims);
    for (int k = 0; k < m; ++k) {
      std::vector<std::pair<int, MatrixMap>> terms;
      for (int jj = 0; jj < nb; ++jj) {
        ComplexMatrix rows = blocks[jj].rows;
        terms.emplace_back(k * nb + jj, [rows](const ComplexMatrix& x) {
          return ComplexMatrix(rows.adjoint() * x * rows);
        });
      }
      builder.add_operator_equation(terms, b.effects[k]);
    }
    for (int jj = 0; jj < nb; ++jj) {
      std::vector<int> sum_blocks;
      for (int k = 0; k < m; ++k) sum_blocks.push_back(k * nb + jj);
      builder.add_identity_sum(sum_blocks, blocks[jj].size);
    }
    out.details = solve_feasibility(builder.build(), opts.budget, opts.cert_tol);
    if (out.details.status == FeasibilityStatus::feasible) {
      Povm bp;
      bp.dim = dil;
      bp.outcomes = b.outcomes;
      for (int k = 0; k < m; ++k) {
        ComplexMatrix e = ComplexMatrix::Zero(dil, dil);
        for (int jj = 0; jj < nb; ++jj) {
          e.block(blocks[jj].offset, blocks[jj].offset, blocks[jj].size,
                  blocks[jj].size) = out.details.solution[k * nb + jj];
        }
        bp.effects.push_back(std::move(e));
      }
      out.observable = std::move(bp);
      return out;
    }
  }

  // Full-space fallback: one dil x dil block per target outcome.
  out.used_block_reduction = false;
  std::vector<int> dims(m, dil);
  FeasibilityProblemBuilder builder(dims);
  const Channel& channel = ld.channel;
  for (int k = 0; k < m; ++k) {
    builder.add_operator_equation(
        {{k, [&channel](const ComplexMatrix& x) { return dual_apply(channel, x); }}},
        b.effects[k]);
  }
  std::vector<int> all(m);
  std::iota(all.begin(), all.end(), 0);
  builder.add_identity_sum(all, dil);
  out.details = solve_feasibility(builder.build(), opts.budget, opts.cert_tol);
  if (out.details.status == FeasibilityStatus::feasible) {
    Povm bp;
    bp.dim = dil;
    bp.outcomes = b.outcomes;
    bp.effects = out.details.solution;
    out.observable = std::move(bp);
  }
  return out;
}

/// Both-ways channel post-processing certificates between l1 and l2:
/// forward is Gamma_12 with l2 = Gamma_12 o l1, backward the reverse.
struct EquivalenceCertification {
  ChannelRealization forward;
  ChannelRealization backward;

  bool certified() const {
    return forward.channel.has_value() && backward.channel.has_value();
  }
};

inline EquivalenceCertification certify_equivalence(
    const Channel& l1, const Channel& l2, const RealizeOptions& opts = {}) {
  if (l1.in_dim != l2.in_dim) {
    throw DimensionMismatch("certify_equivalence: channels have different input spaces");
  }
  EquivalenceCertification out;
  out.forward = detail::realize_channel_between(l1, l2, opts);
  out.backward = detail::realize_channel_between(l2, l1, opts);
  return out;
}

/// The observable measured by performing an instrument and then measuring C
/// on its output: G(i,j) = sum_n K_{i,n}' C(j) K_{i,n} over the product
/// outcome set. Flat outcome labels are i_index * |C outcomes| + j_index.
struct JointObservable {
  Povm povm;
  std::vector<int> first_outcomes;
  std::vector<int> second_outcomes;

  const ComplexMatrix& effect(int i, int j) const {
    return povm.effects.at(static_cast<std::size_t>(i) * second_outcomes.size() + j);
  }
};

inline JointObservable sequential_joint(const Instrument& ins, const Povm& c) {
  if (c.dim != ins.out_dim) {
    throw DimensionMismatch("sequential_joint: observable does not live on the instrument output");
  }
  JointObservable g;
  g.first_outcomes = ins.outcomes;
  g.second_outcomes = c.outcomes;
  std::vector<ComplexMatrix> effects;
  effects.reserve(static_cast<std::size_t>(ins.n_outcomes()) * c.n_outcomes());
  for (int i = 0; i < ins.n_outcomes(); ++i) {
    for (int j = 0; j < c.n_outcomes(); ++j) {
      ComplexMatrix e = ComplexMatrix::Zero(ins.in_dim, ins.in_dim);
      for (const ComplexMatrix& k : ins.operations[i]) {
        e += k.adjoint() * c.effects[j] * k;
      }
      effects.push_back(0.5 * (e + e.adjoint()));
    }
  }
  g.povm = validate_povm(std::move(effects));
  return g;
}

/// Row and column sums of a joint observable: the observable measured first
/// and the one effectively measured second.
inline std::pair<Povm, Povm> margins(const JointObservable& g) {
  const int n1 = static_cast<int>(g.first_outcomes.size());
  const int n2 = static_cast<int>(g.second_outcomes.size());
  const int d = g.povm.dim;
  std::vector<ComplexMatrix> first(n1, ComplexMatrix::Zero(d, d));
  std::vector<ComplexMatrix> second(n2, ComplexMatrix::Zero(d, d));
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const ComplexMatrix& e = g.effect(i, j);
      first[i] += e;
      second[j] += e;
    }
  }
  return {validate_povm(g.first_outcomes, std::move(first)),
          validate_povm(g.second_outcomes, std::move(second))};
}

/// A state pair witnessing that `target` cannot be recovered from `base`:
/// any recovery channel would have to increase trace distance, which is
/// impossible.
struct ChannelRefutation {
  DensityMatrix rho1;
  DensityMatrix rho2;
  double base_distance = 0.0;
  double target_distance = 0.0;
};

/// Desk-scale refutation oracle for target = Gamma o base. Scans pairs from
/// a deterministic family of pure states (basis states, balanced two-level
/// superpositions, and seeded random states) for a data-processing
/// violation. Absence of a witness proves nothing.
inline std::optional<ChannelRefutation> refute_channel_realization(
    const Channel& base, const Channel& target, int n_random_states = 40,
    std::uint64_t seed = 7) {
  if (base.in_dim != target.in_dim) {
    throw DimensionMismatch("refute_channel_realization: channels have different input spaces");
  }
  const int d = base.in_dim;
  std::vector<DensityMatrix> states;
  for (int i = 0; i < d; ++i) {
    ComplexVector v = ComplexVector::Zero(d);
    v(i) = 1.0;
    states.push_back({d, v * v.adjoint()});
  }
  const double inv_root2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      for (Complex phase : {Complex(1.0, 0.0), Complex(0.0, 1.0), Complex(-1.0, 0.0)}) {
        ComplexVector v = ComplexVector::Zero(d);
        v(i) = inv_root2;
        v(j) = phase * inv_root2;
        states.push_back({d, v * v.adjoint()});
      }
    }
  }
  Rng rng(seed);
  for (int k = 0; k < n_random_states; ++k) {
    states.push_back(random_pure_state(d, rng));
  }
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (std::size_t t = s + 1; t < states.size(); ++t) {
      ComplexMatrix delta = states[s].matrix - states[t].matrix;
      double after_target = trace_norm(apply_matrix(target, delta));
      double after_base = trace_norm(apply_matrix(base, delta));
      if (after_target > after_base + 1e-9 * std::max(1.0, after_target)) {
        return ChannelRefutation{states[s], states[t], after_base, after_target};
      }
    }
  }
  return std::nullopt;
}

}  // namespace povmforge
