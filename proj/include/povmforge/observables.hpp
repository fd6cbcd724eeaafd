/*
 * This code is part of povm-forge.
 *
 * (C) Copyright 2026 povm-forge contributors.
 *
 * Licensed under the Apache License, Version 2.0; see the LICENSE file in
 * the repository root or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "povmforge/errors.hpp"
#include "povmforge/matrix.hpp"

namespace povmforge {

/// A discrete observable: effects A(j) >= 0 indexed by integer outcome
/// labels, summing to the identity on a dim-dimensional space.
struct Povm {
  int dim = 0;
  std::vector<int> outcomes;
  std::vector<ComplexMatrix> effects;

  int n_outcomes() const { return static_cast<int>(outcomes.size()); }

  const ComplexMatrix& effect(int index) const { return effects.at(index); }

  int label(int index) const { return outcomes.at(index); }

  /// Position of an outcome label; throws OutcomeMismatch when absent.
  int index_of(int outcome) const {
    for (int i = 0; i < n_outcomes(); ++i) {
      if (outcomes[i] == outcome) return i;
    }
    std::ostringstream os;
    os << "outcome " << outcome << " is not in the outcome set";
    throw OutcomeMismatch(os.str());
  }
};

/// A state: unit-trace PSD matrix.
struct DensityMatrix {
  int dim = 0;
  ComplexMatrix matrix;
};

/// A classical relabeling of outcomes, j -> f(j).
struct Relabeling {
  std::map<int, int> map;
};

/// A measurement process: one Kraus list per outcome. The operation for
/// outcome j sends rho to sum_n K_{j,n} rho K_{j,n}'; the operations sum to
/// a trace-preserving map.
struct Instrument {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<int> outcomes;
  std::vector<std::vector<ComplexMatrix>> operations;

  int n_outcomes() const { return static_cast<int>(outcomes.size()); }
};

/// Checks effects for hermiticity, positivity, and sum-to-identity, and
/// wraps them into a Povm with the given outcome labels.
///
/// The identity deficit is measured in Frobenius norm relative to
/// ||I||_F = sqrt(dim). Zero effects are legal.
inline Povm validate_povm(std::vector<int> outcomes,
                          std::vector<ComplexMatrix> effects,
                          double tol = kDefaultTol) {
  if (outcomes.size() != effects.size()) {
    throw OutcomeMismatch("validate_povm: outcome/effect count mismatch");
  }
  if (effects.empty()) {
    throw OutcomeMismatch("validate_povm: an observable needs at least one outcome");
  }
  std::set<int> seen(outcomes.begin(), outcomes.end());
  if (seen.size() != outcomes.size()) {
    throw OutcomeMismatch("validate_povm: duplicate outcome labels");
  }
  const ComplexMatrix& first = effects.front();
  require_square(first, "validate_povm");
  const int dim = static_cast<int>(first.rows());
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < effects.size(); ++i) {
    const ComplexMatrix& e = effects[i];
    if (e.rows() != dim || e.cols() != dim) {
      std::ostringstream os;
      os << "validate_povm: effect for outcome " << outcomes[i]
         << " has shape " << e.rows() << "x" << e.cols() << ", expected "
         << dim << "x" << dim;
      throw DimensionMismatch(os.str());
    }
    if (!is_hermitian(e, std::max(tol, kHermTol))) {
      std::ostringstream os;
      os << "validate_povm: effect for outcome " << outcomes[i]
         << " is not Hermitian";
      throw NotHermitian(os.str());
    }
    if (!is_psd(e, std::max(tol, kEigTol))) {
      std::ostringstream os;
      os << "validate_povm: effect for outcome " << outcomes[i]
         << " is not positive semidefinite";
      throw NotPsd(os.str());
    }
    sum += e;
  }
  double deficit = (sum - identity(dim)).norm();
  if (deficit > tol * std::sqrt(static_cast<double>(dim))) {
    std::ostringstream os;
    os << "validate_povm: effects sum to identity with deficit " << deficit;
    throw NotNormalized(os.str());
  }
  Povm a;
  a.dim = dim;
  a.outcomes = std::move(outcomes);
  a.effects = std::move(effects);
  return a;
}

/// Overload with implicit outcome labels 0..n-1.
inline Povm validate_povm(std::vector<ComplexMatrix> effects,
                          double tol = kDefaultTol) {
  std::vector<int> outcomes(effects.size());
  std::iota(outcomes.begin(), outcomes.end(), 0);
  return validate_povm(std::move(outcomes), std::move(effects), tol);
}

/// Checks hermiticity, positivity, unit trace.
inline DensityMatrix validate_density(const ComplexMatrix& m,
                                      double tol = kDefaultTol) {
  require_hermitian(m, std::max(tol, kHermTol), "validate_density");
  if (!is_psd(m, std::max(tol, kEigTol))) {
    throw NotPsd("validate_density: state is not positive semidefinite");
  }
  double deficit = std::abs(m.trace().real() - 1.0) + std::abs(m.trace().imag());
  if (deficit > tol) {
    std::ostringstream os;
    os << "validate_density: trace deviates from 1 by " << deficit;
    throw NotNormalized(os.str());
  }
  DensityMatrix rho;
  rho.dim = static_cast<int>(m.rows());
  rho.matrix = m;
  return rho;
}

/// Outcome probabilities p(j) = tr[A(j) rho], aligned with a.outcomes.
inline RealVector outcome_distribution(const Povm& a,
                                       const DensityMatrix& rho) {
  if (a.dim != rho.dim) {
    throw DimensionMismatch("outcome_distribution: observable and state act on different spaces");
  }
  RealVector p(a.n_outcomes());
  for (int j = 0; j < a.n_outcomes(); ++j) {
    p(j) = (a.effects[j] * rho.matrix).trace().real();
  }
  return p;
}

/// Classical post-processing by a relabeling: B(k) = sum over f(j)=k of A(j).
/// The map must cover every outcome of a; target labels come out sorted.
inline Povm relabel(const Povm& a, const Relabeling& f) {
  std::set<int> targets;
  for (int j : a.outcomes) {
    auto it = f.map.find(j);
    if (it == f.map.end()) {
      std::ostringstream os;
      os << "relabel: relabeling has no entry for outcome " << j;
      throw OutcomeMismatch(os.str());
    }
    targets.insert(it->second);
  }
  Povm b;
  b.dim = a.dim;
  b.outcomes.assign(targets.begin(), targets.end());
  b.effects.assign(b.outcomes.size(), ComplexMatrix::Zero(a.dim, a.dim));
  for (int j = 0; j < a.n_outcomes(); ++j) {
    int k = f.map.at(a.outcomes[j]);
    int pos = static_cast<int>(std::distance(
        b.outcomes.begin(),
        std::lower_bound(b.outcomes.begin(), b.outcomes.end(), k)));
    b.effects[pos] += a.effects[j];
  }
  return b;
}

namespace detail {

// Effects normalized to unit trace; callers guarantee tr > 0.
inline ComplexMatrix trace_normalized(const ComplexMatrix& e) {
  return e / e.trace().real();
}

// Proportionality test used for sufficiency: two nonzero PSD effects are
// positive multiples iff their trace-normalized forms coincide.
inline bool proportional(const ComplexMatrix& a, const ComplexMatrix& b,
                         double tol) {
  return (trace_normalized(a) - trace_normalized(b)).norm() <= tol;
}

}  // namespace detail

/// Result of merging an observable down to minimally sufficient form.
/// `map` sends each kept outcome of the input to the label of its class;
/// outcomes whose effects vanish are dropped and absent from the map.
struct Reduction {
  Povm reduced;
  Relabeling map;
};

/// Merges outcomes whose effects are positive multiples of one another and
/// drops vanishing effects (tr <= tol). Each class is labeled by its
/// smallest member.
inline Reduction minimal_sufficient_reduction(const Povm& a,
                                              double tol = kDefaultTol) {
  std::vector<int> kept;
  for (int j = 0; j < a.n_outcomes(); ++j) {
    if (a.effects[j].trace().real() > tol) kept.push_back(j);
  }
  if (kept.empty()) {
    throw NotNormalized("minimal_sufficient_reduction: all effects vanish");
  }
  // Union-find over kept indices; proportional effects share a class.
  std::vector<int> parent(kept.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      if (detail::proportional(a.effects[kept[i]], a.effects[kept[j]], tol)) {
        parent[find(static_cast<int>(j))] = find(static_cast<int>(i));
      }
    }
  }
  // Class label: smallest outcome label among members.
  std::map<int, int> class_label;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    int root = find(static_cast<int>(i));
    int outcome = a.outcomes[kept[i]];
    auto it = class_label.find(root);
    if (it == class_label.end() || outcome < it->second) {
      class_label[root] = outcome;
    }
  }
  Reduction out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    out.map.map[a.outcomes[kept[i]]] = class_label[find(static_cast<int>(i))];
  }
  std::set<int> labels;
  for (const auto& kv : class_label) labels.insert(kv.second);
  out.reduced.dim = a.dim;
  out.reduced.outcomes.assign(labels.begin(), labels.end());
  out.reduced.effects.assign(out.reduced.outcomes.size(),
                             ComplexMatrix::Zero(a.dim, a.dim));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    int target = out.map.map.at(a.outcomes[kept[i]]);
    int pos = static_cast<int>(std::distance(
        out.reduced.outcomes.begin(),
        std::lower_bound(out.reduced.outcomes.begin(),
                         out.reduced.outcomes.end(), target)));
    out.reduced.effects[pos] += a.effects[kept[i]];
  }
  return out;
}

/// True iff no effect vanishes and no two distinct effects are positive
/// multiples of each other.
inline bool is_minimally_sufficient(const Povm& a, double tol = kDefaultTol) {
  for (int j = 0; j < a.n_outcomes(); ++j) {
    if (a.effects[j].trace().real() <= tol) return false;
  }
  for (int i = 0; i < a.n_outcomes(); ++i) {
    for (int j = i + 1; j < a.n_outcomes(); ++j) {
      if (detail::proportional(a.effects[i], a.effects[j], tol)) return false;
    }
  }
  return true;
}

/// Convex mixture t*A + (1-t)*B of observables with identical outcome sets.
inline Povm mix(const Povm& a, const Povm& b, double t) {
  if (a.dim != b.dim) {
    throw DimensionMismatch("mix: observables act on different spaces");
  }
  if (a.outcomes != b.outcomes) {
    throw OutcomeMismatch("mix: observables have different outcome sets");
  }
  if (t < 0.0 || t > 1.0) {
    throw std::invalid_argument("mix: weight must lie in [0, 1]");
  }
  Povm c;
  c.dim = a.dim;
  c.outcomes = a.outcomes;
  c.effects.reserve(a.effects.size());
  for (int j = 0; j < a.n_outcomes(); ++j) {
    c.effects.push_back(t * a.effects[j] + (1.0 - t) * b.effects[j]);
  }
  return c;
}

/// True iff every effect is a multiple of the identity (a coin flip that
/// ignores the state).
inline bool is_trivial(const Povm& a, double tol = kDefaultTol) {
  for (int j = 0; j < a.n_outcomes(); ++j) {
    double weight = a.effects[j].trace().real() / a.dim;
    if ((a.effects[j] - weight * identity(a.dim)).norm() > tol) return false;
  }
  return true;
}

/// Checks shapes and total trace preservation of an instrument.
inline void require_instrument(const Instrument& ins,
                               double tol = kDefaultTol) {
  if (ins.outcomes.size() != ins.operations.size()) {
    throw OutcomeMismatch("instrument: outcome/operation count mismatch");
  }
  ComplexMatrix total = ComplexMatrix::Zero(ins.in_dim, ins.in_dim);
  for (const auto& ops : ins.operations) {
    for (const ComplexMatrix& k : ops) {
      if (k.rows() != ins.out_dim || k.cols() != ins.in_dim) {
        throw DimensionMismatch("instrument: Kraus operator shape mismatch");
      }
      total += k.adjoint() * k;
    }
  }
  double deficit = (total - identity(ins.in_dim)).norm();
  if (deficit > tol * std::sqrt(static_cast<double>(ins.in_dim))) {
    std::ostringstream os;
    os << "instrument: operations are not trace preserving, deficit "
       << deficit;
    throw NotNormalized(os.str());
  }
}

/// Unnormalized post-measurement state for one outcome,
/// sum_n K_{j,n} rho K_{j,n}'.
inline ComplexMatrix apply_outcome(const Instrument& ins, int index,
                                   const ComplexMatrix& rho) {
  ComplexMatrix out = ComplexMatrix::Zero(ins.out_dim, ins.out_dim);
  for (const ComplexMatrix& k : ins.operations.at(index)) {
    out += k * rho * k.adjoint();
  }
  return out;
}

/// Outcome probabilities of an instrument, tr[sum_n K_{j,n} rho K_{j,n}'].
inline RealVector outcome_distribution(const Instrument& ins,
                                       const DensityMatrix& rho) {
  if (ins.in_dim != rho.dim) {
    throw DimensionMismatch("outcome_distribution: instrument and state act on different spaces");
  }
  RealVector p(ins.n_outcomes());
  for (int j = 0; j < ins.n_outcomes(); ++j) {
    p(j) = apply_outcome(ins, j, rho.matrix).trace().real();
  }
  return p;
}

/// The square-root instrument of an observable: outcome j acts as
/// rho -> sqrt(A(j)) rho sqrt(A(j)).
inline Instrument luders_instrument(const Povm& a) {
  Instrument ins;
  ins.in_dim = a.dim;
  ins.out_dim = a.dim;
  ins.outcomes = a.outcomes;
  ins.operations.reserve(a.effects.size());
  for (const ComplexMatrix& e : a.effects) {
    ins.operations.push_back({psd_sqrt(e)});
  }
  return ins;
}

}  // namespace povmforge
