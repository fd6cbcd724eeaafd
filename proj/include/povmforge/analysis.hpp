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
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "povmforge/dilation.hpp"
#include "povmforge/errors.hpp"
#include "povmforge/matrix.hpp"
#include "povmforge/observables.hpp"

namespace povmforge {

/// Classical post-processing kernel p(k|j): rows indexed by the target
/// outcome set, columns by the source outcome set; every column is a
/// probability distribution.
struct StochasticMatrix {
  RealMatrix p;
};

/// Checks simplex constraints (entries >= -tol, column sums within tol of 1).
inline StochasticMatrix make_stochastic(RealMatrix p,
                                        double tol = kDefaultTol) {
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < p.rows(); ++k) {
      if (p(k, j) < -tol) {
        throw NotNormalized("stochastic matrix: negative entry");
      }
      sum += p(k, j);
    }
    if (std::abs(sum - 1.0) > tol) {
      throw NotNormalized("stochastic matrix: column does not sum to 1");
    }
  }
  return StochasticMatrix{std::move(p)};
}

enum class Relation { below, above, equivalent, incomparable, undecided };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::below: return "below";
    case Relation::above: return "above";
    case Relation::equivalent: return "equivalent";
    case Relation::incomparable: return "incomparable";
    case Relation::undecided: return "undecided";
  }
  return "undecided";
}

/// Outcome of the two-sided order decision between observables A and B.
///
/// `below` means A is a certified post-processing of B and the reverse
/// direction is refuted; `above` is the mirror image; `equivalent` has
/// certificates both ways; `incomparable` has refutations both ways.
/// Whenever a needed fact is missing (budget exhausted, no refutation)
/// the relation is `undecided`; the per-direction fields still report
/// everything that was established.
struct OrderVerdict {
  Relation relation = Relation::undecided;
  std::optional<StochasticMatrix> witness_a_from_b;  // q with A = B^q
  std::optional<StochasticMatrix> witness_b_from_a;  // p with B = A^p
  double residual_a_from_b = std::numeric_limits<double>::infinity();
  double residual_b_from_a = std::numeric_limits<double>::infinity();
  bool refuted_a_from_b = false;
  bool refuted_b_from_a = false;
};

struct OrderOptions {
  int budget = kDefaultBudget;
  double cert_tol = kCertTol;
  // Brute-force refutation over gridded stochastic matrices; sound but
  // exponential in outcome counts, so it is opt-in and desk scale only.
  bool use_grid_oracle = false;
  int grid_resolution = 8;
};

/// Worst-case defining-equation violation of a candidate kernel,
/// max_k || B(k) - sum_j p(k|j) A(j) ||_F.
inline double post_processing_residual(const Povm& b, const Povm& a,
                                       const StochasticMatrix& p) {
  if (a.dim != b.dim) {
    throw DimensionMismatch("post_processing_residual: observables act on different spaces");
  }
  if (p.p.rows() != b.n_outcomes() || p.p.cols() != a.n_outcomes()) {
    throw OutcomeMismatch("post_processing_residual: kernel shape does not match outcome sets");
  }
  double worst = 0.0;
  for (int k = 0; k < b.n_outcomes(); ++k) {
    ComplexMatrix acc = ComplexMatrix::Zero(a.dim, a.dim);
    for (int j = 0; j < a.n_outcomes(); ++j) {
      acc += p.p(k, j) * a.effects[j];
    }
    worst = std::max(worst, (b.effects[k] - acc).norm());
  }
  return worst;
}

namespace detail {

// Euclidean projection onto the probability simplex {x >= 0, sum x = 1}.
inline RealVector simplex_project(const RealVector& v) {
  const Eigen::Index m = v.size();
  std::vector<double> u(v.data(), v.data() + m);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double running = 0.0;
  double tau = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    running += u[k];
    double candidate = (1.0 - running) / static_cast<double>(k + 1);
    if (u[k] + candidate > 0.0) tau = candidate;
  }
  RealVector x(m);
  for (Eigen::Index k = 0; k < m; ++k) x(k) = std::max(0.0, v(k) + tau);
  return x;
}

// Rich search result; the public API narrows it to an optional witness.
struct PostProcessingSearch {
  std::optional<StochasticMatrix> witness;
  double residual = std::numeric_limits<double>::infinity();
  // Best possible residual ignoring the simplex constraints; if this
  // exceeds cert_tol no kernel exists at all (sound refutation).
  double affine_floor = 0.0;
  int iterations = 0;
};

// Alternating projections between the product of per-column simplices and
// the affine set {P : sum_j p(k|j) A(j) = B(k)}, seeded with the
// least-squares kernel. The affine step decomposes row by row and reuses
// one orthogonal decomposition of the effect matrix.
inline PostProcessingSearch search_post_processing(const Povm& b,
                                                   const Povm& a,
                                                   const OrderOptions& opts) {
  if (a.dim != b.dim) {
    throw DimensionMismatch("find_post_processing: observables act on different spaces");
  }
  const int d = a.dim;
  const int n = a.n_outcomes();
  const int m = b.n_outcomes();
  RealMatrix ma(static_cast<Eigen::Index>(d) * d, n);
  for (int j = 0; j < n; ++j) ma.col(j) = herm_to_vec(a.effects[j]);
  RealMatrix targets(static_cast<Eigen::Index>(d) * d, m);
  for (int k = 0; k < m; ++k) targets.col(k) = herm_to_vec(b.effects[k]);
  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(ma);

  PostProcessingSearch out;
  // Least-squares seed, one row per target outcome.
  RealMatrix p(m, n);
  for (int k = 0; k < m; ++k) {
    RealVector row = cod.solve(targets.col(k));
    out.affine_floor = std::max(out.affine_floor,
                                (ma * row - targets.col(k)).norm());
    p.row(k) = row.transpose();
  }
  if (out.affine_floor > opts.cert_tol) {
    return out;  // provably infeasible, nothing to iterate on
  }
  auto clamp_to_simplices = [&](RealMatrix& x) {
    for (int j = 0; j < n; ++j) x.col(j) = simplex_project(x.col(j));
  };
  auto residual_of = [&](const RealMatrix& x) {
    double worst = 0.0;
    for (int k = 0; k < m; ++k) {
      worst = std::max(worst,
                       (ma * x.row(k).transpose() - targets.col(k)).norm());
    }
    return worst;
  };
  clamp_to_simplices(p);
  RealMatrix best = p;
  out.residual = residual_of(p);
  for (out.iterations = 0;
       out.iterations < opts.budget && out.residual > opts.cert_tol;
       ++out.iterations) {
    for (int k = 0; k < m; ++k) {
      RealVector violation = ma * p.row(k).transpose() - targets.col(k);
      p.row(k) -= cod.solve(violation).transpose();
    }
    clamp_to_simplices(p);
    double r = residual_of(p);
    if (r < out.residual) {
      out.residual = r;
      best = p;
    }
  }
  if (out.residual <= opts.cert_tol) {
    out.witness = make_stochastic(best, kDefaultTol);
  }
  return out;
}

}  // namespace detail

/// Searches for a stochastic kernel with B(k) = sum_j p(k|j) A(j) within
/// cert_tol; absent when the budget runs out (or the equations are
/// provably inconsistent).
inline std::optional<StochasticMatrix> find_post_processing(
    const Povm& b, const Povm& a, const OrderOptions& opts = {}) {
  return detail::search_post_processing(b, a, opts).witness;
}

/// Exact minimum of the defining-equation residual over all stochastic
/// kernels with entries on a grid of spacing 1/resolution.
inline double grid_min_post_processing_residual(const Povm& b, const Povm& a,
                                                int resolution) {
  if (a.dim != b.dim) {
    throw DimensionMismatch("grid oracle: observables act on different spaces");
  }
  const int d = a.dim;
  const int n = a.n_outcomes();
  const int m = b.n_outcomes();
  RealMatrix ma(static_cast<Eigen::Index>(d) * d, n);
  for (int j = 0; j < n; ++j) ma.col(j) = herm_to_vec(a.effects[j]);
  std::vector<RealVector> deficit(m);
  for (int k = 0; k < m; ++k) deficit[k] = herm_to_vec(b.effects[k]);

  // Per-column compositions of `resolution` into m parts.
  std::vector<RealVector> column_choices;
  RealVector counts = RealVector::Zero(m);
  std::function<void(int, int)> enumerate = [&](int k, int remaining) {
    if (k == m - 1) {
      counts(k) = remaining;
      column_choices.push_back(counts / static_cast<double>(resolution));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts(k) = c;
      enumerate(k + 1, remaining - c);
    }
  };
  enumerate(0, resolution);

  double best = std::numeric_limits<double>::infinity();
  std::function<void(int)> walk = [&](int j) {
    if (j == n) {
      double worst = 0.0;
      for (int k = 0; k < m; ++k) worst = std::max(worst, deficit[k].norm());
      best = std::min(best, worst);
      return;
    }
    for (const RealVector& choice : column_choices) {
      for (int k = 0; k < m; ++k) deficit[k] -= choice(k) * ma.col(j);
      walk(j + 1);
      for (int k = 0; k < m; ++k) deficit[k] += choice(k) * ma.col(j);
    }
  };
  walk(0);
  return best;
}

/// Sound brute-force refutation: true when even the best gridded kernel,
/// padded by the grid's Lipschitz slack, misses the target beyond cert_tol.
/// False means "no refutation", not feasibility.
inline bool grid_refutes_post_processing(const Povm& b, const Povm& a,
                                         int resolution,
                                         double cert_tol = kCertTol) {
  double slack = 0.0;
  for (const ComplexMatrix& e : a.effects) slack += e.norm();
  slack /= static_cast<double>(resolution);
  return grid_min_post_processing_residual(b, a, resolution) - slack >
         cert_tol;
}

/// Two-sided order decision. Runs the kernel search in both directions and
/// combines certificates and refutations into a relation; see OrderVerdict
/// for the exact semantics.
inline OrderVerdict compare(const Povm& a, const Povm& b,
                            const OrderOptions& opts = {}) {
  if (a.dim != b.dim) {
    throw DimensionMismatch("compare: observables act on different spaces");
  }
  detail::PostProcessingSearch ab = detail::search_post_processing(a, b, opts);
  detail::PostProcessingSearch ba = detail::search_post_processing(b, a, opts);
  OrderVerdict v;
  v.residual_a_from_b = ab.residual;
  v.residual_b_from_a = ba.residual;
  v.refuted_a_from_b = ab.affine_floor > opts.cert_tol;
  v.refuted_b_from_a = ba.affine_floor > opts.cert_tol;
  if (opts.use_grid_oracle) {
    if (!ab.witness && !v.refuted_a_from_b) {
      v.refuted_a_from_b =
          grid_refutes_post_processing(a, b, opts.grid_resolution, opts.cert_tol);
    }
    if (!ba.witness && !v.refuted_b_from_a) {
      v.refuted_b_from_a =
          grid_refutes_post_processing(b, a, opts.grid_resolution, opts.cert_tol);
    }
  }
  v.witness_a_from_b = std::move(ab.witness);
  v.witness_b_from_a = std::move(ba.witness);
  const bool found_ab = v.witness_a_from_b.has_value();
  const bool found_ba = v.witness_b_from_a.has_value();
  if (found_ab && found_ba) {
    v.relation = Relation::equivalent;
  } else if (found_ab && v.refuted_b_from_a) {
    v.relation = Relation::below;
  } else if (found_ba && v.refuted_a_from_b) {
    v.relation = Relation::above;
  } else if (v.refuted_a_from_b && v.refuted_b_from_a) {
    v.relation = Relation::incomparable;
  } else {
    v.relation = Relation::undecided;
  }
  return v;
}

/// Extremality in the convex set of observables with this outcome set:
/// A is extreme exactly when the dyads |d_{j,k}><d_{j,l}| built from the
/// spectral data of the minimal projective model are linearly independent.
inline bool is_extreme(const Povm& a, double tol = kEigTol) {
  NaimarkDilation d = minimal_naimark(a, tol);
  std::vector<ComplexMatrix> dyads;
  int expected = 0;
  for (int j = 0; j < a.n_outcomes(); ++j) {
    auto [offset, size] = d.block_index.at(a.outcomes[j]);
    expected += size * size;
    for (int k = 0; k < size; ++k) {
      for (int l = 0; l < size; ++l) {
        dyads.push_back(d.isometry.row(offset + k).adjoint() *
                        d.isometry.row(offset + l));
      }
    }
  }
  return gram_rank(dyads, tol) == expected;
}

/// Searches for a proper decomposition A = (A+ + A-)/2 driven by a real
/// linear dependence sum_j c_j A(j) = 0 among the effects, with
/// A±(j) = (1 ± c_j/c) A(j) and c = sum_j |c_j|.
///
/// Absence does NOT certify extremality: dependent effects are necessary
/// but not sufficient for a decomposition of this form. Use is_extreme for
/// the full criterion. Zero effects stay in the output so both halves keep
/// the input's outcome set and the midpoint identity is exact.
inline std::optional<std::pair<Povm, Povm>> extremality_counterexample(
    const Povm& a, double null_tol = 1e-9) {
  const int n = a.n_outcomes();
  // Zero effects always produce a spurious Gram kernel; a genuine
  // decomposition needs a dependence among the nonzero effects.
  std::vector<int> active;
  for (int j = 0; j < n; ++j) {
    if (a.effects[j].norm() > 1e-12) active.push_back(j);
  }
  const int na = static_cast<int>(active.size());
  RealMatrix gram(na, na);
  for (int i = 0; i < na; ++i) {
    for (int j = i; j < na; ++j) {
      double g = (a.effects[active[i]] * a.effects[active[j]]).trace().real();
      gram(i, j) = g;
      gram(j, i) = g;
    }
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(gram);
  double lambda_max = es.eigenvalues().maxCoeff();
  if (es.eigenvalues()(0) >= null_tol * std::max(1.0, lambda_max)) {
    return std::nullopt;
  }
  RealVector ca = es.eigenvectors().col(0);
  // Polish the kernel vector so sum_j c_j A(j) vanishes to machine
  // precision; the raw eigenvector can leave a sqrt(lambda_min) deficit.
  RealMatrix m(static_cast<Eigen::Index>(a.dim) * a.dim, na);
  for (int i = 0; i < na; ++i) m.col(i) = herm_to_vec(a.effects[active[i]]);
  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(m);
  ca -= cod.solve(m * ca);
  if (ca.norm() < 1e-6) return std::nullopt;
  ca /= ca.norm();
  RealVector c = RealVector::Zero(n);
  for (int i = 0; i < na; ++i) c(active[i]) = ca(i);
  for (int j = 0; j < n; ++j) {
    if (std::abs(c(j)) > 1e-12) {
      if (c(j) < 0.0) c = -c;
      break;
    }
  }
  double scale = c.cwiseAbs().sum();
  Povm plus, minus;
  plus.dim = minus.dim = a.dim;
  plus.outcomes = minus.outcomes = a.outcomes;
  for (int j = 0; j < n; ++j) {
    double w = c(j) / scale;
    plus.effects.push_back((1.0 + w) * a.effects[j]);
    minus.effects.push_back((1.0 - w) * a.effects[j]);
  }
  return std::make_pair(std::move(plus), std::move(minus));
}

}  // namespace povmforge
