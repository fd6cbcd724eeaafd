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
#include <optional>
#include <sstream>
#include <vector>

#include "povmforge/errors.hpp"
#include "povmforge/matrix.hpp"
#include "povmforge/observables.hpp"
#include "povmforge/random.hpp"

namespace povmforge {

/// A completely positive trace-preserving map in Kraus form,
/// rho -> sum_n K_n rho K_n' with sum_n K_n' K_n = I.
struct Channel {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<ComplexMatrix> kraus;
};

/// Checks Kraus shapes and trace preservation, then wraps into a Channel.
inline Channel make_channel(std::vector<ComplexMatrix> kraus,
                            double tol = kDefaultTol) {
  if (kraus.empty()) {
    throw DimensionMismatch("make_channel: empty Kraus list");
  }
  const int out = static_cast<int>(kraus.front().rows());
  const int in = static_cast<int>(kraus.front().cols());
  ComplexMatrix total = ComplexMatrix::Zero(in, in);
  for (const ComplexMatrix& k : kraus) {
    if (k.rows() != out || k.cols() != in) {
      throw DimensionMismatch("make_channel: Kraus operators have mixed shapes");
    }
    total += k.adjoint() * k;
  }
  double deficit = (total - identity(in)).norm();
  if (deficit > tol * std::sqrt(static_cast<double>(in))) {
    std::ostringstream os;
    os << "make_channel: trace preservation fails with deficit " << deficit;
    throw NotNormalized(os.str());
  }
  Channel c;
  c.in_dim = in;
  c.out_dim = out;
  c.kraus = std::move(kraus);
  return c;
}

inline Channel identity_channel(int dim) {
  Channel c;
  c.in_dim = dim;
  c.out_dim = dim;
  c.kraus = {identity(dim)};
  return c;
}

/// Linear action of the channel on an arbitrary matrix.
inline ComplexMatrix apply_matrix(const Channel& l, const ComplexMatrix& x) {
  if (x.rows() != l.in_dim || x.cols() != l.in_dim) {
    throw DimensionMismatch("apply: operand does not live on the input space");
  }
  ComplexMatrix out = ComplexMatrix::Zero(l.out_dim, l.out_dim);
  for (const ComplexMatrix& k : l.kraus) out += k * x * k.adjoint();
  return out;
}

/// State transformation rho -> sum_n K_n rho K_n'.
inline DensityMatrix apply(const Channel& l, const DensityMatrix& rho) {
  ComplexMatrix out = apply_matrix(l, rho.matrix);
  DensityMatrix result;
  result.dim = l.out_dim;
  result.matrix = 0.5 * (out + out.adjoint());
  return result;
}

/// Heisenberg-picture dual, B -> sum_n K_n' B K_n; satisfies
/// tr[rho * dual_apply(L, B)] = tr[apply(L, rho) * B].
inline ComplexMatrix dual_apply(const Channel& l, const ComplexMatrix& b) {
  if (b.rows() != l.out_dim || b.cols() != l.out_dim) {
    throw DimensionMismatch("dual_apply: operand does not live on the output space");
  }
  ComplexMatrix out = ComplexMatrix::Zero(l.in_dim, l.in_dim);
  for (const ComplexMatrix& k : l.kraus) out += k.adjoint() * b * k;
  return out;
}

/// Concatenation gamma after lambda: (gamma o lambda)(rho) = gamma(lambda(rho)).
inline Channel compose(const Channel& gamma, const Channel& lambda) {
  if (gamma.in_dim != lambda.out_dim) {
    throw DimensionMismatch("compose: inner dimensions disagree");
  }
  Channel c;
  c.in_dim = lambda.in_dim;
  c.out_dim = gamma.out_dim;
  c.kraus.reserve(gamma.kraus.size() * lambda.kraus.size());
  for (const ComplexMatrix& g : gamma.kraus) {
    for (const ComplexMatrix& k : lambda.kraus) {
      c.kraus.push_back(g * k);
    }
  }
  return c;
}

/// Largest deviation of two channels on the matrix-unit basis,
/// max_{a,b} ||L1(E_ab) - L2(E_ab)||_F. This is the canonical equality
/// test; Kraus sets are never compared directly.
inline double channel_distance(const Channel& l1, const Channel& l2) {
  if (l1.in_dim != l2.in_dim || l1.out_dim != l2.out_dim) {
    throw DimensionMismatch("channel_distance: channels have different shapes");
  }
  double worst = 0.0;
  for (int a = 0; a < l1.in_dim; ++a) {
    for (int b = 0; b < l1.in_dim; ++b) {
      ComplexMatrix e = matrix_unit(l1.in_dim, a, b);
      worst = std::max(worst, (apply_matrix(l1, e) - apply_matrix(l2, e)).norm());
    }
  }
  return worst;
}

/// An isometry V into out (x) env with Lambda(rho) = tr_env[V rho V'].
struct StinespringDilation {
  int env_dim = 0;
  ComplexMatrix isometry;
};

/// Canonical Stinespring form from the Kraus list: V phi = sum_n K_n phi (x) e_n.
inline StinespringDilation stinespring(const Channel& l) {
  const int n = static_cast<int>(l.kraus.size());
  StinespringDilation d;
  d.env_dim = n;
  d.isometry = ComplexMatrix::Zero(static_cast<Eigen::Index>(l.out_dim) * n,
                                   l.in_dim);
  for (int m = 0; m < n; ++m) {
    for (int i = 0; i < l.out_dim; ++i) {
      d.isometry.row(static_cast<Eigen::Index>(i) * n + m) += l.kraus[m].row(i);
    }
  }
  return d;
}

/// The conjugate channel: the environment's view of the Stinespring dilation,
/// Lambda^c(rho) = tr_out[V rho V'], with matrix elements
/// [Lambda^c(rho)]_{nm} = tr[K_m' K_n rho]. Output dimension is the number
/// of Kraus operators.
inline Channel conjugate_channel(const Channel& l) {
  const int n = static_cast<int>(l.kraus.size());
  // Kraus operators F_k of the conjugate: F_k[n, i] = K_n[k, i].
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(l.out_dim);
  for (int k = 0; k < l.out_dim; ++k) {
    ComplexMatrix f(n, l.in_dim);
    for (int m = 0; m < n; ++m) f.row(m) = l.kraus[m].row(k);
    kraus.push_back(std::move(f));
  }
  Channel c;
  c.in_dim = l.in_dim;
  c.out_dim = n;
  c.kraus = std::move(kraus);
  return c;
}

/// The unique smallest projection R on the output space with
/// dual_apply(L, R) = I: the projection onto the span of the union of the
/// Kraus column spaces.
inline ComplexMatrix support_projection(const Channel& l,
                                        double tol = kEigTol) {
  ComplexMatrix w = ComplexMatrix::Zero(l.out_dim, l.out_dim);
  for (const ComplexMatrix& k : l.kraus) w += k * k.adjoint();
  Eigensystem es = hermitian_eig(w, std::max(tol, kHermTol));
  double threshold = tol * std::max(1.0, es.eigenvalues(0));
  ComplexMatrix r = ComplexMatrix::Zero(l.out_dim, l.out_dim);
  for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
    if (es.eigenvalues(k) > threshold) {
      r += es.eigenvectors.col(k) * es.eigenvectors.col(k).adjoint();
    }
  }
  return r;
}

/// Witness that a channel is a probabilistic mixture of reversible
/// (isometric) branches: Lambda(rho) = sum_n p_n V_n rho V_n' with
/// V_n' V_m = delta_{nm} I.
struct IdentityEquivalenceCertificate {
  RealVector weights;
  std::vector<ComplexMatrix> isometries;
};

/// Rebuild the channel sum_n p_n V_n rho V_n' from its certificate.
inline Channel channel_from_certificate(
    const IdentityEquivalenceCertificate& cert) {
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(cert.isometries.size());
  for (Eigen::Index n = 0; n < cert.weights.size(); ++n) {
    kraus.push_back(std::sqrt(cert.weights(n)) * cert.isometries[n]);
  }
  return make_channel(std::move(kraus));
}

/// The reversal channel Gamma(tau) = sum_n V_n' tau V_n
///                                   + tr[(I - sum_n V_n V_n') tau] * I/d,
/// which satisfies Gamma o Lambda = id for the certified Lambda.
inline Channel inverse_from_certificate(
    const IdentityEquivalenceCertificate& cert) {
  if (cert.isometries.empty()) {
    throw DimensionMismatch("inverse_from_certificate: empty certificate");
  }
  const int in = static_cast<int>(cert.isometries.front().cols());
  const int out = static_cast<int>(cert.isometries.front().rows());
  std::vector<ComplexMatrix> kraus;
  ComplexMatrix range_sum = ComplexMatrix::Zero(out, out);
  for (const ComplexMatrix& v : cert.isometries) {
    kraus.push_back(v.adjoint());
    range_sum += v * v.adjoint();
  }
  // The ranges of the V_n are mutually orthogonal, so range_sum is a
  // projection; its complement Q feeds the depolarizing completion
  // tau -> tr[Q tau] * I/d with Kraus (1/sqrt(d)) |u_s><q_t|.
  ComplexMatrix q = identity(out) - range_sum;
  if (q.norm() > 1e-12 * out) {
    Eigensystem es = hermitian_eig(q, kDefaultTol);
    for (Eigen::Index t = 0; t < es.eigenvalues.size(); ++t) {
      if (es.eigenvalues(t) <= 0.5) continue;
      for (int s = 0; s < in; ++s) {
        ComplexMatrix k = ComplexMatrix::Zero(in, out);
        k.row(s) = es.eigenvectors.col(t).adjoint() /
                   std::sqrt(static_cast<double>(in));
        kraus.push_back(std::move(k));
      }
    }
  }
  return make_channel(std::move(kraus));
}

/// Tests whether the conjugate channel is constant on states (ignores its
/// input); exactly those channels admit a reversal Gamma with
/// Gamma o Lambda = id. On success the constant output sigma is spectrally
/// decomposed into weights and isometric branches.
inline std::optional<IdentityEquivalenceCertificate> is_identity_equivalent(
    const Channel& l, double swap_tol = kDefaultTol) {
  const int n = static_cast<int>(l.kraus.size());
  const int d = l.in_dim;
  // Gram family T_{nm} = K_m' K_n; the conjugate on a matrix unit E_ab has
  // entries [Lambda^c(E_ab)]_{nm} = T_{nm}[b, a].
  std::vector<ComplexMatrix> t(static_cast<std::size_t>(n) * n);
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      t[static_cast<std::size_t>(row) * n + col] =
          l.kraus[col].adjoint() * l.kraus[row];
    }
  }
  auto conj_on_unit = [&](int a, int b) {
    ComplexMatrix m(n, n);
    for (int row = 0; row < n; ++row) {
      for (int col = 0; col < n; ++col) {
        m(row, col) = t[static_cast<std::size_t>(row) * n + col](b, a);
      }
    }
    return m;
  };
  ComplexMatrix sigma = conj_on_unit(0, 0);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      ComplexMatrix expected = (a == b) ? sigma : ComplexMatrix::Zero(n, n);
      if ((conj_on_unit(a, b) - expected).norm() > swap_tol) {
        return std::nullopt;
      }
    }
  }
  // sigma is a state on the environment; its spectral decomposition yields
  // the branch weights and, through the Kraus list, the isometries.
  Eigensystem es = hermitian_eig(0.5 * (sigma + sigma.adjoint()), kDefaultTol);
  IdentityEquivalenceCertificate cert;
  std::vector<double> weights;
  for (Eigen::Index r = 0; r < es.eigenvalues.size(); ++r) {
    double p = es.eigenvalues(r);
    if (p <= 1e-12) continue;
    ComplexMatrix v = ComplexMatrix::Zero(l.out_dim, d);
    for (int m = 0; m < n; ++m) {
      v += std::conj(es.eigenvectors(m, r)) * l.kraus[m];
    }
    v /= std::sqrt(p);
    weights.push_back(p);
    cert.isometries.push_back(std::move(v));
  }
  cert.weights = Eigen::Map<RealVector>(weights.data(),
                                        static_cast<Eigen::Index>(weights.size()));
  // Defensive verification: certificates are only returned when they check
  // out at the same tolerance used for the membership test.
  const std::size_t kept = cert.isometries.size();
  for (std::size_t r = 0; r < kept; ++r) {
    for (std::size_t s = 0; s < kept; ++s) {
      ComplexMatrix expected =
          (r == s) ? identity(d) : ComplexMatrix::Zero(d, d);
      if ((cert.isometries[r].adjoint() * cert.isometries[s] - expected)
              .norm() > swap_tol * 10) {
        return std::nullopt;
      }
    }
  }
  if (channel_distance(channel_from_certificate(cert), l) > swap_tol * 10) {
    return std::nullopt;
  }
  return cert;
}

/// Gaussian random Kraus list whitened into a valid channel. Throws
/// SingularNormalizer when the raw normalizer has an eigenvalue below 1e-12.
inline Channel random_channel(int in_dim, int out_dim, int n_kraus, Rng& rng) {
  if (n_kraus < 1) {
    throw DimensionMismatch("random_channel: need at least one Kraus operator");
  }
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(n_kraus);
  ComplexMatrix s = ComplexMatrix::Zero(in_dim, in_dim);
  for (int n = 0; n < n_kraus; ++n) {
    kraus.push_back(random_gaussian_matrix(out_dim, in_dim, rng));
    s += kraus.back().adjoint() * kraus.back();
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s);
  if (es.eigenvalues().minCoeff() < 1e-12) {
    throw SingularNormalizer("random_channel: normalizer is numerically singular");
  }
  ComplexMatrix whiten = psd_inv_sqrt(s);
  for (ComplexMatrix& k : kraus) k = k * whiten;
  return make_channel(std::move(kraus));
}

inline Channel random_channel(int in_dim, int out_dim, int n_kraus,
                              std::uint64_t seed) {
  Rng rng(seed);
  return random_channel(in_dim, out_dim, n_kraus, rng);
}

/// Forget the outcome of an instrument: the total channel
/// rho -> sum_j sum_n K_{j,n} rho K_{j,n}'.
inline Channel total_channel(const Instrument& ins, double tol = kDefaultTol) {
  std::vector<ComplexMatrix> kraus;
  for (const auto& ops : ins.operations) {
    kraus.insert(kraus.end(), ops.begin(), ops.end());
  }
  return make_channel(std::move(kraus), tol);
}

}  // namespace povmforge
