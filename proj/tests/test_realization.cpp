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

// Least squares fit of the channel mapping L rho L' to Lp rho Lp' over a
// full operator basis; returns it in Kraus form via its Choi matrix.
Channel fit_block_channel(const ComplexMatrix& l, const ComplexMatrix& lp) {
  const int d = static_cast<int>(l.cols());
  const int r = static_cast<int>(l.rows());
  ComplexMatrix mx(d * d, r * r), my(d * d, r * r);
  int row = 0;
  for (int p = 0; p < d; ++p) {
    for (int q = 0; q < d; ++q) {
      ComplexMatrix e = matrix_unit(d, p, q);
      ComplexMatrix x = l * e * l.adjoint();
      ComplexMatrix y = lp * e * lp.adjoint();
      mx.row(row) = Eigen::Map<ComplexVector>(x.data(), r * r).transpose();
      my.row(row) = Eigen::Map<ComplexVector>(y.data(), r * r).transpose();
      ++row;
    }
  }
  Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(mx);
  ComplexMatrix st = cod.solve(my);  // vec(Y) = S vec(X), st = S^T
  ComplexMatrix choi = ComplexMatrix::Zero(r * r, r * r);
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      ComplexVector ve = ComplexVector::Zero(r * r);
      ve(b * r + a) = 1.0;  // vec of matrix_unit(r, a, b), column major
      ComplexVector image = st.transpose() * ve;
      choi.block(a * r, b * r, r, r) =
          Eigen::Map<ComplexMatrix>(image.data(), r, r);
    }
  }
  return channel_from_choi(choi, r, r);
}

}  // namespace

TEST_CASE("choi matrix round trips through kraus extraction") {
  Rng rng(71);
  Channel lambda = random_channel(3, 2, 3, rng);
  ComplexMatrix choi = choi_matrix(lambda);
  REQUIRE(is_psd(choi));
  // Trace preservation shows up as a partial trace condition.
  REQUIRE((partial_trace_second(choi, 3, 2) - identity(3)).norm() < 1e-10);
  Channel rebuilt = channel_from_choi(choi, 3, 2);
  REQUIRE(channel_distance(rebuilt, lambda) < 1e-9);
}

TEST_CASE("channel_from_choi renormalizes slightly off inputs") {
  Rng rng(73);
  Channel lambda = random_channel(2, 2, 2, rng);
  ComplexMatrix choi = (1.0 + 1e-9) * choi_matrix(lambda);
  Channel rebuilt = channel_from_choi(choi, 2, 2);
  REQUIRE_NOTHROW(make_channel(rebuilt.kraus));
}

TEST_CASE("planted channel realizations are recovered") {
  Rng rng(79);
  for (int trial = 0; trial < 5; ++trial) {
    Povm a = random_povm(2, 2, rng);
    LeastDisturbing ld = least_disturbing(a);
    Channel gamma_true = random_channel(ld.dilation.dil_dim, 2, 2, rng);
    Channel target = compose(gamma_true, ld.channel);

    ChannelRealization r = realize_channel_after(a, target);
    REQUIRE(r.channel.has_value());
    REQUIRE(r.details.residual <= kCertTol);
    REQUIRE(channel_distance(compose(*r.channel, ld.channel), target) < 1e-5);

    // The sound oracle never contradicts a feasible instance.
    REQUIRE_FALSE(refute_channel_realization(ld.channel, target).has_value());
  }
}

TEST_CASE("information gain forces disturbance") {
  Povm a = th::sharp_z();
  Channel id = identity_channel(2);
  ChannelRealization r = realize_channel_after(a, id);
  REQUIRE_FALSE(r.channel.has_value());
  REQUIRE(r.details.status == FeasibilityStatus::budget_exhausted);
  // Not even a non-PSD Choi block satisfies the affine system.
  REQUIRE(r.details.affine_floor > kCertTol);

  auto witness =
      refute_channel_realization(least_disturbing(a).channel, id);
  REQUIRE(witness.has_value());
  REQUIRE(witness->target_distance > witness->base_distance + 1e-6);
}

TEST_CASE("planted observable realizations are recovered block locally") {
  Rng rng(83);
  for (int trial = 0; trial < 5; ++trial) {
    Povm a = random_povm(2, 2, rng);
    LeastDisturbing ld = least_disturbing(a);
    const int m = 3;

    // Plant a block diagonal observable on the dilation space.
    std::vector<ComplexMatrix> planted(m, ComplexMatrix::Zero(
        ld.dilation.dil_dim, ld.dilation.dil_dim));
    for (const auto& [outcome, range] : ld.dilation.block_index) {
      auto [offset, size] = range;
      if (size == 0) continue;
      Povm block = random_povm(size, m, rng);
      for (int k = 0; k < m; ++k) {
        planted[k].block(offset, offset, size, size) = block.effects[k];
      }
    }
    Povm b;
    b.dim = a.dim;
    for (int k = 0; k < m; ++k) {
      b.outcomes.push_back(k);
      b.effects.push_back(dual_apply(ld.channel, planted[k]));
    }
    b = validate_povm(b.outcomes, b.effects);

    ObservableRealization r = realize_observable_after(a, b);
    REQUIRE(r.observable.has_value());
    REQUIRE(r.used_block_reduction);
    ComplexMatrix sum = ComplexMatrix::Zero(ld.dilation.dil_dim,
                                            ld.dilation.dil_dim);
    for (int k = 0; k < m; ++k) {
      REQUIRE((dual_apply(ld.channel, r.observable->effect(k)) -
               b.effects[k]).norm() < 1e-5);
      sum += r.observable->effect(k);
    }
    REQUIRE((sum - identity(ld.dilation.dil_dim)).norm() < 1e-6);
  }
}

TEST_CASE("measuring the dilation pvm realizes the observable itself") {
  Povm a = th::trine();
  LeastDisturbing ld = least_disturbing(a);
  for (int j = 0; j < a.n_outcomes(); ++j) {
    REQUIRE((dual_apply(ld.channel, ld.dilation.pvm.effect(j)) -
             a.effects[j]).norm() < 1e-12);
  }
  ObservableRealization r = realize_observable_after(a, a);
  REQUIRE(r.observable.has_value());
}

TEST_CASE("equivalence of least disturbing channels of equivalent POVMs") {
  Rng rng(89);
  Povm a = random_povm(2, 3, rng, {1, 1, 1});
  Povm b = th::shuffle_outcomes(th::split_outcomes(a, 2, rng), rng);
  Channel la = least_disturbing(a).channel;
  Channel lb = least_disturbing(b).channel;
  EquivalenceCertification cert = certify_equivalence(la, lb);
  REQUIRE(cert.certified());
  REQUIRE(channel_distance(compose(*cert.forward.channel, la), lb) < 1e-5);
  REQUIRE(channel_distance(compose(*cert.backward.channel, lb), la) < 1e-5);
}

TEST_CASE("sequential joint observables on reference instances") {
  SECTION("repeated sharp measurement is diagonal") {
    Instrument ins = luders_instrument(th::sharp_z());
    JointObservable g = sequential_joint(ins, th::sharp_z());
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        ComplexMatrix expected = i == j
            ? ComplexMatrix(th::sharp_z().effects[i])
            : ComplexMatrix(ComplexMatrix::Zero(2, 2));
        REQUIRE((g.effect(i, j) - expected).norm() < 1e-12);
      }
    }
    auto [first, second] = margins(g);
    REQUIRE((first.effect(0) - th::sharp_z().effect(0)).norm() < 1e-12);
    REQUIRE((second.effect(1) - th::sharp_z().effect(1)).norm() < 1e-12);
  }

  SECTION("trivial follow-up reproduces the first margin") {
    Povm a = th::trine();
    LeastDisturbing ld = least_disturbing(a);
    Povm trivial;
    trivial.dim = ld.dilation.dil_dim;
    trivial.outcomes = {0};
    trivial.effects = {identity(ld.dilation.dil_dim)};
    JointObservable g = sequential_joint(ld.instrument, trivial);
    for (int i = 0; i < 3; ++i) {
      REQUIRE((g.effect(i, 0) - a.effects[i]).norm() < 1e-10);
    }
  }

  SECTION("dilation pvm after the least disturbing instrument is diagonal") {
    Povm a = th::trine();
    LeastDisturbing ld = least_disturbing(a);
    JointObservable g = sequential_joint(ld.instrument, ld.dilation.pvm);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        ComplexMatrix expected = i == j
            ? ComplexMatrix(a.effects[i])
            : ComplexMatrix(ComplexMatrix::Zero(2, 2));
        REQUIRE((g.effect(i, j) - expected).norm() < 1e-10);
      }
    }
    auto [first, second] = margins(g);
    for (int i = 0; i < 3; ++i) {
      REQUIRE((first.effect(i) - a.effects[i]).norm() < 1e-10);
      REQUIRE((second.effect(i) - a.effects[i]).norm() < 1e-10);
    }
  }
}

TEST_CASE("per block channels between equivalent models are identity like") {
  Rng rng(97);
  Povm a = random_povm(2, 3, rng);  // full rank blocks of size 2
  Relabeling f;
  f.map = {{0, 2}, {1, 0}, {2, 1}};
  Povm b = relabel(a, f);
  NaimarkDilation da = minimal_naimark(a);
  NaimarkDilation db = minimal_naimark(b);

  for (int j = 0; j < a.n_outcomes(); ++j) {
    int label = a.outcomes[j];
    auto [off_a, size_a] = da.block_index.at(label);
    auto [off_b, size_b] = db.block_index.at(f.map.at(label));
    REQUIRE(size_a == size_b);
    if (size_a == 0) continue;
    ComplexMatrix l = da.isometry.middleRows(off_a, size_a);
    ComplexMatrix lp = db.isometry.middleRows(off_b, size_b);
    Channel gamma = fit_block_channel(l, lp);
    auto cert = is_identity_equivalent(gamma);
    REQUIRE(cert.has_value());
    Channel reversal = inverse_from_certificate(*cert);
    REQUIRE(channel_distance(compose(reversal, gamma),
                             identity_channel(size_a)) < 1e-8);
  }
}
