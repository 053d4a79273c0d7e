// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#include "polyaniso/pann.hpp"

#include <gtest/gtest.h>

#include <cstring>

#include "polyaniso/io.hpp"
#include "test_util.hpp"

namespace polyaniso {
namespace {

using testing::expect_near_mat;
using testing::random_F;
using testing::rel_err;

const PreferredFrame kStd = PreferredFrame::standard();
const std::vector<Variant> kVariants = {Variant::I, Variant::Istar, Variant::C, Variant::Cstar};

PannModel zeroed(PannModel m) {
  m.net.reparametrize = false;  // raw weights are the effective weights
  std::fill(m.net.raw.begin(), m.net.raw.end(), 0.0);
  m.norm = compute_normalization(m);
  return m;
}

TEST(Growth, ClosedFormValues) {
  EXPECT_EQ(growth(1.0, 2.5), 0.0);
  EXPECT_EQ(growth_dJ(1.0, 2.5), 0.0);
  EXPECT_NEAR(growth(2.0, 1.0), 0.25, 1e-15);
  // (0.01 + 100 - 2)^2 = 98.01^2
  EXPECT_NEAR(growth(0.01, 1.0), 98.01 * 98.01, 1e-9);
  EXPECT_THROW(growth(-1.0, 1.0), NonPositiveJacobian);
  EXPECT_THROW(growth_dJ(0.0, 1.0), NonPositiveJacobian);
}

TEST(Build, ParameterCountsMatchBenchmarks) {
  EXPECT_EQ(build(Variant::I, GroupId::Cub, kStd, {}, 1).net.spec.param_count(), 464);
  EXPECT_EQ(build(Variant::Istar, GroupId::Cub, kStd, {}, 1).net.spec.param_count(), 448);
  EXPECT_EQ(build(Variant::C, GroupId::Cub, kStd, {}, 1).net.spec.param_count(), 272);
  EXPECT_EQ(build(Variant::Cstar, GroupId::Cub, kStd, {}, 1).net.spec.param_count(), 208);
}

TEST(Build, TetragonalPolyconvexModelBuilds) {
  const PannModel m = build(Variant::I, GroupId::Tet, kStd, {}, 5);
  EXPECT_EQ(m.net.spec.input_width, 9);
  EXPECT_LE(max_abs(stress(m, Mat3::identity())), 1e-8);
}

TEST(Build, TriclinicStructuralVariantRejected) {
  EXPECT_THROW(build(Variant::I, GroupId::Tri, kStd, {}, 1), UnsupportedGroup);
}

TEST(Normalization, ZeroNetworkHasZeroConstants) {
  const PannModel mc = zeroed(build(Variant::C, GroupId::Cub, kStd, {}, 2));
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(mc.norm.p[i], 0.0);
    EXPECT_EQ(mc.norm.q[i], 0.0);
  }
  EXPECT_EQ(mc.norm.r, 0.0);
  const PannModel mi = zeroed(build(Variant::I, GroupId::Cub, kStd, {}, 2));
  for (double c : mi.norm.slot_coef) EXPECT_EQ(c, 0.0);
}

TEST(Normalization, StressVanishesAtIdentityForAllVariants) {
  Rng rng(3);
  for (Variant v : kVariants) {
    for (int s = 0; s < 25; ++s) {
      const PannModel m = build(v, GroupId::Cub, kStd, {}, rng.next_u64());
      EXPECT_LE(max_abs(stress(m, Mat3::identity())), 1e-8) << to_string(v);
    }
  }
  // variant I across every group with a polyconvex basis
  for (GroupId g : {GroupId::Iso, GroupId::Ti, GroupId::Mon, GroupId::Rho, GroupId::Tet}) {
    for (int s = 0; s < 10; ++s) {
      const PannModel m = build(Variant::I, g, kStd, {}, rng.next_u64());
      EXPECT_LE(max_abs(stress(m, Mat3::identity())), 1e-8) << "variant I " << to_string(g);
    }
  }
  // the unconstrained variant across groups exercises the projection recipe
  for (GroupId g : {GroupId::Iso, GroupId::Ti, GroupId::Mon, GroupId::Rho, GroupId::Tet,
                    GroupId::Tri}) {
    const PannModel m = build(Variant::Istar, g, kStd, {}, rng.next_u64());
    EXPECT_LE(max_abs(stress(m, Mat3::identity())), 1e-8) << "variant Istar " << to_string(g);
  }
}

TEST(Potential, ZeroNetworkIsGrowthOnly) {
  PannModel m = zeroed(build(Variant::C, GroupId::Cub, kStd, {}, 2));
  m.alpha = 1.0;
  const Mat3 F = Mat3::diag(1.1, 0.9, 1.0);
  const double J = 0.99;
  const double expected = std::pow(J + 1.0 / J - 2.0, 2);  // 1.0203...e-8
  EXPECT_NEAR(potential(m, F), expected, 1e-20);
  EXPECT_NEAR(expected, 1.0203040506070809e-08, 1e-18);
}

TEST(Potential, SymmetrizedSlotAveragesAxisProjections) {
  // the Reynolds average of the first chat slot over the cubic set is the
  // mean of the axis diagonal entries
  Rng rng(7);
  const RotationSet rs = group_elements(GroupId::Cub, kStd);
  for (int s = 0; s < 20; ++s) {
    const KinematicBundle kb = bundle(random_F(rng));
    double avg = 0;
    for (const Mat3& Q : rs.elements)
      avg += slots::eval_chat_slate(kb.C, kb.G, kb.J, kStd, Q).value[0];
    avg /= 24.0;
    EXPECT_NEAR(avg, trace(kb.C) / 3.0, 1e-12);
  }
}

TEST(Potential, FiniteAtIdentity) {
  Rng rng(11);
  for (Variant v : kVariants) {
    const PannModel m = build(v, GroupId::Cub, kStd, {}, rng.next_u64());
    EXPECT_TRUE(std::isfinite(potential(m, Mat3::identity())));
  }
}

TEST(Stress, MatchesCentralFiniteDifferencesOfPotential) {
  Rng rng(13);
  for (Variant v : kVariants) {
    const PannModel m = build(v, GroupId::Cub, kStd, {}, rng.next_u64());
    for (int s = 0; s < 10; ++s) {
      const Mat3 F = random_F(rng);
      const Mat3 pa = stress(m, F);
      const double h = 1e-5 * (1.0 + frobenius_norm(F));
      Mat3 pf;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          Mat3 fp = F, fm = F;
          fp(i, j) += h;
          fm(i, j) -= h;
          pf(i, j) = (potential(m, fp) - potential(m, fm)) / (2 * h);
        }
      EXPECT_LE(frobenius_norm(pa - pf) / std::max(1.0, frobenius_norm(pf)), 1e-6)
          << to_string(v);
    }
  }
}

TEST(Symmetry, PotentialInvariantUnderCubicGroup) {
  Rng rng(17);
  const RotationSet rs = group_elements(GroupId::Cub, kStd);
  for (Variant v : kVariants) {
    const PannModel m = build(v, GroupId::Cub, kStd, {}, rng.next_u64());
    for (int s = 0; s < 10; ++s) {
      const Mat3 F = random_F(rng);
      const double w0 = potential(m, F);
      for (const Mat3& Q : rs.elements) {
        const double w1 = potential(m, F * transpose(Q));
        EXPECT_LE(std::abs(w1 - w0) / std::max(1.0, std::abs(w0)), 1e-10) << to_string(v);
      }
    }
  }
}

TEST(Symmetry, ObjectivityUnderRandomRotations) {
  Rng rng(19);
  for (Variant v : kVariants) {
    const PannModel m = build(v, GroupId::Cub, kStd, {}, rng.next_u64());
    for (int s = 0; s < 100; ++s) {
      const Mat3 F = random_F(rng);
      // random rotation via Rodrigues
      Vec3 u{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const double n = norm(u);
      u = (1.0 / (n > 1e-6 ? n : 1.0)) * u;
      const double th = rng.uniform(0.0, 2 * M_PI);
      Mat3 w = Mat3::zero();
      w(0, 1) = -u[2];
      w(0, 2) = u[1];
      w(1, 0) = u[2];
      w(1, 2) = -u[0];
      w(2, 0) = -u[1];
      w(2, 1) = u[0];
      const Mat3 R = std::cos(th) * Mat3::identity() + std::sin(th) * w +
                     (1 - std::cos(th)) * outer(u, u);
      EXPECT_LE(rel_err(potential(m, R * F), potential(m, F)), 1e-10) << to_string(v);
    }
  }
}

TEST(Stress, PushforwardSymmetry) {
  Rng rng(23);
  const RotationSet rs = group_elements(GroupId::Cub, kStd);
  const PannModel m = build(Variant::I, GroupId::Cub, kStd, {}, 77);
  for (int s = 0; s < 10; ++s) {
    const Mat3 F = random_F(rng);
    const Mat3 p0 = stress(m, F);
    for (const Mat3& Q : rs.elements) {
      const Mat3 p1 = stress(m, F * transpose(Q)) * Q;
      EXPECT_LE(max_abs(p1 - p0) / std::max(1.0, max_abs(p0)), 1e-10);
    }
  }
}

TEST(Tangent, PairSymmetry) {
  Rng rng(29);
  for (Variant v : {Variant::I, Variant::C}) {
    const PannModel m = build(v, GroupId::Cub, kStd, {}, rng.next_u64());
    const Mat3 F = random_F(rng);
    const Tensor4 a = tangent(m, F);
    const double scale = std::max(1.0, max_abs(a));
    for (int i = 0; i < 3; ++i)
      for (int p = 0; p < 3; ++p)
        for (int j = 0; j < 3; ++j)
          for (int q = 0; q < 3; ++q)
            EXPECT_NEAR(a(i, p, j, q), a(j, q, i, p), 1e-8 * scale);
  }
}

// The identities the symmetrized normalization construction rests on.
TEST(Normalization, ProjectionIdentitiesAtIdentity) {
  Rng rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    Vec3 u{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    u = (1.0 / norm(u)) * u;
    const Mat3 A = outer(u, u);
    const double h = 1e-7;
    Mat3 dCA, dGA, dJ;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Mat3 fp = Mat3::identity(), fm = Mat3::identity();
        fp(i, j) += h;
        fm(i, j) -= h;
        const KinematicBundle kp = bundle(fp), km = bundle(fm);
        dCA(i, j) = (ddot(kp.C, A) - ddot(km.C, A)) / (2 * h);
        dGA(i, j) = (ddot(kp.G, A) - ddot(km.G, A)) / (2 * h);
        dJ(i, j) = (kp.J - km.J) / (2 * h);
      }
    expect_near_mat(dCA, 2.0 * A, 1e-8, "d(C:A)/dF at I");
    expect_near_mat(dGA, 2.0 * (trace(A) * Mat3::identity() - A), 1e-8, "d(G:A)/dF at I");
    expect_near_mat(dJ, Mat3::identity(), 1e-8, "dJ/dF at I");
  }
}

TEST(GrowthTrend, DominatesForZeroNetworkAndLargeAlpha) {
  // zero network at the default alpha: the potential is exactly the growth term
  PannModel m0 = zeroed(build(Variant::C, GroupId::Cub, kStd, {}, 3));
  const double w1 = potential(m0, Mat3::identity());
  for (double J : {1e-2, 1e-3}) {
    const double s = std::cbrt(J);
    const double t = J + 1.0 / J - 2.0;
    EXPECT_GE(potential(m0, Mat3::diag(s, s, s)) - w1, 0.5 * m0.alpha * t * t);
  }
  // random networks with the growth term scaled up
  Rng rng(37);
  for (Variant v : kVariants) {
    PannModel m = build(v, GroupId::Cub, kStd, {}, rng.next_u64(), /*alpha=*/1.0);
    const double wi = potential(m, Mat3::identity());
    for (double J : {1e-2, 1e-3}) {
      const double s = std::cbrt(J);
      const double t = J + 1.0 / J - 2.0;
      EXPECT_GE(potential(m, Mat3::diag(s, s, s)) - wi, 0.5 * m.alpha * t * t) << to_string(v);
    }
  }
}

TEST(Serialization, ModelRoundTripIsBitExact) {
  Rng rng(41);
  for (Variant v : kVariants) {
    const PannModel m = build(v, GroupId::Cub, kStd, {}, rng.next_u64());
    const std::string text = model_to_json(m).dump();
    const PannModel q = model_from_json(json::parse(text));
    ASSERT_EQ(m.net.raw.size(), q.net.raw.size());
    EXPECT_EQ(std::memcmp(m.net.raw.data(), q.net.raw.data(), m.net.raw.size() * sizeof(double)),
              0);
    EXPECT_EQ(model_to_json(q).dump(), text);
    // normalization recomputed on load
    EXPECT_LE(max_abs(stress(q, Mat3::identity())), 1e-8);
  }
}

}  // namespace
}  // namespace polyaniso
