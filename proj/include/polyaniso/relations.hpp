// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "polyaniso/invariants.hpp"
#include "polyaniso/rng.hpp"

namespace polyaniso {

// Both representation directions between the general and the polyconvex
// basis of each group, plus the machinery that machine-checks them on
// random SPD samples. Vector layouts match general_invariants and
// polyconvex_basis_from_C.

enum class RelationDirection { PolyFromGeneral, GeneralFromPoly };

inline std::string to_string(RelationDirection d) {
  return d == RelationDirection::PolyFromGeneral ? "poly_from_general" : "general_from_poly";
}

struct RelationReport {
  GroupId group;
  RelationDirection direction;
  std::vector<double> max_rel_error;  // per output slot
  std::vector<double> tolerance;      // per output slot
  bool pass = true;
  int worst_slot = -1;
  double worst_error = 0.0;
  Mat3 worst_C;
};

namespace detail {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

// Axis projections of C, G = cof C onto the first `naxes` frame directions.
struct AxisValues {
  double c[3], g[3];
};

inline AxisValues axis_values(const Mat3& C, const PreferredFrame& f, int naxes) {
  AxisValues v{};
  const Mat3 G = sym(cofactor(sym(C)));
  for (int i = 0; i < naxes; ++i) {
    const Mat3 a = outer(f.axis(i), f.axis(i));
    v.c[i] = ddot(sym(C), a);
    v.g[i] = ddot(G, a);
  }
  return v;
}

}  // namespace detail

/// Helper aggregates of the cubic relations, each computed along two routes:
/// directly from C/G projections and as a polynomial in the general
/// invariants. Route disagreement is itself a tested identity.
struct CubicHelperRoutes {
  double cmg_direct, cmg_from_general;      // C : M : G
  double trm4_direct, trm4_from_general;    // tr (M : C)^4
  double s21_direct, s21_from_general;      // sum_i [A_i:C]^2 [A_i:G]
};

inline CubicHelperRoutes cubic_helper_routes(const std::vector<double>& gen, const Mat3& C,
                                             const PreferredFrame& f) {
  const double J1 = gen[0], J2 = gen[1];
  const double J1c = gen[3], J2c = gen[4], J3c = gen[5], J5c = gen[7];
  const auto v = detail::axis_values(C, f, 3);
  CubicHelperRoutes r{};
  r.cmg_direct = v.c[0] * v.g[0] + v.c[1] * v.g[1] + v.c[2] * v.g[2];
  r.cmg_from_general = J3c - J1 * J1c + 0.5 * (J1 * J1 * J1 - J1 * J2);
  r.trm4_direct = std::pow(v.c[0], 4) + std::pow(v.c[1], 4) + std::pow(v.c[2], 4);
  r.trm4_from_general =
      0.5 * J1c * J1c - J1c * J1 * J1 + J1 * J1 * J1 * J1 / 6.0 + 4.0 / 3.0 * J2c * J1;
  r.s21_direct = v.c[0] * v.c[0] * v.g[0] + v.c[1] * v.c[1] * v.g[1] + v.c[2] * v.c[2] * v.g[2];
  r.s21_from_general = J5c - J2c * J1 + 0.5 * (J1c * J1 * J1 - J1c * J2);
  return r;
}

/// I6^cub as a polynomial in the general invariants; verified against the
/// direct evaluation and used by poly_from_general.
inline double cubic_i6_rendering_a(const std::vector<double>& gen) {
  const double J1 = gen[0], J2 = gen[1], J3 = gen[2];
  const double J1c = gen[3], J2c = gen[4], J3c = gen[5], J4c = gen[6], J5c = gen[7], J6c = gen[8];
  const double J1p2 = J1 * J1, J1p3 = J1p2 * J1, J1p4 = J1p3 * J1, J1p6 = J1p3 * J1p3;
  return -J6c * J1 + 0.75 * J1p4 * J2 - 7.0 / 24.0 * J1p6 + 9.0 / 8.0 * J1p4 * J1c -
         2.0 / 3.0 * J1p3 * J2c - 2.0 * J1p3 * J3c - 5.0 / 8.0 * J1p2 * J2 * J2 -
         0.75 * J1p2 * J2 * J1c + J1p2 * J4c + 1.5 * J1p2 * J5c + J1 * J2 * J3c +
         0.25 * J2 * J2 * J2 - 0.125 * J2 * J2 * J1c - 0.75 * J2 * J4c + 0.5 * J2 * J5c -
         J3 * J3 / 12.0 - J3 * J2c / 3.0 + 0.5 * J3 * J3c - 0.25 * J1c * J4c + 0.25 * J3c * J3c;
}

/// An alternative regrouping of the same representation that circulates
/// alongside the first. It is NOT algebraically equal (two sign flips inside
/// the -1/8 grouping); kept so the disagreement stays a tested fact rather
/// than a silent editorial choice.
inline double cubic_i6_rendering_b(const std::vector<double>& gen) {
  const double J1 = gen[0], J2 = gen[1], J3 = gen[2];
  const double J1c = gen[3], J2c = gen[4], J3c = gen[5], J4c = gen[6], J5c = gen[7], J6c = gen[8];
  const double J1p2 = J1 * J1, J1p3 = J1p2 * J1, J1p4 = J1p3 * J1, J1p6 = J1p3 * J1p3;
  return -J6c * J1 + J1p2 * J4c - 2.0 * J1p3 * J3c + J1 * J2 * J3c +
         0.5 * (J2 * J5c + J3 * J3c + 3.0 * J1p2 * J5c) - (J3 * J2c + 2.0 * J1p3 * J2c) / 3.0 +
         0.25 * (J2 * J2 * J2 - J1c * J4c + J3c * J3c) +
         0.75 * (J1p4 * J2 - J2 * J4c - J1p2 * J2 * J1c) - J3 * J3 / 12.0 -
         (J2 * J2 * J1c + 9.0 * J1p4 * J1c - 5.0 * J1p2 * J2 * J2) / 8.0 - 7.0 / 24.0 * J1p6;
}

/// Polyconvex basis values as polynomials in the general basis. auxC backs
/// the helper aggregates that are plain C/G projections; when it is null the
/// general-invariant polynomial route is used instead.
inline std::vector<double> poly_from_general(GroupId g, const std::vector<double>& gen,
                                             const Mat3* auxC,
                                             const PreferredFrame& f = PreferredFrame::standard()) {
  auto need = [&](std::size_t n) {
    if (gen.size() != n) throw DimensionMismatch("poly_from_general: wrong general-basis length");
  };
  switch (g) {
    case GroupId::Iso: {
      need(3);
      const double J1 = gen[0], J2 = gen[1], J3 = gen[2];
      return {J1, 0.5 * (J1 * J1 - J2), J1 * J1 * J1 / 6.0 - 0.5 * J1 * J2 + J3 / 3.0};
    }
    case GroupId::Ti: {
      need(5);
      const double J1 = gen[0], J2 = gen[1], J1t = gen[3], J2t = gen[4];
      auto iso = poly_from_general(GroupId::Iso, {gen[0], gen[1], gen[2]}, nullptr);
      return {iso[0], iso[1], iso[2], J1t, 0.5 * (J1 * J1 - J2) - J1 * J1t + J2t};
    }
    case GroupId::Mon: {
      need(7);
      const double J1 = gen[0], J2 = gen[1];
      const double J1m = gen[2], J2m = gen[3], J3m = gen[4], J4m = gen[5], J5m = gen[6];
      const double I4m = 0.25 * (J1 * J1 - J2) + 0.5 * (J4m - J1 * J2m) +
                         0.125 * (J2m * J2m + J3m * J3m - J1m * J1m);
      const double I5m = J5m - J1 * J3m + 1.5 * (J1 * J1 - J2) +
                         0.75 * (J3m * J3m - J1m * J1m + J2m * J2m);
      return {J1, 0.5 * (J1 * J1 - J2), 0.5 * (J2m - J1m), J3m - 3.0 * J1m,
              6.0 * J3m - 10.0 * J1m, I4m, I5m};
    }
    case GroupId::Rho: {
      need(7);
      const double J1 = gen[0], J2 = gen[1];
      const double J1r = gen[3], J2r = gen[4], J3r = gen[5], J4r = gen[6];
      auto iso = poly_from_general(GroupId::Iso, {gen[0], gen[1], gen[2]}, nullptr);
      return {iso[0], iso[1], iso[2], 0.5 * (J1r + J2r), 0.5 * (J2r - J1r),
              0.5 * (J1 * J1 - J1 * J1r - J1 * J2r - J2 + J3r + J4r),
              0.5 * (J1 * J1 + J1 * J1r - J1 * J2r - J2 - J3r + J4r)};
    }
    case GroupId::Tet: {
      need(8);
      const double J1 = gen[0], J2 = gen[1];
      const double J1T = gen[3], J2T = gen[4], J3T = gen[5], J4T = gen[6], J5T = gen[7];
      auto iso = poly_from_general(GroupId::Iso, {gen[0], gen[1], gen[2]}, nullptr);
      const double J1p2 = J1 * J1, J1p3 = J1p2 * J1, J1p4 = J1p3 * J1;
      const double I3T = J3T + J1p2 - J1T * J1 - J2;
      const double I4T = 0.5 * (J1p4 + J2 * J2) - J1p3 * J1T - J1p2 * J2 + J1p2 * J2T +
                         J1p2 * J3T + J1 * J2 * J1T - 2.0 * J1 * J4T - J2 * J3T + J5T;
      double cmg;
      if (auxC) {
        const auto v = detail::axis_values(*auxC, f, 2);
        cmg = v.c[0] * v.g[0] + v.c[1] * v.g[1];
      } else {
        cmg = 0.5 * (J1p2 * J1T - J2 * J1T) - J1 * J2T + J4T;
      }
      return {iso[0], iso[1], iso[2], J1T, J2T, I3T, I4T, J2T + I4T + 2.0 * cmg};
    }
    case GroupId::Cub: {
      need(9);
      const double J1 = gen[0], J2 = gen[1];
      const double J1c = gen[3], J3c = gen[5], J4c = gen[6];
      auto iso = poly_from_general(GroupId::Iso, {gen[0], gen[1], gen[2]}, nullptr);
      const double J1p2 = J1 * J1, J1p4 = J1p2 * J1p2;
      const double I4c = J4c + J1p2 * J1c - 2.0 * J1 * J3c + 0.5 * J1p2 * J2 -
                         0.25 * (J2 * J2 + J1p4);
      CubicHelperRoutes h{};
      double cmg, trm4, s21;
      if (auxC) {
        h = cubic_helper_routes(gen, *auxC, f);
        cmg = h.cmg_direct;
        trm4 = h.trm4_direct;
        s21 = h.s21_direct;
      } else {
        h = cubic_helper_routes(gen, Mat3::identity(), f);
        cmg = h.cmg_from_general;
        trm4 = h.trm4_from_general;
        s21 = h.s21_from_general;
      }
      const double I3c = J1c + I4c + 2.0 * cmg;
      const double I5c = trm4 + I4c + 2.0 * s21;
      const double I6c = cubic_i6_rendering_a(gen);
      return {iso[0], iso[1], iso[2], gen[3], gen[4], I3c, I4c, I5c, I6c};
    }
    case GroupId::Tri:
      throw UnsupportedGroup("poly_from_general: the triclinic relation is linear and lives with "
                             "the invariant definitions");
  }
  throw UnsupportedGroup("poly_from_general: unhandled group");
}

/// General basis values recovered from the polyconvex basis. For the cubic
/// group the J6 slot uses the non-polynomial functional form with its
/// division by tr C.
inline std::vector<double> general_from_poly(GroupId g, const std::vector<double>& poly) {
  auto need = [&](std::size_t n) {
    if (poly.size() != n) throw DimensionMismatch("general_from_poly: wrong polyconvex-basis length");
  };
  switch (g) {
    case GroupId::Iso: {
      need(3);
      const double I1 = poly[0], I2 = poly[1], I3 = poly[2];
      return {I1, I1 * I1 - 2.0 * I2, I1 * I1 * I1 - 3.0 * I1 * I2 + 3.0 * I3};
    }
    case GroupId::Ti: {
      need(5);
      const double I1 = poly[0], I2 = poly[1], I1t = poly[3], I2t = poly[4];
      auto iso = general_from_poly(GroupId::Iso, {poly[0], poly[1], poly[2]});
      return {iso[0], iso[1], iso[2], I1t, I1 * I1t - I2 + I2t};
    }
    case GroupId::Mon: {
      need(7);
      const double I1 = poly[0], I2 = poly[1];
      const double I1m = poly[2], I2m = poly[3], I3m = poly[4], I4m = poly[5], I5m = poly[6];
      const double J1m = 0.125 * I3m - 0.75 * I2m;
      const double J2m = 2.0 * I1m - 0.75 * I2m + 0.125 * I3m;
      const double J3m = 0.375 * I3m - 1.25 * I2m;
      const double J4m = -I2 - I1m * I1m + 2.0 * (I1 * I1m + I4m) +
                         0.125 * (I1 * I3m - I1m * I3m) + 0.75 * (I1m * I2m - I1 * I2m) -
                         9.0 / 256.0 * I3m * I3m + 15.0 / 64.0 * I2m * I3m -
                         25.0 / 64.0 * I2m * I2m;
      const double J5m = I5m - 3.0 * (I1m * I1m + I2) + 2.25 * I1m * I2m - 1.25 * I1 * I2m +
                         0.375 * (I1 * I3m - I1m * I3m) + 45.0 / 64.0 * I2m * I3m -
                         75.0 / 64.0 * I2m * I2m - 27.0 / 256.0 * I3m * I3m;
      return {I1, I1 * I1 - 2.0 * I2, J1m, J2m, J3m, J4m, J5m};
    }
    case GroupId::Rho: {
      need(7);
      const double I1 = poly[0], I2 = poly[1];
      const double I1r = poly[3], I2r = poly[4], I3r = poly[5], I4r = poly[6];
      auto iso = general_from_poly(GroupId::Iso, {poly[0], poly[1], poly[2]});
      return {iso[0], iso[1], iso[2], I1r - I2r, I1r + I2r,
              I1 * I1r - I1 * I2r + I3r - I4r, I1 * I1r + I1 * I2r - 2.0 * I2 + I3r + I4r};
    }
    case GroupId::Tet: {
      need(8);
      const double I1 = poly[0], I2 = poly[1];
      const double I1T = poly[3], I2T = poly[4], I3T = poly[5], I4T = poly[6], I5T = poly[7];
      auto iso = general_from_poly(GroupId::Iso, {poly[0], poly[1], poly[2]});
      const double cmg = 0.5 * (I5T - I2T - I4T);
      return {iso[0], iso[1], iso[2], I1T, I2T, I1 * I1T - 2.0 * I2 + I3T,
              I1 * I2T - I2 * I1T + cmg,
              I1 * I1 * I2T + I4T + 2.0 * (I2 * I2 - I1 * I2 * I1T + I1 * cmg - I2 * I3T)};
    }
    case GroupId::Cub: {
      need(9);
      const double I1 = poly[0], I2 = poly[1], I3 = poly[2];
      const double I1c = poly[3], I2c = poly[4], I3c = poly[5], I4c = poly[6], I5c = poly[7],
                   I6c = poly[8];
      if (I1 <= 1e-12)
        throw DegenerateBasisPoint("general_from_poly: tr C <= 0 cannot come from an SPD C");
      auto iso = general_from_poly(GroupId::Iso, {I1, I2, I3});
      const double cmg = 0.5 * (I3c - I1c - I4c);
      const double I1p2 = I1 * I1;
      const double trm4 = I1p2 * I1p2 / 6.0 - I1p2 * I1c + 4.0 / 3.0 * I1 * I2c + 0.5 * I1c * I1c;
      const double s21 = 0.5 * (I5c - trm4 - I4c);
      const double J3c = I1 * I1c - I1 * I2 + cmg;
      const double J4c = I1p2 * I1c - 2.0 * I1p2 * I2 + 2.0 * I1 * cmg + I2 * I2 + I4c;
      const double J5c = I1 * I2c - I2 * I1c + s21;
      const double J6c =
          I1p2 * I2c - I2 * cmg + 2.0 * (I1 * s21 - I1 * I2 * I1c) +
          0.5 * (3.0 * I3 * I1c - I1p2 * I3) + 0.25 * (3.0 * I1 * I2 * I2 + I1 * I4c) +
          (1.0 / I1) * (-I3 * I2c - I6c - I2 * s21 +
                        0.5 * (3.0 * I2 * I4c - I2 * I2 * I2 + 3.0 * I3 * cmg) +
                        0.25 * (cmg * cmg + I2 * I2 * I1c - 3.0 * I3 * I3 - I1c * I4c));
      return {iso[0], iso[1], iso[2], I1c, I2c, J3c, J4c, J5c, J6c};
    }
    case GroupId::Tri:
      throw UnsupportedGroup("general_from_poly: the triclinic relation is linear and lives with "
                             "the invariant definitions");
  }
  throw UnsupportedGroup("general_from_poly: unhandled group");
}

namespace detail {

inline Mat3 random_F(Rng& rng, double jlo, double jhi, double spread = 0.4) {
  for (int tries = 0; tries < 10000; ++tries) {
    Mat3 F = Mat3::identity();
    for (int k = 0; k < 9; ++k) F.a[k] += rng.uniform(-spread, spread);
    const double j = det(F);
    if (j >= jlo && j <= jhi) return F;
  }
  throw std::runtime_error("random_F: rejection sampling failed");
}

}  // namespace detail

inline std::vector<double> relation_tolerances(GroupId g, RelationDirection d) {
  std::size_t n = 0;
  switch (g) {
    case GroupId::Iso: n = 3; break;
    case GroupId::Ti: n = 5; break;
    case GroupId::Mon: n = 7; break;
    case GroupId::Rho: n = 7; break;
    case GroupId::Tet: n = 8; break;
    case GroupId::Cub: n = 9; break;
    case GroupId::Tri: n = 0; break;
  }
  std::vector<double> tol(n, 1e-10);
  if (g == GroupId::Cub && d == RelationDirection::GeneralFromPoly)
    tol[8] = 1e-9;  // division by tr C amplifies round-off in the J6 slot
  return tol;
}

/// Samples C = F^T F for random F with det F in [0.5, 2], evaluates one
/// relation direction against the direct basis evaluation, and reports the
/// max relative error per slot.
inline RelationReport verify_roundtrip(GroupId g, RelationDirection d, int n_samples,
                                       std::uint64_t seed,
                                       const PreferredFrame& f = PreferredFrame::standard()) {
  if (n_samples < 1) throw InvalidParams("verify_roundtrip: need at least one sample");
  RelationReport rep;
  rep.group = g;
  rep.direction = d;
  rep.tolerance = relation_tolerances(g, d);
  rep.max_rel_error.assign(rep.tolerance.size(), 0.0);
  Rng rng(seed);
  for (int s = 0; s < n_samples; ++s) {
    const Mat3 F = detail::random_F(rng, 0.5, 2.0);
    const Mat3 C = sym(transpose(F) * F);
    const auto gen = general_invariants(g, C, f).values;
    const auto poly = polyconvex_basis_from_C(g, C, f);
    const std::vector<double>& truth = d == RelationDirection::PolyFromGeneral ? poly : gen;
    const std::vector<double> pred = d == RelationDirection::PolyFromGeneral
                                         ? poly_from_general(g, gen, &C, f)
                                         : general_from_poly(g, poly);
    if (truth.size() != rep.max_rel_error.size() || pred.size() != truth.size())
      throw DimensionMismatch("verify_roundtrip: basis length mismatch");
    for (std::size_t k = 0; k < truth.size(); ++k) {
      const double e = detail::rel_err(pred[k], truth[k]);
      if (e > rep.max_rel_error[k]) {
        rep.max_rel_error[k] = e;
        if (e > rep.worst_error) {
          rep.worst_error = e;
          rep.worst_slot = static_cast<int>(k);
          rep.worst_C = C;
        }
      }
    }
  }
  for (std::size_t k = 0; k < rep.max_rel_error.size(); ++k)
    if (rep.max_rel_error[k] > rep.tolerance[k]) rep.pass = false;
  return rep;
}

/// Machine-check of the group-symmetrization theorems: the Reynolds average
/// of the single-axis seed function over the tabulated rotation set must
/// equal the closed-form axis sum.
inline double theorem_symmetrization_error(GroupId g, int n_samples, std::uint64_t seed,
                                           const PreferredFrame& f = PreferredFrame::standard()) {
  if (g != GroupId::Tet && g != GroupId::Cub)
    throw UnsupportedGroup("theorem_symmetrization_error: tet/cub only");
  const RotationSet rs = group_elements(g, f);
  const int naxes = g == GroupId::Tet ? 2 : 3;
  Rng rng(seed);
  double worst = 0;
  for (int s = 0; s < n_samples; ++s) {
    const Mat3 F = detail::random_F(rng, 0.5, 2.0);
    const KinematicBundle kb = bundle(F);
    SymmetrizedInvariantParams p;
    p.a1 = rng.uniform(0.0, 2.0);
    p.a2 = rng.uniform(0.0, 2.0);
    p.b1 = rng.uniform(1.0, 3.0);
    p.b2 = rng.uniform(1.0, 3.0);
    p.c = rng.uniform(1.0, 2.5);
    const double closed = parametric_symmetrized_invariant(g, kb, f, p);
    const Mat3 a1 = outer(f.axis(0), f.axis(0));
    double avg = 0;
    for (const Mat3& q : rs.elements) {
      const Mat3 cq = q * kb.C * transpose(q);
      const Mat3 gq = sym(cofactor(sym(cq)));
      avg += static_cast<double>(naxes) *
             std::pow(p.a1 * std::pow(ddot(sym(cq), a1), p.b1) + p.a2 * std::pow(ddot(gq, a1), p.b2),
                      p.c);
    }
    avg /= static_cast<double>(rs.elements.size());
    worst = std::max(worst, detail::rel_err(avg, closed));
  }
  return worst;
}

}  // namespace polyaniso
