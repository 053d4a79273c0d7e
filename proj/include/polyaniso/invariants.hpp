// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#pragma once

#include <cmath>
#include <vector>

#include "polyaniso/kinematics.hpp"
#include "polyaniso/symmetry.hpp"

namespace polyaniso {

enum class BasisKind { General, Polyconvex, TriclinicChat };

/// Ordered invariant values tagged with the basis they belong to. Slot
/// ordering is frozen: downstream network weights and normalization
/// constants index slots positionally.
///
/// General bases (equation order, isotropic prefix first):
///   iso : tr C, tr C^2, tr C^3
///   ti  : iso(3), tr(C M), tr(C^2 M)
///   mon : tr C, tr C^2, J1..J5 of the (M1, M2) tensors
///   rho : iso(3), J1..J4 of M = n1(x)n1 - n2(x)n2
///   tet : iso(3), J1..J5 of the fourth-order axis tensor (2 axes)
///   cub : iso(3), J1..J6 of the fourth-order axis tensor (3 axes)
///   tri : C'11, C'22, C'33, C'12, C'13, C'23 (frame coordinates)
///
/// Polyconvex model slates (the network inputs):
///   non-triclinic: tr C, tr G, J, -J, then the group's polyconvex
///   invariants in corollary order;
///   tri: the 14-tuple c^ = (C-projections, G-projections, J, -J).
struct InvariantVector {
  GroupId group;
  BasisKind kind;
  std::vector<double> values;
};

/// Per-slot value together with its strain sensitivities. The deformation
/// gradient generator of a slot is 2 F dC + dJ H.
struct SlotEval {
  std::vector<double> value;
  std::vector<Mat3> dC;
  std::vector<double> dJ;

  std::size_t size() const { return value.size(); }
  void push(double v, const Mat3& dc, double dj = 0.0) {
    value.push_back(v);
    dC.push_back(dc);
    dJ.push_back(dj);
  }
};

namespace slots {

inline int polyconvex_aniso_count(GroupId g) {
  switch (g) {
    case GroupId::Iso: return 0;
    case GroupId::Ti: return 4;
    case GroupId::Mon: return 5;
    case GroupId::Rho: return 4;
    case GroupId::Tet: return 5;
    case GroupId::Cub: return 6;
    case GroupId::Tri: return 14;
  }
  return 0;
}

inline int model_slate_size(GroupId g) {
  return g == GroupId::Tri ? 14 : 4 + polyconvex_aniso_count(g);
}

/// Polyconvex model slate evaluated from independent (C, G, J). For a
/// kinematically consistent bundle these coincide with functions of F; the
/// extended-argument probe feeds C = F^T F and G = H^T H with J literal.
inline SlotEval eval_polyconvex_slate(GroupId g, const Mat3& C, const Mat3& G, double J,
                                      const PreferredFrame& f) {
  SlotEval s;
  const Mat3 I = Mat3::identity();
  s.push(trace(C), I);
  s.push(trace(G), tensor_cross(C, I));
  s.push(J, Mat3::zero(), 1.0);
  s.push(-J, Mat3::zero(), -1.0);
  switch (g) {
    case GroupId::Iso:
      break;
    case GroupId::Ti: {
      const Mat3 m = outer(f.n3, f.n3);
      s.push(ddot(C, m), m);
      s.push(ddot(G, m), tensor_cross(C, m));
      s.push(s.value[0] - s.value[4], I - m);
      s.push(s.value[1] - s.value[5], tensor_cross(C, I - m));
      break;
    }
    case GroupId::Mon: {
      const Mat3 b1 = outer(f.n1, f.n1);
      const Vec3 n12 = f.n1 + f.n2;
      const Mat3 m2 = outer(n12, n12) + 2.0 * (b1 + outer(f.n2, f.n2));
      const Mat3 m2sq = m2 * m2;
      s.push(ddot(C, b1), b1);
      s.push(ddot(C, m2), m2);
      s.push(ddot(C, m2sq), m2sq);
      s.push(ddot(G, b1), tensor_cross(C, b1));
      s.push(ddot(G, m2), tensor_cross(C, m2));
      break;
    }
    case GroupId::Rho: {
      const Mat3 b1 = outer(f.n1, f.n1);
      const Mat3 b2 = outer(f.n2, f.n2);
      s.push(ddot(C, b1), b1);
      s.push(ddot(C, b2), b2);
      s.push(ddot(G, b1), tensor_cross(C, b1));
      s.push(ddot(G, b2), tensor_cross(C, b2));
      break;
    }
    case GroupId::Tet:
    case GroupId::Cub: {
      const int naxes = g == GroupId::Tet ? 2 : 3;
      double vc[3], vg[3];
      Mat3 a[3], xg[3];
      for (int i = 0; i < naxes; ++i) {
        a[i] = outer(f.axis(i), f.axis(i));
        vc[i] = ddot(C, a[i]);
        vg[i] = ddot(G, a[i]);
        xg[i] = tensor_cross(C, a[i]);
      }
      auto sum = [&](auto&& val, auto&& der) {
        double v = 0;
        Mat3 d = Mat3::zero();
        for (int i = 0; i < naxes; ++i) {
          v += val(i);
          d += der(i);
        }
        s.push(v, d);
      };
      if (g == GroupId::Tet) {
        sum([&](int i) { return vc[i]; }, [&](int i) { return a[i]; });
        sum([&](int i) { return vc[i] * vc[i]; }, [&](int i) { return 2.0 * vc[i] * a[i]; });
        sum([&](int i) { return vg[i]; }, [&](int i) { return xg[i]; });
        sum([&](int i) { return vg[i] * vg[i]; }, [&](int i) { return 2.0 * vg[i] * xg[i]; });
        sum([&](int i) { return (vc[i] + vg[i]) * (vc[i] + vg[i]); },
            [&](int i) { return 2.0 * (vc[i] + vg[i]) * (a[i] + xg[i]); });
      } else {
        sum([&](int i) { return vc[i] * vc[i]; }, [&](int i) { return 2.0 * vc[i] * a[i]; });
        sum([&](int i) { return vc[i] * vc[i] * vc[i]; },
            [&](int i) { return 3.0 * vc[i] * vc[i] * a[i]; });
        sum([&](int i) { return (vc[i] + vg[i]) * (vc[i] + vg[i]); },
            [&](int i) { return 2.0 * (vc[i] + vg[i]) * (a[i] + xg[i]); });
        sum([&](int i) { return vg[i] * vg[i]; }, [&](int i) { return 2.0 * vg[i] * xg[i]; });
        sum([&](int i) { return (vc[i] * vc[i] + vg[i]) * (vc[i] * vc[i] + vg[i]); },
            [&](int i) { return 2.0 * (vc[i] * vc[i] + vg[i]) * (2.0 * vc[i] * a[i] + xg[i]); });
        sum([&](int i) { return vg[i] * vg[i] * vg[i]; },
            [&](int i) { return 3.0 * vg[i] * vg[i] * xg[i]; });
      }
      break;
    }
    case GroupId::Tri:
      throw UnsupportedGroup("eval_polyconvex_slate: use eval_chat_slate for the triclinic tuple");
  }
  return s;
}

/// The triclinic 14-tuple c^(Q * C), with the rotation folded into the
/// projection tensors.
inline SlotEval eval_chat_slate(const Mat3& C, const Mat3& G, double J, const PreferredFrame& f,
                                const Mat3& Q) {
  SlotEval s;
  const Mat3 qt = transpose(Q);
  std::array<Mat3, 6> a;
  {
    const auto dirs = triclinic_directions(f);
    for (int i = 0; i < 6; ++i) a[i] = qt * outer(dirs[i], dirs[i]) * Q;
  }
  for (int i = 0; i < 6; ++i) s.push(ddot(C, a[i]), a[i]);
  for (int i = 0; i < 6; ++i) s.push(ddot(G, a[i]), tensor_cross(C, a[i]));
  s.push(J, Mat3::zero(), 1.0);
  s.push(-J, Mat3::zero(), -1.0);
  return s;
}

/// The six coordinates (C'11, C'22, C'33, C'12, C'13, C'23) of Q * C in the
/// preferred frame.
inline SlotEval eval_coord_slate(const Mat3& C, const PreferredFrame& f, const Mat3& Q) {
  SlotEval s;
  const Mat3 qt = transpose(Q);
  static constexpr int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
  for (const auto& pq : pairs) {
    const Mat3 k = qt * sym(outer(f.axis(pq[0]), f.axis(pq[1]))) * Q;
    s.push(ddot(C, k), k);
  }
  return s;
}

/// General (not necessarily polyconvex) basis slate, used by the
/// unconstrained model variant. All slots are functions of C alone.
inline SlotEval eval_general_slate(GroupId g, const Mat3& C, const PreferredFrame& f) {
  SlotEval s;
  const Mat3 I = Mat3::identity();
  const Mat3 C2 = C * C;
  if (g == GroupId::Tri) {
    return eval_coord_slate(C, f, I);
  }
  if (g == GroupId::Mon) {
    s.push(trace(C), I);
    s.push(trace(C2), 2.0 * C);
  } else {
    s.push(trace(C), I);
    s.push(trace(C2), 2.0 * C);
    s.push(trace(C2 * C), 3.0 * C2);
  }
  switch (g) {
    case GroupId::Iso:
      break;
    case GroupId::Ti: {
      const Mat3 m = outer(f.n3, f.n3);
      s.push(ddot(C, m), m);
      s.push(ddot(C2, m), C * m + m * C);
      break;
    }
    case GroupId::Mon: {
      const Mat3 m1 = outer(f.n1, f.n1) - outer(f.n2, f.n2);
      const Mat3 m2 = outer(f.n1, f.n2) - outer(f.n2, f.n1);
      const Mat3 m2sq = m2 * m2;            // symmetric
      const Mat3 m12 = sym(m1 * m2);        // symmetric part drives tr(C M1 M2)
      s.push(ddot(C, m2sq), m2sq);
      s.push(ddot(C, m1), m1);
      s.push(ddot(C, m12), m12);
      s.push(ddot(C2, m1), C * m1 + m1 * C);
      s.push(ddot(C2, m12), sym(C * (m1 * m2) + (m1 * m2) * C));
      break;
    }
    case GroupId::Rho: {
      const Mat3 m = outer(f.n1, f.n1) - outer(f.n2, f.n2);
      const Mat3 msq = m * m;
      s.push(ddot(C, m), m);
      s.push(ddot(C, msq), msq);
      s.push(ddot(C2, m), C * m + m * C);
      s.push(ddot(C2, msq), C * msq + msq * C);
      break;
    }
    case GroupId::Tet:
    case GroupId::Cub: {
      const int naxes = g == GroupId::Tet ? 2 : 3;
      double vc[3], vc2[3];
      Mat3 a[3], da2[3];
      for (int i = 0; i < naxes; ++i) {
        a[i] = outer(f.axis(i), f.axis(i));
        vc[i] = ddot(C, a[i]);
        vc2[i] = ddot(C2, a[i]);
        da2[i] = C * a[i] + a[i] * C;
      }
      auto sum = [&](auto&& val, auto&& der) {
        double v = 0;
        Mat3 d = Mat3::zero();
        for (int i = 0; i < naxes; ++i) {
          v += val(i);
          d += der(i);
        }
        s.push(v, d);
      };
      if (g == GroupId::Tet) {
        sum([&](int i) { return vc[i]; }, [&](int i) { return a[i]; });
        sum([&](int i) { return vc[i] * vc[i]; }, [&](int i) { return 2.0 * vc[i] * a[i]; });
        sum([&](int i) { return vc2[i]; }, [&](int i) { return da2[i]; });
        sum([&](int i) { return vc[i] * vc2[i]; },
            [&](int i) { return vc2[i] * a[i] + vc[i] * da2[i]; });
        sum([&](int i) { return vc2[i] * vc2[i]; }, [&](int i) { return 2.0 * vc2[i] * da2[i]; });
      } else {
        sum([&](int i) { return vc[i] * vc[i]; }, [&](int i) { return 2.0 * vc[i] * a[i]; });
        sum([&](int i) { return vc[i] * vc[i] * vc[i]; },
            [&](int i) { return 3.0 * vc[i] * vc[i] * a[i]; });
        sum([&](int i) { return vc[i] * vc2[i]; },
            [&](int i) { return vc2[i] * a[i] + vc[i] * da2[i]; });
        sum([&](int i) { return vc2[i] * vc2[i]; }, [&](int i) { return 2.0 * vc2[i] * da2[i]; });
        sum([&](int i) { return vc[i] * vc[i] * vc2[i]; },
            [&](int i) { return 2.0 * vc[i] * vc2[i] * a[i] + vc[i] * vc[i] * da2[i]; });
        sum([&](int i) { return vc[i] * vc2[i] * vc2[i]; },
            [&](int i) { return vc2[i] * vc2[i] * a[i] + 2.0 * vc[i] * vc2[i] * da2[i]; });
      }
      break;
    }
    case GroupId::Tri:
      break;  // handled above
  }
  return s;
}

}  // namespace slots

namespace detail {

inline void require_spd(const Mat3& C) {
  if (max_abs(C - transpose(C)) > 1e-9 * (1.0 + max_abs(C)))
    throw NotSPD("general_invariants: C is not symmetric");
  const double m1 = C(0, 0);
  const double m2 = C(0, 0) * C(1, 1) - C(0, 1) * C(1, 0);
  const double m3 = det(C);
  if (!(m1 > 0.0 && m2 > 0.0 && m3 > 0.0)) throw NotSPD("general_invariants: C is not positive definite");
}

}  // namespace detail

/// Minimal integrity basis values of the group (general, not necessarily
/// polyconvex).
inline InvariantVector general_invariants(GroupId g, const Mat3& C, const PreferredFrame& f) {
  detail::require_spd(C);
  f.validate();
  return InvariantVector{g, BasisKind::General, slots::eval_general_slate(g, sym(C), f).value};
}

/// Polyconvex model slate for a kinematic bundle: the isotropic slots
/// (tr C, tr G, J, -J) followed by the group's polyconvex invariants; for
/// the triclinic group, the 14-tuple c^.
inline InvariantVector polyconvex_invariants(GroupId g, const KinematicBundle& kb,
                                             const PreferredFrame& f) {
  f.validate();
  if (g == GroupId::Tri)
    return InvariantVector{g, BasisKind::TriclinicChat,
                           slots::eval_chat_slate(kb.C, kb.G, kb.J, f, Mat3::identity()).value};
  return InvariantVector{g, BasisKind::Polyconvex,
                         slots::eval_polyconvex_slate(g, kb.C, kb.G, kb.J, f).value};
}

/// Polyconvex basis in relation form: the isotropic prefix (tr C, tr G,
/// det C) -- (tr C, tr G) for the monoclinic group -- followed by the
/// anisotropic invariants. This is the ordering the basis relations in
/// relations.hpp operate on.
inline std::vector<double> polyconvex_basis_from_C(GroupId g, const Mat3& C,
                                                   const PreferredFrame& f) {
  const Mat3 Cs = sym(C);
  const Mat3 G = sym(cofactor(Cs));
  const auto slate = slots::eval_polyconvex_slate(g, Cs, G, 1.0, f);
  std::vector<double> out;
  out.push_back(trace(Cs));
  out.push_back(trace(G));
  if (g != GroupId::Mon) out.push_back(det(Cs));
  // the ti extension slots I3^ti, I4^ti are definitional linear combinations
  // and do not take part in the basis relations
  const std::size_t last = g == GroupId::Ti ? 6 : slate.size();
  for (std::size_t k = 4; k < last; ++k) out.push_back(slate.value[k]);
  return out;
}

struct SymmetrizedInvariantParams {
  double a1 = 1, a2 = 1, b1 = 1, b2 = 1, c = 1;
};

/// f = sum_i (a1 [n_i (x) n_i : C]^b1 + a2 [n_i (x) n_i : G]^b2)^c over the
/// 2 (tetragonal) or 3 (cubic) frame axes.
inline double parametric_symmetrized_invariant(GroupId g, const KinematicBundle& kb,
                                               const PreferredFrame& f,
                                               const SymmetrizedInvariantParams& p) {
  if (g != GroupId::Tet && g != GroupId::Cub)
    throw UnsupportedGroup("parametric_symmetrized_invariant: defined for tet and cub only");
  if (!(p.a1 >= 0 && p.a2 >= 0 && p.b1 >= 1 && p.b2 >= 1 && p.c >= 1))
    throw InvalidParams("parametric_symmetrized_invariant: require a1,a2 >= 0 and b1,b2,c >= 1");
  f.validate();
  const int naxes = g == GroupId::Tet ? 2 : 3;
  double out = 0;
  for (int i = 0; i < naxes; ++i) {
    const Mat3 a = outer(f.axis(i), f.axis(i));
    out += std::pow(p.a1 * std::pow(ddot(kb.C, a), p.b1) + p.a2 * std::pow(ddot(kb.G, a), p.b2), p.c);
  }
  return out;
}

/// A polyconvex slot evaluated on arbitrary, kinematically independent
/// extended arguments (F, H, J): C := F^T F, G := H^T H, J literal.
inline double invariant_extended(GroupId g, BasisKind kind, int slot, const ExtendedArgs& xa,
                                 const PreferredFrame& f) {
  if (kind == BasisKind::General)
    throw SlotNotPolyconvex("invariant_extended: general-basis slots have no extended form");
  const Mat3 C = sym(transpose(xa.F) * xa.F);
  const Mat3 G = sym(transpose(xa.H) * xa.H);
  const auto slate = kind == BasisKind::TriclinicChat
                         ? slots::eval_chat_slate(C, G, xa.J, f, Mat3::identity())
                         : slots::eval_polyconvex_slate(g, C, G, xa.J, f);
  if (slot < 0 || slot >= static_cast<int>(slate.size()))
    throw DimensionMismatch("invariant_extended: slot out of range");
  return slate.value[slot];
}

}  // namespace polyaniso
