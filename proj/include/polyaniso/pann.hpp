// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "polyaniso/invariants.hpp"
#include "polyaniso/network.hpp"

namespace polyaniso {

// Model variants:
//   I     convex-monotone network on the group's polyconvex invariants
//   Istar unconstrained network on (tr C, tr G, det C) + general invariants
//   C     convex-monotone network on the triclinic 14-tuple, group-symmetrized
//   Cstar input-convex network on the six C coordinates, group-symmetrized
enum class Variant { I, Istar, C, Cstar };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::I: return "I";
    case Variant::Istar: return "Istar";
    case Variant::C: return "C";
    case Variant::Cstar: return "Cstar";
  }
  return "?";
}

inline Variant variant_from_string(const std::string& s) {
  if (s == "I") return Variant::I;
  if (s == "Istar") return Variant::Istar;
  if (s == "C") return Variant::C;
  if (s == "Cstar") return Variant::Cstar;
  throw InvalidParams("unknown variant '" + s + "'");
}

inline bool variant_is_polyconvex(Variant v) { return v == Variant::I || v == Variant::C; }
inline bool variant_is_symmetrized(Variant v) { return v == Variant::C || v == Variant::Cstar; }

/// psi_growth(J) = alpha (J + 1/J - 2)^2
inline double growth(double J, double alpha) {
  if (!(J > 0)) throw NonPositiveJacobian("growth: J <= 0");
  const double t = J + 1.0 / J - 2.0;
  return alpha * t * t;
}

inline double growth_dJ(double J, double alpha) {
  if (!(J > 0)) throw NonPositiveJacobian("growth_dJ: J <= 0");
  const double t = J + 1.0 / J - 2.0;
  return 2.0 * alpha * t * (1.0 - 1.0 / (J * J));
}

/// Constants of the stress-normalization term. Always recomputed from the
/// current network parameters at F = I, never persisted.
struct NormalizationConstants {
  std::vector<double> slot_coef;   // variant I: linear coefficient per slate slot
  double extra_coef = 0.0;         // variant I, monoclinic: coefficient on tr(G M2~^2)
  Mat3 projection{};               // Istar/Cstar: T of the -T:(C-I) projection term
  std::array<double, 6> p{}, q{};  // variant C
  double r = 0.0;                  // variant C
};

struct PannModel {
  Variant variant = Variant::I;
  GroupId group = GroupId::Cub;
  PreferredFrame frame;
  NetworkParams net;
  double alpha = 1e-5;  // growth coefficient, in units of the stress scale
  std::uint64_t seed = 0;
  RotationSet rotations;  // populated for the symmetrized variants
  NormalizationConstants norm;
};

namespace panndetail {

inline int general_slate_size(GroupId g) {
  switch (g) {
    case GroupId::Iso: return 3;
    case GroupId::Ti: return 5;
    case GroupId::Mon: return 7;
    case GroupId::Rho: return 7;
    case GroupId::Tet: return 8;
    case GroupId::Cub: return 9;
    case GroupId::Tri: return 6;
  }
  return 0;
}

/// Unconstrained-model slate: (tr C, tr G, det C) then the group's general
/// invariants; the triclinic group uses its six coordinates directly.
inline SlotEval eval_model_general_slate(GroupId g, const Mat3& C, const PreferredFrame& f) {
  if (g == GroupId::Tri) return slots::eval_coord_slate(C, f, Mat3::identity());
  SlotEval s;
  const Mat3 G = sym(cofactor(C));
  s.push(trace(C), Mat3::identity());
  s.push(trace(G), tensor_cross(C, Mat3::identity()));
  s.push(det(C), G);
  const SlotEval gen = slots::eval_general_slate(g, C, f);
  const int prefix = g == GroupId::Mon ? 2 : 3;
  for (std::size_t k = prefix; k < gen.size(); ++k) s.push(gen.value[k], gen.dC[k]);
  return s;
}

inline Mat3 mon_extra_tensor(const PreferredFrame& f) {
  const Vec3 n12 = f.n1 + f.n2;
  const Mat3 m2 = outer(n12, n12) + 2.0 * (outer(f.n1, f.n1) + outer(f.n2, f.n2));
  return m2 * m2;
}

}  // namespace panndetail

inline int model_slate_size(Variant v, GroupId g) {
  switch (v) {
    case Variant::I: return slots::model_slate_size(g);
    case Variant::Istar:
      // (tr C, tr G, det C) prefix + the group's anisotropic invariants
      return g == GroupId::Tri ? 6 : panndetail::general_slate_size(g) + (g == GroupId::Mon ? 1 : 0);
    case Variant::C: return 14;
    case Variant::Cstar: return 6;
  }
  return 0;
}

/// Slate of network inputs for one symmetrization term (Q = identity for the
/// non-symmetrized variants), with per-slot strain sensitivities.
inline SlotEval model_slate(const PannModel& m, const Mat3& C, const Mat3& G, double J,
                            const Mat3& Q) {
  switch (m.variant) {
    case Variant::I:
      if (m.group == GroupId::Tri)
        throw UnsupportedGroup("variant I has no structural-tensor polyconvex basis for tri");
      return slots::eval_polyconvex_slate(m.group, C, G, J, m.frame);
    case Variant::Istar:
      return panndetail::eval_model_general_slate(m.group, C, m.frame);
    case Variant::C:
      return slots::eval_chat_slate(C, G, J, m.frame, Q);
    case Variant::Cstar:
      return slots::eval_coord_slate(C, m.frame, Q);
  }
  throw InvalidParams("model_slate: bad variant");
}

inline const std::vector<Mat3>& model_rotations(const PannModel& m) {
  static const std::vector<Mat3> identity_only = {Mat3::identity()};
  return variant_is_symmetrized(m.variant) ? m.rotations.elements : identity_only;
}

namespace panndetail {

struct IdentitySlate {
  SlotEval slate;            // at C = G = I, J = 1, Q = I
  std::vector<Mat3> gen;     // deformation-gradient generators 2 dC + dJ I
};

inline IdentitySlate identity_slate(const PannModel& m) {
  IdentitySlate out;
  out.slate = model_slate(m, Mat3::identity(), Mat3::identity(), 1.0, Mat3::identity());
  out.gen.reserve(out.slate.size());
  for (std::size_t s = 0; s < out.slate.size(); ++s)
    out.gen.push_back(2.0 * out.slate.dC[s] + out.slate.dJ[s] * Mat3::identity());
  return out;
}

inline double relu(double x) { return x > 0 ? x : 0.0; }

// ---- variant-I stress normalization recipes --------------------------------
// Each recipe writes the linear coefficients of a polyconvex stress term
// (non-negative weights on designated polyconvex slots plus a free-sign
// linear J term) such that the total first Piola-Kirchhoff stress vanishes
// at F = I.

struct VariantIRecipe {
  std::vector<double> slot_coef;
  double extra_coef = 0.0;
};

inline VariantIRecipe variant_i_recipe(GroupId g, const std::vector<double>& gr) {
  VariantIRecipe out;
  out.slot_coef.assign(gr.size(), 0.0);
  const double iso_part = 2 * gr[0] + 4 * gr[1] + gr[2] - gr[3];
  switch (g) {
    case GroupId::Iso: {
      out.slot_coef[2] = -iso_part;
      break;
    }
    case GroupId::Ti: {
      const double o = gr[0] + 2 * gr[1] + 0.5 * (gr[2] - gr[3]) + gr[5] + gr[6] + gr[7];
      const double x = gr[4] - gr[5] - gr[6] + gr[7];
      const double p = relu(-x), q = relu(x);
      out.slot_coef[4] = p;
      out.slot_coef[5] = q;
      out.slot_coef[2] = -2.0 * (o + q);
      break;
    }
    case GroupId::Cub: {
      const double rr = gr[0] + 2 * gr[1] + 0.5 * (gr[2] - gr[3]) + 6 * gr[7] +
                        12 * (gr[6] + gr[8]) + 9 * gr[9];
      const double x = 2 * (gr[4] - gr[7]) + 3 * (gr[5] - gr[9]) + 4 * gr[8];
      const double s = relu(-x), t = relu(x);
      out.slot_coef[4] = 0.5 * s;
      out.slot_coef[7] = 0.5 * t;
      out.slot_coef[2] = -2.0 * (rr + 3.0 * t);
      break;
    }
    case GroupId::Tet: {
      const double a = iso_part + 4 * gr[6] + 8 * gr[7] + 16 * gr[8];
      const double x = 0.5 * (2 * gr[4] + 4 * gr[5] - 2 * gr[6] - 4 * gr[7]);
      const double p = relu(-x), q = relu(x);
      out.slot_coef[4] = p;
      out.slot_coef[6] = q;
      out.slot_coef[2] = -a - 4.0 * q;
      break;
    }
    case GroupId::Rho: {
      const double a = iso_part + 2 * gr[6] + 2 * gr[7];
      const double b1 = 2 * gr[4] - 2 * gr[6];
      const double b2 = 2 * gr[5] - 2 * gr[7];
      out.slot_coef[4] = 0.5 * relu(-b1);
      out.slot_coef[5] = 0.5 * relu(-b2);
      out.slot_coef[6] = 0.5 * relu(b1);
      out.slot_coef[7] = 0.5 * relu(b2);
      out.slot_coef[2] = -a - 2.0 * out.slot_coef[6] - 2.0 * out.slot_coef[7];
      break;
    }
    case GroupId::Mon: {
      const double a = iso_part + 2 * gr[7] + 12 * gr[8];
      const double b = 2 * gr[4] - 2 * gr[7];
      const double c = 2 * gr[5] - 2 * gr[8];
      const double d = 2 * gr[6];
      out.slot_coef[4] = 0.5 * relu(-b);
      out.slot_coef[5] = 0.5 * relu(-c);
      out.slot_coef[6] = 0.5 * relu(-d);
      out.slot_coef[7] = 0.5 * relu(b);
      out.slot_coef[8] = 0.5 * relu(c);
      out.extra_coef = 0.5 * relu(d);
      out.slot_coef[2] =
          -a - 2.0 * out.slot_coef[7] - 12.0 * out.slot_coef[8] - 40.0 * out.extra_coef;
      break;
    }
    case GroupId::Tri:
      throw UnsupportedGroup("variant_i_recipe: tri");
  }
  return out;
}

// Adjoint of variant_i_recipe: pulls cotangents of the produced coefficients
// back to the slate gradient gr. The ReLU pattern is re-derived from gr.
inline std::vector<double> variant_i_recipe_pullback(GroupId g, const std::vector<double>& gr,
                                                     const std::vector<double>& cot_coef,
                                                     double cot_extra) {
  std::vector<double> cg(gr.size(), 0.0);
  auto add_iso = [&](double w) {
    cg[0] += 2 * w;
    cg[1] += 4 * w;
    cg[2] += w;
    cg[3] -= w;
  };
  switch (g) {
    case GroupId::Iso: {
      add_iso(-cot_coef[2]);
      break;
    }
    case GroupId::Ti: {
      const double x = gr[4] - gr[5] - gr[6] + gr[7];
      const double cot_o = -2.0 * cot_coef[2];
      const double cot_q = cot_coef[5] - 2.0 * cot_coef[2];
      const double cot_p = cot_coef[4];
      const double cot_x = (x > 0 ? cot_q : 0.0) - (x < 0 ? cot_p : 0.0);
      cg[0] += cot_o;
      cg[1] += 2 * cot_o;
      cg[2] += 0.5 * cot_o;
      cg[3] -= 0.5 * cot_o;
      cg[5] += cot_o;
      cg[6] += cot_o;
      cg[7] += cot_o;
      cg[4] += cot_x;
      cg[5] -= cot_x;
      cg[6] -= cot_x;
      cg[7] += cot_x;
      break;
    }
    case GroupId::Cub: {
      const double x = 2 * (gr[4] - gr[7]) + 3 * (gr[5] - gr[9]) + 4 * gr[8];
      const double cot_rr = -2.0 * cot_coef[2];
      const double cot_t = -6.0 * cot_coef[2] + 0.5 * cot_coef[7];
      const double cot_s = 0.5 * cot_coef[4];
      const double cot_x = (x > 0 ? cot_t : 0.0) - (x < 0 ? cot_s : 0.0);
      cg[0] += cot_rr;
      cg[1] += 2 * cot_rr;
      cg[2] += 0.5 * cot_rr;
      cg[3] -= 0.5 * cot_rr;
      cg[6] += 12 * cot_rr;
      cg[7] += 6 * cot_rr;
      cg[8] += 12 * cot_rr;
      cg[9] += 9 * cot_rr;
      cg[4] += 2 * cot_x;
      cg[5] += 3 * cot_x;
      cg[7] -= 2 * cot_x;
      cg[8] += 4 * cot_x;
      cg[9] -= 3 * cot_x;
      break;
    }
    case GroupId::Tet: {
      const double x = gr[4] + 2 * gr[5] - gr[6] - 2 * gr[7];
      const double cot_a = -cot_coef[2];
      const double cot_q = cot_coef[6] - 4.0 * cot_coef[2];
      const double cot_p = cot_coef[4];
      const double cot_x = (x > 0 ? cot_q : 0.0) - (x < 0 ? cot_p : 0.0);
      add_iso(cot_a);
      cg[6] += 4 * cot_a;
      cg[7] += 8 * cot_a;
      cg[8] += 16 * cot_a;
      cg[4] += cot_x;
      cg[5] += 2 * cot_x;
      cg[6] -= cot_x;
      cg[7] -= 2 * cot_x;
      break;
    }
    case GroupId::Rho: {
      const double b1 = 2 * gr[4] - 2 * gr[6];
      const double b2 = 2 * gr[5] - 2 * gr[7];
      const double cot_a = -cot_coef[2];
      const double cot_c3 = cot_coef[6] - 2.0 * cot_coef[2];
      const double cot_c4 = cot_coef[7] - 2.0 * cot_coef[2];
      const double cot_c1 = cot_coef[4];
      const double cot_c2 = cot_coef[5];
      const double cot_b1 = (b1 > 0 ? 0.5 * cot_c3 : 0.0) - (b1 < 0 ? 0.5 * cot_c1 : 0.0);
      const double cot_b2 = (b2 > 0 ? 0.5 * cot_c4 : 0.0) - (b2 < 0 ? 0.5 * cot_c2 : 0.0);
      add_iso(cot_a);
      cg[6] += 2 * cot_a;
      cg[7] += 2 * cot_a;
      cg[4] += 2 * cot_b1;
      cg[6] -= 2 * cot_b1;
      cg[5] += 2 * cot_b2;
      cg[7] -= 2 * cot_b2;
      break;
    }
    case GroupId::Mon: {
      const double b = 2 * gr[4] - 2 * gr[7];
      const double c = 2 * gr[5] - 2 * gr[8];
      const double d = 2 * gr[6];
      const double cot_a = -cot_coef[2];
      const double cot_c4 = cot_coef[7] - 2.0 * cot_coef[2];
      const double cot_c5 = cot_coef[8] - 12.0 * cot_coef[2];
      const double cot_c6 = cot_extra - 40.0 * cot_coef[2];
      const double cot_c1 = cot_coef[4];
      const double cot_c2 = cot_coef[5];
      const double cot_c3 = cot_coef[6];
      const double cot_b = (b > 0 ? 0.5 * cot_c4 : 0.0) - (b < 0 ? 0.5 * cot_c1 : 0.0);
      const double cot_c = (c > 0 ? 0.5 * cot_c5 : 0.0) - (c < 0 ? 0.5 * cot_c2 : 0.0);
      const double cot_d = (d > 0 ? 0.5 * cot_c6 : 0.0) - (d < 0 ? 0.5 * cot_c3 : 0.0);
      add_iso(cot_a);
      cg[7] += 2 * cot_a;
      cg[8] += 12 * cot_a;
      cg[4] += 2 * cot_b;
      cg[7] -= 2 * cot_b;
      cg[5] += 2 * cot_c;
      cg[8] -= 2 * cot_c;
      cg[6] += 2 * cot_d;
      break;
    }
    case GroupId::Tri:
      throw UnsupportedGroup("variant_i_recipe_pullback: tri");
  }
  return cg;
}

// ---- variant-C normalization -----------------------------------------------
// The network stress at F = I is decomposed over the six projection tensors
// A_i = u_i (x) u_i (a basis of symmetric tensors); non-negative multiples
// of the C- and G-projection slots plus a linear J term cancel it exactly.

struct VariantCConstants {
  std::array<double, 6> p{}, q{};
  double r = 0.0;
};

inline std::array<double, 6> chat_projection_coordinates(const Mat3& t_frame) {
  std::array<double, 6> d{};
  d[3] = 2.0 * t_frame(0, 1);
  d[4] = 2.0 * t_frame(0, 2);
  d[5] = 2.0 * t_frame(1, 2);
  d[0] = t_frame(0, 0) - t_frame(0, 1) - t_frame(0, 2);
  d[1] = t_frame(1, 1) - t_frame(0, 1) - t_frame(1, 2);
  d[2] = t_frame(2, 2) - t_frame(0, 2) - t_frame(1, 2);
  return d;
}

inline VariantCConstants variant_c_recipe(const PannModel& m, const IdentitySlate& id,
                                          const std::vector<double>& gr) {
  Mat3 S = Mat3::zero();
  for (std::size_t s = 0; s < gr.size(); ++s) S += gr[s] * id.gen[s];
  const Mat3 R = m.frame.matrix();
  const Mat3 t_frame = transpose(R) * (-1.0 * S) * R;
  const auto d = chat_projection_coordinates(t_frame);
  VariantCConstants out;
  double qsum = 0;
  for (int i = 0; i < 6; ++i) {
    out.p[i] = 0.5 * relu(d[i]);
    out.q[i] = 0.5 * relu(-d[i]);
    qsum += out.q[i];
  }
  out.r = -2.0 * qsum;
  return out;
}

inline std::vector<double> variant_c_recipe_pullback(const PannModel& m, const IdentitySlate& id,
                                                     const std::vector<double>& gr,
                                                     const std::array<double, 6>& cot_p,
                                                     const std::array<double, 6>& cot_q,
                                                     double cot_r) {
  // recompute the ReLU pattern
  Mat3 S = Mat3::zero();
  for (std::size_t s = 0; s < gr.size(); ++s) S += gr[s] * id.gen[s];
  const Mat3 R = m.frame.matrix();
  const Mat3 t_frame = transpose(R) * (-1.0 * S) * R;
  const auto d = chat_projection_coordinates(t_frame);
  std::array<double, 6> cot_d{};
  for (int i = 0; i < 6; ++i) {
    const double cq = cot_q[i] - 2.0 * cot_r;
    cot_d[i] = (d[i] > 0 ? 0.5 * cot_p[i] : 0.0) - (d[i] < 0 ? 0.5 * cq : 0.0);
  }
  Mat3 mhat = Mat3::zero();
  mhat(0, 0) = cot_d[0];
  mhat(1, 1) = cot_d[1];
  mhat(2, 2) = cot_d[2];
  mhat(0, 1) = mhat(1, 0) = 0.5 * (-cot_d[0] - cot_d[1] + 2.0 * cot_d[3]);
  mhat(0, 2) = mhat(2, 0) = 0.5 * (-cot_d[0] - cot_d[2] + 2.0 * cot_d[4]);
  mhat(1, 2) = mhat(2, 1) = 0.5 * (-cot_d[1] - cot_d[2] + 2.0 * cot_d[5]);
  const Mat3 cot_S = -1.0 * (R * mhat * transpose(R));
  std::vector<double> cg(gr.size(), 0.0);
  for (std::size_t s = 0; s < gr.size(); ++s) cg[s] = ddot(id.gen[s], cot_S);
  return cg;
}

}  // namespace panndetail

/// Re-derives the stress-normalization constants from the current network
/// parameters. Called on build, on load, and at every training step.
inline NormalizationConstants compute_normalization(const PannModel& m) {
  const auto id = panndetail::identity_slate(m);
  const std::vector<double> gr = input_gradient(m.net, id.slate.value);
  NormalizationConstants out;
  switch (m.variant) {
    case Variant::I: {
      auto rec = panndetail::variant_i_recipe(m.group, gr);
      out.slot_coef = std::move(rec.slot_coef);
      out.extra_coef = rec.extra_coef;
      break;
    }
    case Variant::Istar:
    case Variant::Cstar: {
      Mat3 S = Mat3::zero();
      for (std::size_t s = 0; s < gr.size(); ++s) S += gr[s] * id.gen[s];
      out.projection = 0.5 * S;
      break;
    }
    case Variant::C: {
      const auto c = panndetail::variant_c_recipe(m, id, gr);
      out.p = c.p;
      out.q = c.q;
      out.r = c.r;
      break;
    }
  }
  return out;
}

inline double parameter_count(const PannModel& m) { return m.net.spec.param_count(); }

inline std::vector<int> default_hidden(Variant v) {
  return variant_is_symmetrized(v) ? std::vector<int>{8, 8, 8} : std::vector<int>{16, 16};
}

inline PannModel build(Variant variant, GroupId group, const PreferredFrame& frame,
                       std::vector<int> hidden, std::uint64_t seed, double alpha = 1e-5,
                       bool reparametrize = false) {
  frame.validate();
  if (!(alpha > 0)) throw InvalidParams("build: growth coefficient must be positive");
  if (variant == Variant::I && group == GroupId::Tri)
    throw UnsupportedGroup("build: no structural-tensor polyconvex basis for the triclinic group; "
                           "use the symmetrized variant");
  PannModel m;
  m.variant = variant;
  m.group = group;
  m.frame = frame;
  m.alpha = alpha;
  m.seed = seed;
  if (variant_is_symmetrized(variant)) m.rotations = group_elements(group, frame);
  ArchitectureSpec spec;
  spec.input_width = model_slate_size(variant, group);
  spec.hidden = hidden.empty() ? default_hidden(variant) : std::move(hidden);
  spec.constraint = variant == Variant::I || variant == Variant::C ? Constraint::ConvexMonotone
                    : variant == Variant::Cstar                    ? Constraint::Convex
                                                                   : Constraint::Unconstrained;
  m.net = init(spec, seed, reparametrize);
  m.norm = compute_normalization(m);
  return m;
}

namespace panndetail {

inline double stress_term_value(const PannModel& m, const SlotEval& slate, const Mat3& C,
                                const Mat3& G, const Mat3& Q) {
  switch (m.variant) {
    case Variant::I: {
      double v = 0;
      for (std::size_t s = 0; s < slate.size(); ++s) v += m.norm.slot_coef[s] * slate.value[s];
      if (m.group == GroupId::Mon && m.norm.extra_coef != 0.0)
        v += m.norm.extra_coef * ddot(G, mon_extra_tensor(m.frame));
      return v;
    }
    case Variant::Istar:
      return -(ddot(m.norm.projection, C) - trace(m.norm.projection));
    case Variant::Cstar:
      return -(ddot(m.norm.projection, Q * C * transpose(Q)) - trace(m.norm.projection));
    case Variant::C: {
      double v = m.norm.r * slate.value[12];
      for (int i = 0; i < 6; ++i)
        v += m.norm.p[i] * slate.value[i] + m.norm.q[i] * slate.value[6 + i];
      return v;
    }
  }
  return 0;
}

}  // namespace panndetail

inline double potential(const PannModel& m, const Mat3& F) {
  const KinematicBundle kb = bundle(F);
  const auto& rots = model_rotations(m);
  const double w = 1.0 / static_cast<double>(rots.size());
  NetWorkspace ws;
  double out = growth(kb.J, m.alpha);
  for (const Mat3& Q : rots) {
    const SlotEval slate = model_slate(m, kb.C, kb.G, kb.J, Q);
    out += w * (forward(m.net, slate.value, ws) +
                panndetail::stress_term_value(m, slate, kb.C, kb.G, Q));
  }
  return out;
}

inline Mat3 stress(const PannModel& m, const Mat3& F) {
  const KinematicBundle kb = bundle(F);
  const auto& rots = model_rotations(m);
  const double w = 1.0 / static_cast<double>(rots.size());
  Mat3 P = growth_dJ(kb.J, m.alpha) * kb.H;
  for (const Mat3& Q : rots) {
    const SlotEval slate = model_slate(m, kb.C, kb.G, kb.J, Q);
    const std::vector<double> gr = input_gradient(m.net, slate.value);
    Mat3 dpsi_dC = Mat3::zero();
    double dpsi_dJ = 0;
    for (std::size_t s = 0; s < slate.size(); ++s) {
      double coef = gr[s];
      if (m.variant == Variant::I) coef += m.norm.slot_coef[s];
      if (m.variant == Variant::C)
        coef += s < 6 ? m.norm.p[s] : (s < 12 ? m.norm.q[s - 6] : (s == 12 ? m.norm.r : 0.0));
      dpsi_dC += coef * slate.dC[s];
      dpsi_dJ += coef * slate.dJ[s];
    }
    if (m.variant == Variant::I && m.group == GroupId::Mon && m.norm.extra_coef != 0.0)
      dpsi_dC += m.norm.extra_coef * tensor_cross(kb.C, panndetail::mon_extra_tensor(m.frame));
    if (m.variant == Variant::Istar) dpsi_dC -= m.norm.projection;
    if (m.variant == Variant::Cstar)
      dpsi_dC -= transpose(Q) * m.norm.projection * Q;
    P += w * (2.0 * (F * dpsi_dC) + dpsi_dJ * kb.H);
  }
  return P;
}

/// Elasticity tangent A = dP/dF by central differences of the analytic
/// stress, step 1e-6 (1 + ||F||).
inline Tensor4 tangent(const PannModel& m, const Mat3& F) {
  const double h = 1e-6 * (1.0 + frobenius_norm(F));
  Tensor4 a;
  for (int j = 0; j < 3; ++j)
    for (int q = 0; q < 3; ++q) {
      Mat3 fp = F, fm = F;
      fp(j, q) += h;
      fm(j, q) -= h;
      const Mat3 pp = stress(m, fp);
      const Mat3 pm = stress(m, fm);
      for (int i = 0; i < 3; ++i)
        for (int p = 0; p < 3; ++p) a(i, p, j, q) = (pp(i, p) - pm(i, p)) / (2.0 * h);
    }
  return a;
}

}  // namespace polyaniso
