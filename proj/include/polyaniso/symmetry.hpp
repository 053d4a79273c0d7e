// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "polyaniso/errors.hpp"
#include "polyaniso/mat3.hpp"

namespace polyaniso {

enum class GroupId { Iso, Ti, Tri, Mon, Rho, Tet, Cub };

inline std::string to_string(GroupId g) {
  switch (g) {
    case GroupId::Iso: return "iso";
    case GroupId::Ti: return "ti";
    case GroupId::Tri: return "tri";
    case GroupId::Mon: return "mon";
    case GroupId::Rho: return "rho";
    case GroupId::Tet: return "tet";
    case GroupId::Cub: return "cub";
  }
  return "?";
}

inline GroupId group_from_string(const std::string& s) {
  if (s == "iso") return GroupId::Iso;
  if (s == "ti") return GroupId::Ti;
  if (s == "tri") return GroupId::Tri;
  if (s == "mon") return GroupId::Mon;
  if (s == "rho") return GroupId::Rho;
  if (s == "tet") return GroupId::Tet;
  if (s == "cub") return GroupId::Cub;
  throw UnsupportedGroup("unknown group id '" + s + "'");
}

/// Orthonormal right-handed triad of preferred material directions.
struct PreferredFrame {
  Vec3 n1{1, 0, 0};
  Vec3 n2{0, 1, 0};
  Vec3 n3{0, 0, 1};

  static PreferredFrame standard() { return PreferredFrame{}; }

  Vec3 axis(int i) const { return i == 0 ? n1 : (i == 1 ? n2 : n3); }

  // columns are n1, n2, n3
  Mat3 matrix() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i) {
      r(i, 0) = n1[i];
      r(i, 1) = n2[i];
      r(i, 2) = n3[i];
    }
    return r;
  }

  void validate(double tol = 1e-12) const {
    const Mat3 r = matrix();
    const Mat3 e = transpose(r) * r - Mat3::identity();
    if (max_abs(e) > tol) throw InvalidParams("preferred frame is not orthonormal");
    if (det(r) < 0) throw InvalidParams("preferred frame is not right-handed");
  }
};

// frame rotated by R: n_i -> R n_i
inline PreferredFrame rotate_frame(const Mat3& r, const PreferredFrame& f) {
  return PreferredFrame{r * f.n1, r * f.n2, r * f.n3};
}

struct RotationSet {
  GroupId group;
  PreferredFrame frame;
  std::vector<Mat3> elements;
};

namespace detail {

inline std::vector<Mat3> cubic_rotations_standard() {
  // proper signed permutation matrices, generated not transcribed
  std::vector<Mat3> out;
  int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (auto& p : perm)
    for (int signs = 0; signs < 8; ++signs) {
      Mat3 q = Mat3::zero();
      for (int i = 0; i < 3; ++i) q(i, p[i]) = (signs >> i) & 1 ? -1.0 : 1.0;
      if (det(q) > 0.5) out.push_back(q);
    }
  return out;
}

inline std::vector<Mat3> tetragonal_rotations_standard() {
  // stabilizer of the 4-fold n3 axis: powers of the quarter turn about n3
  // plus the four in-plane 2-fold axes
  std::vector<Mat3> out;
  Mat3 r90 = Mat3::zero();
  r90(0, 1) = -1;
  r90(1, 0) = 1;
  r90(2, 2) = 1;
  Mat3 q = Mat3::identity();
  for (int k = 0; k < 4; ++k) {
    out.push_back(q);
    q = r90 * q;
  }
  const Vec3 axes[4] = {{1, 0, 0}, {0, 1, 0}, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0},
                        {1 / std::sqrt(2.0), -1 / std::sqrt(2.0), 0}};
  for (const Vec3& u : axes) out.push_back(2.0 * outer(u, u) - Mat3::identity());
  return out;
}

}  // namespace detail

/// Finite rotation subgroup tables. Only the groups needed by the
/// symmetrization machinery are tabulated.
inline RotationSet group_elements(GroupId g, const PreferredFrame& frame) {
  frame.validate();
  std::vector<Mat3> std_elems;
  if (g == GroupId::Cub)
    std_elems = detail::cubic_rotations_standard();
  else if (g == GroupId::Tet)
    std_elems = detail::tetragonal_rotations_standard();
  else
    throw UnsupportedGroup("group_elements: no finite rotation table for '" + to_string(g) + "'");
  const Mat3 r = frame.matrix();
  const Mat3 rt = transpose(r);
  RotationSet rs{g, frame, {}};
  rs.elements.reserve(std_elems.size());
  for (const Mat3& q : std_elems) rs.elements.push_back(r * q * rt);
  return rs;
}

/// Congruence action Q * C = Q C Q^T.
inline Mat3 act_on_C(const Mat3& q, const Mat3& c, double orth_tol = 1e-10) {
  if (max_abs(transpose(q) * q - Mat3::identity()) > orth_tol)
    throw NotOrthogonal("act_on_C: Q^T Q != I");
  return q * c * transpose(q);
}

inline Tensor4 act_on_tensor4(const Mat3& q, const Tensor4& m) {
  Tensor4 r;
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < 3; ++p)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          double s = 0;
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
              for (int c = 0; c < 3; ++c)
                for (int d = 0; d < 3; ++d)
                  s += q(i, a) * q(p, b) * q(j, c) * q(k, d) * m(a, b, c, d);
          r(i, p, j, k) = s;
        }
  return r;
}

struct StructuralTensorSet {
  GroupId group;
  std::vector<Mat3> second_order;
  std::optional<Tensor4> fourth_order;
};

namespace detail {

inline Tensor4 axis_quartic_sum(const PreferredFrame& f, int naxes) {
  Tensor4 m;
  for (int ax = 0; ax < naxes; ++ax) {
    const Vec3 n = f.axis(ax);
    for (int i = 0; i < 3; ++i)
      for (int p = 0; p < 3; ++p)
        for (int j = 0; j < 3; ++j)
          for (int q = 0; q < 3; ++q) m(i, p, j, q) += n[i] * n[p] * n[j] * n[q];
  }
  return m;
}

}  // namespace detail

/// The six projection directions u^(i) of the triclinic construction,
/// with e^(i) replaced by the frame axes.
inline std::array<Vec3, 6> triclinic_directions(const PreferredFrame& f) {
  const double s = 1.0 / std::sqrt(2.0);
  return {f.n1, f.n2, f.n3, s * (f.n1 + f.n2), s * (f.n1 + f.n3), s * (f.n2 + f.n3)};
}

inline StructuralTensorSet structural_tensors(GroupId g, const PreferredFrame& frame,
                                              bool polyconvex_variant) {
  frame.validate();
  StructuralTensorSet s{g, {}, std::nullopt};
  const Mat3 a1 = outer(frame.n1, frame.n1);
  const Mat3 a2 = outer(frame.n2, frame.n2);
  const Mat3 a3 = outer(frame.n3, frame.n3);
  switch (g) {
    case GroupId::Iso:
      return s;  // empty tuple
    case GroupId::Ti:
      s.second_order = {a3};
      return s;
    case GroupId::Tri: {
      if (!polyconvex_variant)
        throw UnsupportedGroup("structural_tensors: triclinic general tensors are not tabulated; "
                               "request the six-direction polyconvex construction");
      for (const Vec3& u : triclinic_directions(frame)) s.second_order.push_back(outer(u, u));
      return s;
    }
    case GroupId::Mon: {
      if (polyconvex_variant) {
        const Vec3 n12 = frame.n1 + frame.n2;
        s.second_order = {a1, outer(n12, n12) + 2.0 * (a1 + a2)};
      } else {
        s.second_order = {a1 - a2, outer(frame.n1, frame.n2) - outer(frame.n2, frame.n1)};
      }
      return s;
    }
    case GroupId::Rho: {
      if (polyconvex_variant)
        s.second_order = {a1, a2};
      else
        s.second_order = {a1 - a2};
      return s;
    }
    case GroupId::Tet:
      s.fourth_order = detail::axis_quartic_sum(frame, 2);
      return s;
    case GroupId::Cub:
      s.fourth_order = detail::axis_quartic_sum(frame, 3);
      return s;
  }
  throw UnsupportedGroup("structural_tensors: unhandled group");
}

struct GroupAxiomReport {
  bool pass = true;
  std::string failure;     // empty when pass
  int witness_i = -1;      // indices of the first counterexample, when any
  int witness_j = -1;
};

/// Checks orthogonality/determinant of the elements, identity membership,
/// closure under products, and inverse membership.
inline GroupAxiomReport verify_group_axioms(const RotationSet& rs, double tol = 1e-12) {
  GroupAxiomReport rep;
  const auto find = [&](const Mat3& q) -> int {
    for (std::size_t k = 0; k < rs.elements.size(); ++k)
      if (max_abs(rs.elements[k] - q) <= 10 * tol) return static_cast<int>(k);
    return -1;
  };
  for (std::size_t i = 0; i < rs.elements.size(); ++i) {
    const Mat3& q = rs.elements[i];
    if (max_abs(transpose(q) * q - Mat3::identity()) > tol || std::abs(det(q) - 1.0) > 10 * tol) {
      rep.pass = false;
      rep.failure = "element " + std::to_string(i) + " is not a proper rotation";
      rep.witness_i = static_cast<int>(i);
      return rep;
    }
  }
  if (find(Mat3::identity()) < 0) {
    rep.pass = false;
    rep.failure = "identity not contained";
    return rep;
  }
  for (std::size_t i = 0; i < rs.elements.size(); ++i) {
    if (find(transpose(rs.elements[i])) < 0) {
      rep.pass = false;
      rep.failure = "inverse of element " + std::to_string(i) + " not contained";
      rep.witness_i = static_cast<int>(i);
      return rep;
    }
    for (std::size_t j = 0; j < rs.elements.size(); ++j) {
      if (find(rs.elements[i] * rs.elements[j]) < 0) {
        rep.pass = false;
        rep.failure = "product of elements " + std::to_string(i) + " and " + std::to_string(j) +
                      " not contained";
        rep.witness_i = static_cast<int>(i);
        rep.witness_j = static_cast<int>(j);
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace polyaniso
