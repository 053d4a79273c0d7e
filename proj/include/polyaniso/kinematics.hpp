// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#pragma once

#include "polyaniso/errors.hpp"
#include "polyaniso/mat3.hpp"

namespace polyaniso {

/// Cofactor by closed-form complementary 2x2 minors. Defined for all A,
/// including singular ones; for invertible A equals det(A) A^{-T}.
inline Mat3 cofactor(const Mat3& m) {
  Mat3 c;
  c(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  c(0, 1) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  c(0, 2) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  c(1, 0) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  c(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  c(1, 2) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  c(2, 0) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  c(2, 1) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  c(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return c;
}

/// Tensor cross product (A x B)_{iI} = E_{ijk} E_{IJK} A_{jJ} B_{kK}.
/// Bilinear and symmetric in (A, B); (1/2) F x F = cof F.
inline Mat3 tensor_cross(const Mat3& x, const Mat3& y) {
  static constexpr int tri[3][2] = {{1, 2}, {2, 0}, {0, 1}};
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < 3; ++p) {
      const int j = tri[i][0], k = tri[i][1];
      const int q = tri[p][0], s = tri[p][1];
      r(i, p) = x(j, q) * y(k, s) - x(j, s) * y(k, q) - x(k, q) * y(j, s) + x(k, s) * y(j, q);
    }
  return r;
}

/// F together with the derived strain measures used by every invariant.
struct KinematicBundle {
  Mat3 F;    // deformation gradient
  Mat3 C;    // F^T F
  Mat3 H;    // cof F
  Mat3 G;    // cof C = H^T H
  double J;  // det F
};

inline KinematicBundle bundle(const Mat3& F) {
  const double J = det(F);
  if (!(J > 0.0))
    throw NonPositiveJacobian("bundle: det F = " + std::to_string(J) + " <= 0");
  KinematicBundle kb;
  kb.F = F;
  kb.C = sym(transpose(F) * F);
  kb.H = cofactor(F);
  kb.G = sym(cofactor(kb.C));
  kb.J = J;
  return kb;
}

/// The extended polyconvexity arguments xi = (F, H, J), treated as 19
/// independent reals.
struct ExtendedArgs {
  Mat3 F;
  Mat3 H;
  double J = 1.0;
};

inline ExtendedArgs extended_args(const KinematicBundle& kb) { return {kb.F, kb.H, kb.J}; }

}  // namespace polyaniso
