// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#pragma once

#include <gtest/gtest.h>

#include "polyaniso/kinematics.hpp"
#include "polyaniso/rng.hpp"

namespace polyaniso::testing {

inline Mat3 random_F(Rng& rng, double jlo = 0.5, double jhi = 2.0, double spread = 0.4) {
  for (int tries = 0; tries < 100000; ++tries) {
    Mat3 F = Mat3::identity();
    for (int k = 0; k < 9; ++k) F.a[k] += rng.uniform(-spread, spread);
    const double j = det(F);
    if (j >= jlo && j <= jhi) return F;
  }
  ADD_FAILURE() << "random_F rejection sampling failed";
  return Mat3::identity();
}

inline Mat3 random_spd(Rng& rng, double jlo = 0.5, double jhi = 2.0) {
  const Mat3 F = random_F(rng, jlo, jhi);
  return sym(transpose(F) * F);
}

inline void expect_near_mat(const Mat3& a, const Mat3& b, double tol, const char* what = "") {
  EXPECT_LE(max_abs(a - b), tol) << what;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

}  // namespace polyaniso::testing
