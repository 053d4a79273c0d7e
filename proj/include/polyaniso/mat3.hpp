// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#pragma once

#include <array>
#include <cmath>
#include <initializer_list>

namespace polyaniso {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

// Dense 3x3 tensor, row-major.
struct Mat3 {
  std::array<double, 9> a{};

  double& operator()(int i, int j) { return a[3 * i + j]; }
  double operator()(int i, int j) const { return a[3 * i + j]; }

  static Mat3 zero() { return Mat3{}; }
  static Mat3 identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }
  static Mat3 diag(double x, double y, double z) {
    Mat3 m;
    m(0, 0) = x;
    m(1, 1) = y;
    m(2, 2) = z;
    return m;
  }

  Mat3& operator+=(const Mat3& o) {
    for (int k = 0; k < 9; ++k) a[k] += o.a[k];
    return *this;
  }
  Mat3& operator-=(const Mat3& o) {
    for (int k = 0; k < 9; ++k) a[k] -= o.a[k];
    return *this;
  }
  Mat3& operator*=(double s) {
    for (int k = 0; k < 9; ++k) a[k] *= s;
    return *this;
  }
};

inline Mat3 operator+(Mat3 x, const Mat3& y) { return x += y; }
inline Mat3 operator-(Mat3 x, const Mat3& y) { return x -= y; }
inline Mat3 operator*(double s, Mat3 x) { return x *= s; }

inline Mat3 operator*(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j) + x(i, 2) * y(2, j);
  return r;
}

inline Vec3 operator*(const Mat3& x, const Vec3& v) {
  Vec3 r{};
  for (int i = 0; i < 3; ++i) r[i] = x(i, 0) * v[0] + x(i, 1) * v[1] + x(i, 2) * v[2];
  return r;
}

inline Mat3 transpose(const Mat3& x) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = x(j, i);
  return r;
}

inline Mat3 sym(const Mat3& x) { return 0.5 * (x + transpose(x)); }

inline Mat3 outer(const Vec3& u, const Vec3& v) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = u[i] * v[j];
  return r;
}

inline double trace(const Mat3& x) { return x(0, 0) + x(1, 1) + x(2, 2); }

inline double det(const Mat3& x) {
  return x(0, 0) * (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) -
         x(0, 1) * (x(1, 0) * x(2, 2) - x(1, 2) * x(2, 0)) +
         x(0, 2) * (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0));
}

// Full contraction A : B = A_ij B_ij.
inline double ddot(const Mat3& x, const Mat3& y) {
  double s = 0;
  for (int k = 0; k < 9; ++k) s += x.a[k] * y.a[k];
  return s;
}

inline double frobenius_norm(const Mat3& x) { return std::sqrt(ddot(x, x)); }

inline double max_abs(const Mat3& x) {
  double m = 0;
  for (double v : x.a) m = std::max(m, std::abs(v));
  return m;
}

inline bool all_finite(const Mat3& x) {
  for (double v : x.a)
    if (!std::isfinite(v)) return false;
  return true;
}

// Fourth-order tensor, row-major quadruple index (i, a, j, b).
struct Tensor4 {
  std::array<double, 81> a{};
  double& operator()(int i, int p, int j, int q) { return a[((i * 3 + p) * 3 + j) * 3 + q]; }
  double operator()(int i, int p, int j, int q) const { return a[((i * 3 + p) * 3 + j) * 3 + q]; }

  Tensor4& operator+=(const Tensor4& o) {
    for (int k = 0; k < 81; ++k) a[k] += o.a[k];
    return *this;
  }
  Tensor4& operator*=(double s) {
    for (double& v : a) v *= s;
    return *this;
  }
};

inline double max_abs(const Tensor4& x) {
  double m = 0;
  for (double v : x.a) m = std::max(m, std::abs(v));
  return m;
}

// M : A contraction over the trailing pair.
inline Mat3 contract(const Tensor4& m, const Mat3& x) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < 3; ++p) {
      double s = 0;
      for (int j = 0; j < 3; ++j)
        for (int q = 0; q < 3; ++q) s += m(i, p, j, q) * x(j, q);
      r(i, p) = s;
    }
  return r;
}

struct SymEigen {
  Vec3 values;  // ascending
  Mat3 vectors; // columns are eigenvectors
};

// Cyclic Jacobi iteration for a symmetric 3x3 matrix.
inline SymEigen sym_eigen(const Mat3& m_in) {
  Mat3 m = sym(m_in);
  Mat3 v = Mat3::identity();
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = std::sqrt(m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2));
    if (off < 1e-300 || off < 1e-16 * (std::abs(m(0, 0)) + std::abs(m(1, 1)) + std::abs(m(2, 2)) + 1e-300))
      break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (m(p, q) == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Mat3 r = Mat3::identity();
        r(p, p) = c;
        r(q, q) = c;
        r(p, q) = s;
        r(q, p) = -s;
        m = transpose(r) * m * r;
        m = sym(m);
        v = v * r;
      }
  }
  // sort ascending
  std::array<int, 3> idx = {0, 1, 2};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (m(idx[j], idx[j]) < m(idx[i], idx[i])) std::swap(idx[i], idx[j]);
  SymEigen e;
  Mat3 vs;
  for (int k = 0; k < 3; ++k) {
    e.values[k] = m(idx[k], idx[k]);
    for (int i = 0; i < 3; ++i) vs(i, k) = v(i, idx[k]);
  }
  e.vectors = vs;
  return e;
}

}  // namespace polyaniso
