// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "polyaniso/diagnostics.hpp"
#include "polyaniso/rng.hpp"

namespace polyaniso {

/// Analytic ground-truth materials. The cubic reference is built so that
/// its stress vanishes identically at F = I: the coefficient of the ln J
/// term is exactly the sum the quadratic projections produce there.
struct ReferenceMaterial {
  enum class Kind { NeoHooke, CubicReference };
  Kind kind = Kind::CubicReference;
  double mu = 1.0;
  double lambda = 1.0;
  double kappa = 0.5;  // cubic projection stiffness
  PreferredFrame frame;

  static ReferenceMaterial neo_hooke(double E, double nu) {
    if (!(E > 0) || !(nu > 0 && nu < 0.5)) throw InvalidParams("neo_hooke: need E > 0, 0 < nu < 0.5");
    ReferenceMaterial m;
    m.kind = Kind::NeoHooke;
    m.mu = E / (2.0 * (1.0 + nu));
    m.lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    m.kappa = 0;
    return m;
  }

  static ReferenceMaterial cubic_reference(double mu, double kappa, double lambda,
                                           const PreferredFrame& frame = PreferredFrame::standard()) {
    if (!(mu > 0 && kappa > 0 && lambda > 0))
      throw InvalidParams("cubic_reference: need mu, kappa, lambda > 0");
    ReferenceMaterial m;
    m.kind = Kind::CubicReference;
    m.mu = mu;
    m.kappa = kappa;
    m.lambda = lambda;
    m.frame = frame;
    return m;
  }

  std::string describe() const {
    if (kind == Kind::NeoHooke)
      return "neohooke(mu=" + std::to_string(mu) + ",lambda=" + std::to_string(lambda) + ")";
    return "cubicref(mu=" + std::to_string(mu) + ",kappa=" + std::to_string(kappa) +
           ",lambda=" + std::to_string(lambda) + ")";
  }
};

inline double reference_potential(const ReferenceMaterial& m, const Mat3& F) {
  const KinematicBundle kb = bundle(F);
  const double i1 = trace(kb.C);
  if (m.kind == ReferenceMaterial::Kind::NeoHooke) {
    const double i3 = det(kb.C);
    return 0.5 * (m.mu * (i1 - std::log(i3)) + 0.5 * m.lambda * (i3 - std::log(i3)));
  }
  double i1cub = 0;
  for (int i = 0; i < 3; ++i) {
    const double ci = ddot(kb.C, outer(m.frame.axis(i), m.frame.axis(i)));
    i1cub += ci * ci;
  }
  return 0.5 * m.mu * (i1 - 3.0) + 0.5 * m.kappa * (i1cub - 3.0) -
         (m.mu + 2.0 * m.kappa) * std::log(kb.J) + 0.5 * m.lambda * (kb.J - 1.0) * (kb.J - 1.0);
}

inline Mat3 reference_stress(const ReferenceMaterial& m, const Mat3& F) {
  const KinematicBundle kb = bundle(F);
  if (m.kind == ReferenceMaterial::Kind::NeoHooke) {
    return m.mu * (F - (1.0 / kb.J) * kb.H) +
           0.5 * m.lambda * (kb.J - 1.0 / kb.J) * kb.H;
  }
  Mat3 mc = Mat3::zero();  // M : C
  for (int i = 0; i < 3; ++i) {
    const Mat3 a = outer(m.frame.axis(i), m.frame.axis(i));
    mc += ddot(kb.C, a) * a;
  }
  return m.mu * F + 2.0 * m.kappa * (F * mc) - ((m.mu + 2.0 * m.kappa) / kb.J) * kb.H +
         m.lambda * (kb.J - 1.0) * kb.H;
}

inline Material material_from_reference(const ReferenceMaterial& m) {
  Material mat;
  mat.potential = [m](const Mat3& F) { return reference_potential(m, F); };
  mat.stress = [m](const Mat3& F) { return reference_stress(m, F); };
  mat.tangent = [m](const Mat3& F) {
    return tangent_fd([m](const Mat3& f) { return reference_stress(m, f); }, F);
  };
  return mat;
}

// ---------------------------------------------------------------------------

struct PathSpec {
  enum class Kind { Uniaxial, SimpleShear, MixedShearTension, RandomF };
  Kind kind = Kind::Uniaxial;
  int count = 100;
  double lo = 0.7, hi = 1.3;          // stretch range (or shear range)
  double gamma_lo = -0.2, gamma_hi = 0.2;  // mixed test only
  double j_lo = 0.5, j_hi = 1.6;      // RandomF determinant bounds
  std::string split;                 // "", "cal" or "test"

  static PathSpec uniaxial(int count, double lo = 0.7, double hi = 1.3) {
    PathSpec p;
    p.kind = Kind::Uniaxial;
    p.count = count;
    p.lo = lo;
    p.hi = hi;
    return p;
  }
  static PathSpec simple_shear(int count, double lo = -0.3, double hi = 0.3) {
    PathSpec p;
    p.kind = Kind::SimpleShear;
    p.count = count;
    p.lo = lo;
    p.hi = hi;
    return p;
  }
  static PathSpec mixed(int count, double llo = 0.8, double lhi = 1.2, double glo = -0.2,
                        double ghi = 0.2) {
    PathSpec p;
    p.kind = Kind::MixedShearTension;
    p.count = count;
    p.lo = llo;
    p.hi = lhi;
    p.gamma_lo = glo;
    p.gamma_hi = ghi;
    return p;
  }
  static PathSpec random_f(int count, double jlo = 0.5, double jhi = 1.6) {
    PathSpec p;
    p.kind = Kind::RandomF;
    p.count = count;
    p.j_lo = jlo;
    p.j_hi = jhi;
    return p;
  }
};

inline std::vector<Mat3> sample_paths(const PathSpec& spec, std::uint64_t seed) {
  if (spec.count < 1) throw InvalidParams("sample_paths: count must be >= 1");
  std::vector<Mat3> out;
  out.reserve(spec.count);
  auto ramp = [&](int i) {
    return spec.count == 1 ? 0.5 : static_cast<double>(i) / (spec.count - 1);
  };
  Rng rng(seed);
  for (int i = 0; i < spec.count; ++i) {
    switch (spec.kind) {
      case PathSpec::Kind::Uniaxial: {
        const double l = spec.lo + (spec.hi - spec.lo) * ramp(i);
        out.push_back(Mat3::diag(l, 1.0, 1.0));
        break;
      }
      case PathSpec::Kind::SimpleShear: {
        Mat3 F = Mat3::identity();
        F(0, 1) = spec.lo + (spec.hi - spec.lo) * ramp(i);
        out.push_back(F);
        break;
      }
      case PathSpec::Kind::MixedShearTension: {
        const double t = ramp(i);
        Mat3 F = Mat3::diag(spec.lo + (spec.hi - spec.lo) * t, 1.0, 1.0);
        F(0, 1) = spec.gamma_lo + (spec.gamma_hi - spec.gamma_lo) * t;
        out.push_back(F);
        break;
      }
      case PathSpec::Kind::RandomF: {
        for (int tries = 0; tries < 100000; ++tries) {
          Mat3 F = Mat3::identity();
          for (int k = 0; k < 9; ++k) F.a[k] += rng.uniform(-0.25, 0.25);
          const double j = det(F);
          if (j >= spec.j_lo && j <= spec.j_hi) {
            out.push_back(F);
            break;
          }
        }
        break;
      }
    }
  }
  return out;
}

struct DataRecord {
  Mat3 F;
  Mat3 P;  // in units of the stress scale
  std::string split;  // "cal" | "test"
};

struct Dataset {
  std::vector<DataRecord> records;
  double star = 1.0;
  std::string unit = "star";
  std::string material;
  std::uint64_t seed = 0;
  int filtered_out = 0;  // records dropped by the ellipticity filter

  std::vector<const DataRecord*> split_records(const std::string& split) const {
    std::vector<const DataRecord*> out;
    for (const auto& r : records)
      if (r.split == split) out.push_back(&r);
    return out;
  }
  int count(const std::string& split) const {
    int n = 0;
    for (const auto& r : records) n += r.split == split ? 1 : 0;
    return n;
  }
};

/// Evaluates the reference stress along the requested paths. Split
/// assignment: an explicit per-spec tag wins; otherwise the "paths" rule
/// sends uniaxial and shear to calibration and everything else to test.
inline Dataset generate_dataset(const ReferenceMaterial& mat, const std::vector<PathSpec>& specs,
                                const std::string& split_rule, bool ellipticity_filter,
                                std::uint64_t seed) {
  Dataset ds;
  ds.material = mat.describe();
  ds.seed = seed;
  const Material m = material_from_reference(mat);
  Rng base(seed);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const PathSpec& spec = specs[k];
    std::string split = spec.split;
    if (split.empty()) {
      if (split_rule != "paths")
        throw InvalidParams("generate_dataset: unknown split rule '" + split_rule + "'");
      split = (spec.kind == PathSpec::Kind::Uniaxial || spec.kind == PathSpec::Kind::SimpleShear)
                  ? "cal"
                  : "test";
    }
    for (const Mat3& F : sample_paths(spec, base.fork(k).state)) {
      if (ellipticity_filter) {
        const Tensor4 A = m.tangent(F);
        if (acoustic_min_eigenvalue(A, 128).min_eig < -1e-5 * std::max(max_abs(A), 1.0)) {
          ++ds.filtered_out;
          continue;
        }
      }
      ds.records.push_back(DataRecord{F, reference_stress(mat, F), split});
    }
  }
  if (ds.count("cal") < 1) throw EmptyDataset("generate_dataset: no calibration records");
  return ds;
}

}  // namespace polyaniso
