// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "polyaniso/pann.hpp"
#include "polyaniso/relations.hpp"

namespace polyaniso {

/// Constitutive response bundled as closures so analytic materials and PANN
/// models run through the same certification machinery.
struct Material {
  std::function<double(const Mat3&)> potential;
  std::function<Mat3(const Mat3&)> stress;
  std::function<Tensor4(const Mat3&)> tangent;
};

/// Central FD tangent of an analytic stress, step 1e-6 (1 + ||F||).
template <class StressFn>
Tensor4 tangent_fd(StressFn&& stress_fn, const Mat3& F) {
  const double h = 1e-6 * (1.0 + frobenius_norm(F));
  Tensor4 a;
  for (int j = 0; j < 3; ++j)
    for (int q = 0; q < 3; ++q) {
      Mat3 fp = F, fm = F;
      fp(j, q) += h;
      fm(j, q) -= h;
      const Mat3 pp = stress_fn(fp);
      const Mat3 pm = stress_fn(fm);
      for (int i = 0; i < 3; ++i)
        for (int p = 0; p < 3; ++p) a(i, p, j, q) = (pp(i, p) - pm(i, p)) / (2.0 * h);
    }
  return a;
}

/// Central FD stress of a potential, step 1e-5 (1 + ||F||).
template <class PotentialFn>
Mat3 stress_fd(PotentialFn&& potential_fn, const Mat3& F) {
  const double h = 1e-5 * (1.0 + frobenius_norm(F));
  Mat3 p;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Mat3 fp = F, fm = F;
      fp(i, j) += h;
      fm(i, j) -= h;
      p(i, j) = (potential_fn(fp) - potential_fn(fm)) / (2.0 * h);
    }
  return p;
}

inline Material material_from_model(const PannModel& m) {
  Material mat;
  mat.potential = [m](const Mat3& F) { return potential(m, F); };
  mat.stress = [m](const Mat3& F) { return stress(m, F); };
  mat.tangent = [m](const Mat3& F) { return tangent(m, F); };
  return mat;
}

/// W = C_12: the textbook non-elliptic invariant. Tangent is exact.
inline Material c12_material() {
  Material mat;
  mat.potential = [](const Mat3& F) {
    return F(0, 0) * F(0, 1) + F(1, 0) * F(1, 1) + F(2, 0) * F(2, 1);
  };
  mat.stress = [](const Mat3& F) {
    Mat3 p = Mat3::zero();
    for (int i = 0; i < 3; ++i) {
      p(i, 0) = F(i, 1);
      p(i, 1) = F(i, 0);
    }
    return p;
  };
  mat.tangent = [](const Mat3&) {
    Tensor4 a;
    for (int i = 0; i < 3; ++i) {
      a(i, 0, i, 1) = 1.0;
      a(i, 1, i, 0) = 1.0;
    }
    return a;
  };
  return mat;
}

/// W = mu/2 ||F||^2, with exact tangent A_{iajb} = mu d_ij d_ab.
inline Material quadratic_frobenius_material(double mu) {
  Material mat;
  mat.potential = [mu](const Mat3& F) { return 0.5 * mu * ddot(F, F); };
  mat.stress = [mu](const Mat3& F) { return mu * F; };
  mat.tangent = [mu](const Mat3&) {
    Tensor4 a;
    for (int i = 0; i < 3; ++i)
      for (int p = 0; p < 3; ++p) a(i, p, i, p) = mu;
    return a;
  };
  return mat;
}

/// (a (x) b) : A : (a (x) b) at raw (not normalized) probe vectors.
inline double rank_one_contraction(const Tensor4& a, const Vec3& va, const Vec3& vb) {
  double s = 0;
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < 3; ++p)
      for (int j = 0; j < 3; ++j)
        for (int q = 0; q < 3; ++q) s += va[i] * vb[p] * a(i, p, j, q) * va[j] * vb[q];
  return s;
}

inline std::vector<Vec3> fibonacci_sphere(int n) {
  std::vector<Vec3> out;
  out.reserve(n);
  const double ga = M_PI * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.push_back({r * std::cos(ga * k), r * std::sin(ga * k), z});
  }
  return out;
}

struct AcousticMin {
  double min_eig = 0.0;
  Vec3 direction{0, 0, 1};   // propagation direction achieving the minimum
  Vec3 polarization{1, 0, 0};
};

/// min over a Fibonacci direction grid of the smallest eigenvalue of the
/// symmetrized acoustic tensor Q(a)_ij = A_{i alpha j beta} a_alpha a_beta.
inline AcousticMin acoustic_min_eigenvalue(const Tensor4& a, int n_directions) {
  AcousticMin best;
  bool first = true;
  for (const Vec3& d : fibonacci_sphere(n_directions)) {
    Mat3 q;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int p = 0; p < 3; ++p)
          for (int r = 0; r < 3; ++r) s += a(i, p, j, r) * d[p] * d[r];
        q(i, j) = s;
      }
    const SymEigen e = sym_eigen(q);
    if (first || e.values[0] < best.min_eig) {
      first = false;
      best.min_eig = e.values[0];
      best.direction = d;
      for (int i = 0; i < 3; ++i) best.polarization[i] = e.vectors(i, 0);
    }
  }
  return best;
}

struct EllipticityReport {
  std::vector<Mat3> F;
  std::vector<double> min_eig;          // per F, scaled by nothing (raw eigenvalue)
  std::vector<double> tangent_norm;     // per F, ||A||_inf
  std::vector<bool> non_elliptic;
  std::vector<Vec3> direction;          // witness propagation direction
  std::vector<Vec3> polarization;       // witness polarization
  double tolerance = 1e-5;
  int non_elliptic_count = 0;
};

/// Scans the acoustic tensor over deformation states; a point is flagged
/// non-elliptic when the minimal eigenvalue falls below -tol ||A||_inf (the
/// scaling keeps FD tangent noise from producing spurious flags).
inline EllipticityReport ellipticity_scan(const Material& mat, const std::vector<Mat3>& Fs,
                                          int n_directions = 512, double tol = 1e-5) {
  EllipticityReport rep;
  rep.tolerance = tol;
  for (const Mat3& F : Fs) {
    if (!(det(F) > 0)) throw NonPositiveJacobian("ellipticity_scan: det F <= 0");
    const Tensor4 a = mat.tangent(F);
    const AcousticMin am = acoustic_min_eigenvalue(a, n_directions);
    const double anorm = max_abs(a);
    const bool bad = am.min_eig < -tol * std::max(anorm, 1e-300);
    rep.F.push_back(F);
    rep.min_eig.push_back(am.min_eig);
    rep.tangent_norm.push_back(anorm);
    rep.non_elliptic.push_back(bad);
    rep.direction.push_back(am.direction);
    rep.polarization.push_back(am.polarization);
    rep.non_elliptic_count += bad ? 1 : 0;
  }
  return rep;
}

struct ProbeReport {
  bool pass = true;
  bool informational = false;  // variant without structural polyconvexity
  int gradient_violations = 0;
  int network_convexity_violations = 0;
  int slot_convexity_violations = 0;
  std::string witness;
};

/// Samples the sufficient conditions behind the polyconvex construction:
/// non-negative network input-partials, network midpoint convexity, and
/// midpoint convexity of every invariant slot in the extended arguments.
inline ProbeReport polyconvexity_probe(const PannModel& m, int n_samples, double tol,
                                       std::uint64_t seed) {
  ProbeReport rep;
  rep.informational = !variant_is_polyconvex(m.variant);
  Rng rng(seed);
  auto random_args = [&](double spread) {
    ExtendedArgs xa;
    for (int k = 0; k < 9; ++k) {
      xa.F.a[k] = rng.uniform(-spread, spread);
      xa.H.a[k] = rng.uniform(-spread, spread);
    }
    xa.J = rng.uniform(-2.0, 2.0);
    return xa;
  };

  auto slate_of = [&](const Mat3& F) {
    const KinematicBundle kb = bundle(F);
    return model_slate(m, kb.C, kb.G, kb.J, Mat3::identity());
  };

  for (int s = 0; s < n_samples && rep.pass; ++s) {
    // (a) monotonicity of the network in its inputs
    const Mat3 F = detail::random_F(rng, 0.5, 2.0);
    const SlotEval slate = slate_of(F);
    const auto grad = input_gradient(m.net, slate.value);
    for (std::size_t k = 0; k < grad.size(); ++k)
      if (grad[k] < -tol) {
        ++rep.gradient_violations;
        rep.witness = "input partial " + std::to_string(k) + " = " + std::to_string(grad[k]);
        if (!rep.informational) rep.pass = false;
        break;
      }
    // (b) midpoint convexity of the network between two reachable slates
    const SlotEval s2 = slate_of(detail::random_F(rng, 0.5, 2.0));
    std::vector<double> mid(slate.value.size());
    for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = 0.5 * (slate.value[k] + s2.value[k]);
    const double fm = forward(m.net, mid);
    const double fa = forward(m.net, slate.value);
    const double fb = forward(m.net, s2.value);
    const double scale = std::max({1.0, std::abs(fa), std::abs(fb)});
    if (fm > 0.5 * (fa + fb) + tol * scale) {
      ++rep.network_convexity_violations;
      rep.witness = "network midpoint convexity violated by " +
                    std::to_string(fm - 0.5 * (fa + fb));
      if (!rep.informational) rep.pass = false;
    }
  }

  // (c) extended-argument midpoint convexity per slot
  if (m.variant == Variant::I || m.variant == Variant::C) {
    const BasisKind kind = m.variant == Variant::C ? BasisKind::TriclinicChat : BasisKind::Polyconvex;
    const int nslot = model_slate_size(m.variant, m.group);
    for (int s = 0; s < n_samples && rep.pass; ++s) {
      const ExtendedArgs x1 = random_args(1.0);
      const ExtendedArgs x2 = random_args(1.0);
      ExtendedArgs xm;
      for (int k = 0; k < 9; ++k) {
        xm.F.a[k] = 0.5 * (x1.F.a[k] + x2.F.a[k]);
        xm.H.a[k] = 0.5 * (x1.H.a[k] + x2.H.a[k]);
      }
      xm.J = 0.5 * (x1.J + x2.J);
      for (int k = 0; k < nslot; ++k) {
        const double v1 = invariant_extended(m.group, kind, k, x1, m.frame);
        const double v2 = invariant_extended(m.group, kind, k, x2, m.frame);
        const double vm = invariant_extended(m.group, kind, k, xm, m.frame);
        const double scale = std::max({1.0, std::abs(v1), std::abs(v2)});
        if (vm > 0.5 * (v1 + v2) + tol * scale) {
          ++rep.slot_convexity_violations;
          rep.witness = "slot " + std::to_string(k) + " extended midpoint convexity violated";
          rep.pass = false;
          break;
        }
      }
    }
  }
  return rep;
}

struct ConditionEntry {
  std::string name;
  bool pass = true;
  bool skipped = false;
  double value = 0.0;  // measured worst error / margin
  double tol = 0.0;
  std::string detail;
};

struct ConditionReport {
  std::vector<ConditionEntry> entries;
  bool pass = true;

  const ConditionEntry* find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }
};

struct ConditionOptions {
  const RotationSet* symmetry = nullptr;  // material symmetry rotations, when finite
  double star = 1.0;
  double growth_alpha = 0.0;  // margin coefficient; 0 = plain monotone check
  int n_objectivity = 25;
  int n_fd = 100;
  std::uint64_t seed = 7;
};

namespace diagdetail {

inline Mat3 random_rotation(Rng& rng) {
  // Rodrigues from a random axis and angle
  Vec3 u{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  const double n = norm(u);
  if (n < 1e-8) u = {1, 0, 0};
  else u = (1.0 / n) * u;
  const double th = rng.uniform(0.0, 2.0 * M_PI);
  const Mat3 k = outer(u, u);
  Mat3 w = Mat3::zero();
  w(0, 1) = -u[2];
  w(0, 2) = u[1];
  w(1, 0) = u[2];
  w(1, 2) = -u[0];
  w(2, 0) = -u[1];
  w(2, 1) = u[0];
  return std::cos(th) * Mat3::identity() + std::sin(th) * w + (1.0 - std::cos(th)) * k;
}

}  // namespace diagdetail

/// Runs the constitutive condition checks on a material: objectivity,
/// material symmetry (when a rotation set is supplied), stress
/// normalization, growth trend, and analytic-vs-FD stress consistency.
inline ConditionReport condition_suite(const Material& mat, const ConditionOptions& opt) {
  ConditionReport rep;
  Rng rng(opt.seed);
  {
    ConditionEntry e;
    e.name = "objectivity";
    e.tol = 1e-10;
    for (int s = 0; s < opt.n_objectivity; ++s) {
      const Mat3 F = detail::random_F(rng, 0.5, 2.0);
      const Mat3 R = diagdetail::random_rotation(rng);
      const double w0 = mat.potential(F);
      const double w1 = mat.potential(R * F);
      e.value = std::max(e.value, std::abs(w1 - w0) / std::max(1.0, std::abs(w0)));
    }
    e.pass = e.value <= e.tol;
    rep.entries.push_back(e);
  }
  {
    ConditionEntry e;
    e.name = "material_symmetry";
    e.tol = 1e-10;
    if (!opt.symmetry) {
      e.skipped = true;
      e.detail = "no finite rotation set supplied";
    } else {
      for (int s = 0; s < opt.n_objectivity; ++s) {
        const Mat3 F = detail::random_F(rng, 0.5, 2.0);
        const double w0 = mat.potential(F);
        for (std::size_t k = 0; k < opt.symmetry->elements.size(); ++k) {
          const Mat3& Q = opt.symmetry->elements[k];
          const double w1 = mat.potential(F * transpose(Q));
          const double err = std::abs(w1 - w0) / std::max(1.0, std::abs(w0));
          if (err > e.value) {
            e.value = err;
            e.detail = "worst element " + std::to_string(k);
          }
        }
      }
      e.pass = e.value <= e.tol;
    }
    rep.entries.push_back(e);
  }
  {
    ConditionEntry e;
    e.name = "stress_normalization";
    e.tol = 1e-8 * opt.star;
    e.value = max_abs(mat.stress(Mat3::identity()));
    e.pass = e.value <= e.tol;
    rep.entries.push_back(e);
  }
  {
    ConditionEntry e;
    e.name = "growth_trend";
    const double w1 = mat.potential(Mat3::identity());
    bool ok = true;
    double worst_margin = 0;
    for (double J : {1e-2, 1e-3}) {
      const double s = std::cbrt(J);
      const double wj = mat.potential(Mat3::diag(s, s, s));
      const double t = J + 1.0 / J - 2.0;
      const double margin = 0.5 * opt.growth_alpha * t * t;
      const double got = wj - w1;
      worst_margin = std::min(worst_margin, got - margin);
      ok = ok && got >= margin;
    }
    e.value = worst_margin;
    e.pass = ok;
    rep.entries.push_back(e);
  }
  {
    ConditionEntry e;
    e.name = "fd_stress_consistency";
    e.tol = 1e-6;
    for (int s = 0; s < opt.n_fd; ++s) {
      const Mat3 F = detail::random_F(rng, 0.5, 2.0);
      const Mat3 pa = mat.stress(F);
      const Mat3 pf = stress_fd(mat.potential, F);
      e.value = std::max(e.value, frobenius_norm(pa - pf) / std::max(1.0, frobenius_norm(pf)));
    }
    e.pass = e.value <= e.tol;
    rep.entries.push_back(e);
  }
  for (const auto& e : rep.entries) rep.pass = rep.pass && (e.pass || e.skipped);
  return rep;
}

inline ConditionReport condition_suite(const PannModel& m, std::uint64_t seed = 7) {
  ConditionOptions opt;
  opt.seed = seed;
  opt.growth_alpha = 0.0;  // the alpha-margin form is exercised by the growth property tests
  RotationSet rs;
  if (variant_is_symmetrized(m.variant)) {
    rs = m.rotations;
    opt.symmetry = &rs;
  } else if (m.group == GroupId::Tet || m.group == GroupId::Cub) {
    rs = group_elements(m.group, m.frame);
    opt.symmetry = &rs;
  }
  return condition_suite(material_from_model(m), opt);
}

}  // namespace polyaniso
