// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polyaniso/errors.hpp"
#include "polyaniso/rng.hpp"

namespace polyaniso {

enum class Constraint { Unconstrained, Convex, ConvexMonotone };

inline std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::Unconstrained: return "unconstrained";
    case Constraint::Convex: return "convex";
    case Constraint::ConvexMonotone: return "convex_monotone";
  }
  return "?";
}

inline Constraint constraint_from_string(const std::string& s) {
  if (s == "unconstrained") return Constraint::Unconstrained;
  if (s == "convex") return Constraint::Convex;
  if (s == "convex_monotone") return Constraint::ConvexMonotone;
  throw InvalidParams("unknown constraint '" + s + "'");
}

inline double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }
inline double logistic(double t) { return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t)); }
inline double softplus_inverse(double y) { return y > 30 ? y : std::log(std::expm1(y)); }

/// Dense softplus stack: H >= 1 hidden layers, linear output without bias.
struct ArchitectureSpec {
  int input_width = 1;
  std::vector<int> hidden = {16, 16};
  Constraint constraint = Constraint::Unconstrained;

  int depth() const { return static_cast<int>(hidden.size()); }
  int width_in(int h) const { return h == 0 ? input_width : hidden[h - 1]; }
  int width_out(int h) const { return h == depth() ? 1 : hidden[h]; }

  // Non-negativity applies to every layer for a CMNN and to every layer
  // except the first for an ICNN.
  bool layer_constrained(int h) const {
    if (constraint == Constraint::ConvexMonotone) return true;
    if (constraint == Constraint::Convex) return h >= 1;
    return false;
  }

  int param_count() const {
    int n = 0;
    for (int h = 0; h < depth(); ++h) n += width_out(h) * (width_in(h) + 1);
    return n + hidden.back();
  }

  void validate() const {
    if (input_width < 1 || hidden.empty()) throw InvalidParams("architecture: need input and one hidden layer");
    for (int w : hidden)
      if (w < 1) throw InvalidParams("architecture: widths must be >= 1");
  }
};

/// Raw trainable parameters. Under the reparametrized constraint mode the
/// effective weight of a constrained layer is softplus(raw); in clip mode
/// the raw value is used directly and the optimizer projects to >= 0.
struct NetworkParams {
  ArchitectureSpec spec;
  std::vector<double> raw;
  bool reparametrize = false;
  std::uint64_t seed = 0;

  // flat layout: per hidden layer W (row-major), b; then the output row
  int weight_offset(int h) const {
    int off = 0;
    for (int k = 0; k < h; ++k) off += spec.width_out(k) * (spec.width_in(k) + 1);
    return off;
  }
  int bias_offset(int h) const { return weight_offset(h) + spec.width_out(h) * spec.width_in(h); }
  int output_offset() const { return weight_offset(spec.depth()); }
};

inline NetworkParams init(const ArchitectureSpec& spec, std::uint64_t seed, bool reparametrize = false) {
  spec.validate();
  NetworkParams p;
  p.spec = spec;
  p.reparametrize = reparametrize;
  p.seed = seed;
  p.raw.assign(spec.param_count(), 0.0);
  Rng rng(seed);
  for (int h = 0; h <= spec.depth(); ++h) {
    const int nin = spec.width_in(h);
    const int nout = spec.width_out(h);
    const double scale = 1.0 / std::sqrt(static_cast<double>(nin));
    double* w = p.raw.data() + p.weight_offset(h);
    for (int k = 0; k < nout * nin; ++k) {
      if (spec.layer_constrained(h)) {
        const double eff = (1.0 - rng.uniform()) * scale;  // in (0, scale]
        w[k] = reparametrize ? softplus_inverse(eff) : eff;
      } else {
        w[k] = rng.uniform(-1.0, 1.0) * scale;
      }
    }
    // biases stay zero
  }
  return p;
}

/// Effective (constraint-mapped) parameters, laid out like raw.
inline void effective_params(const NetworkParams& p, std::vector<double>& eff) {
  eff = p.raw;
  if (!p.reparametrize) return;
  for (int h = 0; h <= p.spec.depth(); ++h) {
    if (!p.spec.layer_constrained(h)) continue;
    double* w = eff.data() + p.weight_offset(h);
    const int n = p.spec.width_out(h) * p.spec.width_in(h);
    for (int k = 0; k < n; ++k) w[k] = softplus(w[k]);
  }
}

/// Maps a gradient w.r.t. effective parameters to one w.r.t. raw
/// parameters (chain through the weight reparametrization), in place.
inline void chain_gradient_to_raw(const NetworkParams& p, std::vector<double>& grad) {
  if (!p.reparametrize) return;
  for (int h = 0; h <= p.spec.depth(); ++h) {
    if (!p.spec.layer_constrained(h)) continue;
    const double* w = p.raw.data() + p.weight_offset(h);
    double* g = grad.data() + p.weight_offset(h);
    const int n = p.spec.width_out(h) * p.spec.width_in(h);
    for (int k = 0; k < n; ++k) g[k] *= logistic(w[k]);
  }
}

/// Scratch buffers reused across evaluations.
struct NetWorkspace {
  std::vector<std::vector<double>> z, x, zt, xt, s, st, g, gt;
  std::vector<double> eff;
  bool eff_valid = false;

  void resize(const ArchitectureSpec& spec) {
    const int H = spec.depth();
    auto fit = [&](std::vector<std::vector<double>>& v) {
      v.resize(H);
      for (int h = 0; h < H; ++h) v[h].assign(spec.hidden[h], 0.0);
    };
    fit(z);
    fit(x);
    fit(zt);
    fit(xt);
    fit(s);
    fit(st);
    fit(g);
    fit(gt);
  }
};

namespace netdetail {

inline void check_input(const NetworkParams& p, std::span<const double> xin) {
  if (static_cast<int>(xin.size()) != p.spec.input_width)
    throw DimensionMismatch("network: input length " + std::to_string(xin.size()) + " != " +
                            std::to_string(p.spec.input_width));
}

// forward pass on effective weights; fills ws.z, ws.x
inline double forward_eff(const NetworkParams& p, const double* eff, std::span<const double> xin,
                          NetWorkspace& ws) {
  const auto& spec = p.spec;
  const int H = spec.depth();
  const double* prev = xin.data();
  for (int h = 0; h < H; ++h) {
    const int nin = spec.width_in(h);
    const int nout = spec.width_out(h);
    const double* w = eff + p.weight_offset(h);
    const double* b = eff + p.bias_offset(h);
    for (int i = 0; i < nout; ++i) {
      double acc = b[i];
      const double* row = w + i * nin;
      for (int j = 0; j < nin; ++j) acc += row[j] * prev[j];
      ws.z[h][i] = acc;
      ws.x[h][i] = softplus(acc);
    }
    prev = ws.x[h].data();
  }
  const double* wo = eff + p.output_offset();
  double out = 0;
  for (int i = 0; i < spec.hidden[H - 1]; ++i) out += wo[i] * ws.x[H - 1][i];
  return out;
}

// reverse pass for the input gradient; assumes forward_eff has filled ws
inline void input_gradient_eff(const NetworkParams& p, const double* eff, std::span<const double> xin,
                               NetWorkspace& ws, double* out) {
  const auto& spec = p.spec;
  const int H = spec.depth();
  const double* wo = eff + p.output_offset();
  for (int i = 0; i < spec.hidden[H - 1]; ++i) ws.g[H - 1][i] = wo[i];
  for (int h = H - 1; h >= 0; --h) {
    const int nin = spec.width_in(h);
    const int nout = spec.width_out(h);
    for (int i = 0; i < nout; ++i) ws.s[h][i] = ws.g[h][i] * logistic(ws.z[h][i]);
    const double* w = eff + p.weight_offset(h);
    double* dst = h == 0 ? out : ws.g[h - 1].data();
    for (int j = 0; j < nin; ++j) dst[j] = 0.0;
    for (int i = 0; i < nout; ++i) {
      const double* row = w + i * nin;
      const double si = ws.s[h][i];
      for (int j = 0; j < nin; ++j) dst[j] += row[j] * si;
    }
  }
  (void)xin;
}

}  // namespace netdetail

inline double forward(const NetworkParams& p, std::span<const double> xin, NetWorkspace& ws) {
  netdetail::check_input(p, xin);
  ws.resize(p.spec);
  effective_params(p, ws.eff);
  return netdetail::forward_eff(p, ws.eff.data(), xin, ws);
}

inline double forward(const NetworkParams& p, std::span<const double> xin) {
  NetWorkspace ws;
  return forward(p, xin, ws);
}

inline std::vector<double> input_gradient(const NetworkParams& p, std::span<const double> xin) {
  netdetail::check_input(p, xin);
  NetWorkspace ws;
  ws.resize(p.spec);
  effective_params(p, ws.eff);
  netdetail::forward_eff(p, ws.eff.data(), xin, ws);
  std::vector<double> out(p.spec.input_width, 0.0);
  netdetail::input_gradient_eff(p, ws.eff.data(), xin, ws, out.data());
  return out;
}

/// d value / d raw parameters.
inline std::vector<double> param_gradient_of_value(const NetworkParams& p, std::span<const double> xin) {
  netdetail::check_input(p, xin);
  NetWorkspace ws;
  ws.resize(p.spec);
  effective_params(p, ws.eff);
  const double* eff = ws.eff.data();
  netdetail::forward_eff(p, eff, xin, ws);
  const auto& spec = p.spec;
  const int H = spec.depth();
  std::vector<double> grad(spec.param_count(), 0.0);
  const double* wo = eff + p.output_offset();
  for (int i = 0; i < spec.hidden[H - 1]; ++i) {
    ws.g[H - 1][i] = wo[i];
    grad[p.output_offset() + i] = ws.x[H - 1][i];
  }
  for (int h = H - 1; h >= 0; --h) {
    const int nin = spec.width_in(h);
    const int nout = spec.width_out(h);
    const double* prev = h == 0 ? xin.data() : ws.x[h - 1].data();
    double* gw = grad.data() + p.weight_offset(h);
    double* gb = grad.data() + p.bias_offset(h);
    for (int i = 0; i < nout; ++i) {
      const double si = ws.g[h][i] * logistic(ws.z[h][i]);
      ws.s[h][i] = si;
      gb[i] = si;
      double* grow = gw + i * nin;
      for (int j = 0; j < nin; ++j) grow[j] = si * prev[j];
    }
    if (h > 0) {
      const double* w = eff + p.weight_offset(h);
      for (int j = 0; j < nin; ++j) ws.g[h - 1][j] = 0.0;
      for (int i = 0; i < nout; ++i) {
        const double* row = w + i * nin;
        for (int j = 0; j < nin; ++j) ws.g[h - 1][j] += row[j] * ws.s[h][i];
      }
    }
  }
  chain_gradient_to_raw(p, grad);
  return grad;
}

namespace netdetail {

/// Accumulates scale * d(cotangent . d value/d input)/d effective params
/// into grad_eff, and optionally reports d phi / d input in dphi_dx.
/// phi = u . grad_x value is the directional derivative of the value along
/// u, so one tangent sweep plus one reverse sweep computes its gradients.
inline void pgig_accumulate_eff(const NetworkParams& p, const double* eff,
                                std::span<const double> xin, std::span<const double> u,
                                double scale, NetWorkspace& ws, double* grad_eff,
                                double* dphi_dx = nullptr) {
  const auto& spec = p.spec;
  const int H = spec.depth();
  // tangent sweep
  const double* prev = xin.data();
  const double* prevt = u.data();
  for (int h = 0; h < H; ++h) {
    const int nin = spec.width_in(h);
    const int nout = spec.width_out(h);
    const double* w = eff + p.weight_offset(h);
    for (int i = 0; i < nout; ++i) {
      double acc = 0;
      const double* row = w + i * nin;
      for (int j = 0; j < nin; ++j) acc += row[j] * prevt[j];
      ws.zt[h][i] = acc;
      ws.xt[h][i] = logistic(ws.z[h][i]) * acc;
    }
    prev = ws.x[h].data();
    prevt = ws.xt[h].data();
  }
  (void)prev;
  // reverse sweep over the tangent-augmented graph
  const double* wo = eff + p.output_offset();
  for (int i = 0; i < spec.hidden[H - 1]; ++i) {
    ws.gt[H - 1][i] = wo[i];  // d phi / d xt
    ws.g[H - 1][i] = 0.0;     // d phi / d x
    grad_eff[p.output_offset() + i] += scale * ws.xt[H - 1][i];
  }
  for (int h = H - 1; h >= 0; --h) {
    const int nin = spec.width_in(h);
    const int nout = spec.width_out(h);
    const double* xprev = h == 0 ? xin.data() : ws.x[h - 1].data();
    const double* xtprev = h == 0 ? u.data() : ws.xt[h - 1].data();
    double* gw = grad_eff + p.weight_offset(h);
    double* gb = grad_eff + p.bias_offset(h);
    for (int i = 0; i < nout; ++i) {
      const double sig = logistic(ws.z[h][i]);
      const double sig2 = sig * (1.0 - sig);
      const double qt = ws.gt[h][i] * sig;                              // adjoint of zt
      const double q = ws.g[h][i] * sig + ws.gt[h][i] * sig2 * ws.zt[h][i];  // adjoint of z
      ws.st[h][i] = qt;
      ws.s[h][i] = q;
      gb[i] += scale * q;
      double* grow = gw + i * nin;
      for (int j = 0; j < nin; ++j) grow[j] += scale * (q * xprev[j] + qt * xtprev[j]);
    }
    const double* w = eff + p.weight_offset(h);
    if (h > 0) {
      for (int j = 0; j < nin; ++j) {
        ws.g[h - 1][j] = 0.0;
        ws.gt[h - 1][j] = 0.0;
      }
      for (int i = 0; i < nout; ++i) {
        const double* row = w + i * nin;
        for (int j = 0; j < nin; ++j) {
          ws.g[h - 1][j] += row[j] * ws.s[h][i];
          ws.gt[h - 1][j] += row[j] * ws.st[h][i];
        }
      }
    } else if (dphi_dx) {
      for (int j = 0; j < nin; ++j) dphi_dx[j] = 0.0;
      for (int i = 0; i < nout; ++i) {
        const double* row = w + i * nin;
        for (int j = 0; j < nin; ++j) dphi_dx[j] += row[j] * ws.s[0][i];
      }
    }
  }
}

}  // namespace netdetail

/// d (cotangent . d value/d input) / d raw parameters.
inline std::vector<double> param_gradient_of_input_gradient(const NetworkParams& p,
                                                            std::span<const double> xin,
                                                            std::span<const double> cotangent) {
  netdetail::check_input(p, xin);
  if (cotangent.size() != xin.size())
    throw DimensionMismatch("param_gradient_of_input_gradient: cotangent length mismatch");
  NetWorkspace ws;
  ws.resize(p.spec);
  effective_params(p, ws.eff);
  netdetail::forward_eff(p, ws.eff.data(), xin, ws);
  std::vector<double> grad(p.spec.param_count(), 0.0);
  netdetail::pgig_accumulate_eff(p, ws.eff.data(), xin, cotangent, 1.0, ws, grad.data());
  chain_gradient_to_raw(p, grad);
  return grad;
}

/// Hessian of the value w.r.t. the input, row-major n x n.
inline std::vector<double> input_hessian(const NetworkParams& p, std::span<const double> xin) {
  netdetail::check_input(p, xin);
  const int n = p.spec.input_width;
  NetWorkspace ws;
  ws.resize(p.spec);
  effective_params(p, ws.eff);
  netdetail::forward_eff(p, ws.eff.data(), xin, ws);
  std::vector<double> hess(n * n, 0.0), row(n, 0.0), dir(n, 0.0);
  std::vector<double> scratch(p.spec.param_count(), 0.0);
  for (int i = 0; i < n; ++i) {
    std::fill(dir.begin(), dir.end(), 0.0);
    dir[i] = 1.0;
    std::fill(scratch.begin(), scratch.end(), 0.0);
    netdetail::pgig_accumulate_eff(p, ws.eff.data(), xin, dir, 0.0, ws, scratch.data(), row.data());
    for (int j = 0; j < n; ++j) hess[i * n + j] = row[j];
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (hess[i * n + j] + hess[j * n + i]);
      hess[i * n + j] = hess[j * n + i] = v;
    }
  return hess;
}

}  // namespace polyaniso
