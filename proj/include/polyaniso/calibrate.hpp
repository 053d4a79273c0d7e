// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#pragma once

#include <algorithm>
#include <cmath>
#include <atomic>
#include <numeric>
#include <thread>
#include <string>
#include <vector>

#include "polyaniso/data.hpp"
#include "polyaniso/pann.hpp"

namespace polyaniso {

struct NonFiniteLoss : std::runtime_error {
  explicit NonFiniteLoss(const std::string& what) : std::runtime_error(what) {}
};

struct TrainConfig {
  double learning_rate = 5e-3;
  long steps = 250000;
  int batch_size = 32;
  bool shuffle = true;
  int restarts = 5;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  bool second_stage = false;      // full-batch continuation replacing the
  long second_stage_steps = 750;  // solver-based re-calibration stage
  double second_stage_lr = 5e-4;
  bool select_on_calibration = false;
  int threads = 1;  // restart-level parallelism; results are order-independent

  void validate() const {
    if (!(learning_rate > 0) || steps < 0 || batch_size < 1 || restarts < 1 ||
        !(beta1 > 0 && beta1 < 1) || !(beta2 > 0 && beta2 < 1) || !(eps > 0) ||
        second_stage_steps < 0 || !(second_stage_lr > 0) || threads < 1)
      throw InvalidParams("TrainConfig: non-positive field");
  }
};

/// (1/m) sum (1/9) ||P - P_model||^2, stresses in units of the stress scale.
inline double loss(const PannModel& m, const std::vector<const DataRecord*>& records) {
  if (records.empty()) throw EmptyDataset("loss: no records");
  double acc = 0;
  for (const DataRecord* r : records) {
    const Mat3 d = stress(m, r->F) - r->P;
    acc += ddot(d, d) / 9.0;
  }
  return acc / static_cast<double>(records.size());
}

inline double loss(const PannModel& m, const std::vector<DataRecord>& records) {
  std::vector<const DataRecord*> ptrs;
  ptrs.reserve(records.size());
  for (const auto& r : records) ptrs.push_back(&r);
  return loss(m, ptrs);
}

struct AdamState {
  std::vector<double> m, v;
  long t = 0;

  void reset(std::size_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
    t = 0;
  }
};

/// Standard ADAM update with bias correction.
inline void adam_step(AdamState& st, std::vector<double>& params, const std::vector<double>& grad,
                      double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
  if (st.m.size() != params.size()) st.reset(params.size());
  if (grad.size() != params.size()) throw DimensionMismatch("adam_step: gradient size mismatch");
  st.t += 1;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(st.t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(st.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    st.m[i] = beta1 * st.m[i] + (1.0 - beta1) * grad[i];
    st.v[i] = beta2 * st.v[i] + (1.0 - beta2) * grad[i] * grad[i];
    params[i] -= lr * (st.m[i] / c1) / (std::sqrt(st.v[i] / c2) + eps);
  }
}

/// Epoch-wise mini-batcher: each epoch is one permutation of the record
/// indices, consumed in consecutive chunks (the final chunk may be short).
struct Batcher {
  int n = 0;
  bool shuffle = true;
  Rng rng;
  std::vector<int> perm;
  int cursor = 0;

  Batcher(int n_records, bool shuffle_flag, Rng r) : n(n_records), shuffle(shuffle_flag), rng(r) {
    perm.resize(n);
    std::iota(perm.begin(), perm.end(), 0);
    cursor = n;  // force a reshuffle on first use
  }

  void next(int batch_size, std::vector<int>& out) {
    out.clear();
    if (cursor >= n) {
      if (shuffle)
        for (int i = n - 1; i > 0; --i)
          std::swap(perm[i], perm[rng.uniform_index(static_cast<std::uint64_t>(i) + 1)]);
      cursor = 0;
    }
    const int take = std::min(batch_size, n - cursor);
    for (int k = 0; k < take; ++k) out.push_back(perm[cursor + k]);
    cursor += take;
  }
};

namespace traindetail {

struct CachedRecord {
  std::vector<double> values;  // nrot x nslot slate values
  std::vector<Mat3> gens;      // nrot x nslot deformation-gradient generators
  Mat3 growth_stress;          // growth'(J) H, theta-independent
  Mat3 F;
  Mat3 extra_gen;      // variant I / mon: 2 F (C x M2sq)
  double extra_value = 0;
  Mat3 P_data;
};

struct TrainerCache {
  std::vector<CachedRecord> records;
  panndetail::IdentitySlate id;
  int nrot = 1;
  int nslot = 0;
};

inline TrainerCache build_cache(const PannModel& m, const std::vector<const DataRecord*>& records) {
  TrainerCache cache;
  cache.id = panndetail::identity_slate(m);
  const auto& rots = model_rotations(m);
  cache.nrot = static_cast<int>(rots.size());
  cache.nslot = static_cast<int>(cache.id.slate.size());
  cache.records.reserve(records.size());
  for (const DataRecord* r : records) {
    CachedRecord c;
    const KinematicBundle kb = bundle(r->F);
    c.F = r->F;
    c.P_data = r->P;
    c.growth_stress = growth_dJ(kb.J, m.alpha) * kb.H;
    c.values.reserve(cache.nrot * cache.nslot);
    c.gens.reserve(cache.nrot * cache.nslot);
    for (const Mat3& Q : rots) {
      const SlotEval slate = model_slate(m, kb.C, kb.G, kb.J, Q);
      for (int s = 0; s < cache.nslot; ++s) {
        c.values.push_back(slate.value[s]);
        c.gens.push_back(2.0 * (r->F * slate.dC[s]) + slate.dJ[s] * kb.H);
      }
    }
    if (m.variant == Variant::I && m.group == GroupId::Mon) {
      const Mat3 e = panndetail::mon_extra_tensor(m.frame);
      c.extra_value = ddot(kb.G, e);
      c.extra_gen = 2.0 * (r->F * tensor_cross(kb.C, e));
    }
    cache.records.push_back(std::move(c));
  }
  return cache;
}

inline NormalizationConstants constants_from_g0(const PannModel& m,
                                                const panndetail::IdentitySlate& id,
                                                const std::vector<double>& g0) {
  NormalizationConstants out;
  switch (m.variant) {
    case Variant::I: {
      auto rec = panndetail::variant_i_recipe(m.group, g0);
      out.slot_coef = std::move(rec.slot_coef);
      out.extra_coef = rec.extra_coef;
      break;
    }
    case Variant::Istar:
    case Variant::Cstar: {
      Mat3 S = Mat3::zero();
      for (std::size_t s = 0; s < g0.size(); ++s) S += g0[s] * id.gen[s];
      out.projection = 0.5 * S;
      break;
    }
    case Variant::C: {
      const auto c = panndetail::variant_c_recipe(m, id, g0);
      out.p = c.p;
      out.q = c.q;
      out.r = c.r;
      break;
    }
  }
  return out;
}

}  // namespace traindetail

/// Batch loss and its gradient w.r.t. the raw network parameters, with the
/// gradient flowing through the stress (Sobolev path) and through the
/// re-derived stress-normalization constants.
inline double loss_and_gradient(const PannModel& m, const traindetail::TrainerCache& cache,
                                const std::vector<int>& batch, std::vector<double>& grad_raw) {
  const int nrot = cache.nrot;
  const int nslot = cache.nslot;
  const double w = 1.0 / static_cast<double>(nrot);
  const int nparam = m.net.spec.param_count();
  grad_raw.assign(nparam, 0.0);
  if (batch.empty()) throw EmptyDataset("loss_and_gradient: empty batch");

  NetWorkspace ws;
  ws.resize(m.net.spec);
  effective_params(m.net, ws.eff);
  const double* eff = ws.eff.data();

  // normalization constants from the current parameters
  std::vector<double> g0(nslot, 0.0);
  netdetail::forward_eff(m.net, eff, cache.id.slate.value, ws);
  netdetail::input_gradient_eff(m.net, eff, cache.id.slate.value, ws, g0.data());
  const NormalizationConstants norm = traindetail::constants_from_g0(m, cache.id, g0);

  std::vector<double> addon(nslot, 0.0);
  std::array<double, 6> that{};  // Cstar: slot coordinates of the projection tensor
  if (m.variant == Variant::I) {
    addon = norm.slot_coef;
  } else if (m.variant == Variant::C) {
    for (int i = 0; i < 6; ++i) {
      addon[i] = norm.p[i];
      addon[6 + i] = norm.q[i];
    }
    addon[12] = norm.r;
  } else if (m.variant == Variant::Cstar) {
    const Mat3 R = m.frame.matrix();
    const Mat3 tf = transpose(R) * norm.projection * R;
    that = {tf(0, 0), tf(1, 1), tf(2, 2), 2.0 * tf(0, 1), 2.0 * tf(0, 2), 2.0 * tf(1, 2)};
    for (int s = 0; s < 6; ++s) addon[s] = -that[s];
  }

  const double inv9b = 1.0 / (9.0 * static_cast<double>(batch.size()));
  double batch_loss = 0;

  std::vector<double> netgrad(nrot * nslot, 0.0);
  std::vector<double> u(nslot, 0.0);
  std::vector<double> cot_coef(nslot, 0.0);
  double cot_extra = 0;
  Mat3 cot_T = Mat3::zero();

  for (const int idx : batch) {
    const auto& rec = cache.records[idx];
    Mat3 P = rec.growth_stress;
    for (int rot = 0; rot < nrot; ++rot) {
      const double* vals = rec.values.data() + rot * nslot;
      netdetail::forward_eff(m.net, eff, {vals, static_cast<std::size_t>(nslot)}, ws);
      netdetail::input_gradient_eff(m.net, eff, {vals, static_cast<std::size_t>(nslot)}, ws,
                                    netgrad.data() + rot * nslot);
      const double* ng = netgrad.data() + rot * nslot;
      const Mat3* gens = rec.gens.data() + rot * nslot;
      for (int s = 0; s < nslot; ++s) P += (w * (ng[s] + addon[s])) * gens[s];
    }
    if (m.variant == Variant::I && m.group == GroupId::Mon) P += norm.extra_coef * rec.extra_gen;
    if (m.variant == Variant::Istar) P += (-2.0) * (rec.F * norm.projection);

    const Mat3 dP = P - rec.P_data;
    batch_loss += ddot(dP, dP) / 9.0;
    const Mat3 R = (2.0 * inv9b) * dP;

    if (m.variant == Variant::Istar) cot_T += (-2.0) * (transpose(rec.F) * R);
    if (m.variant == Variant::I && m.group == GroupId::Mon) cot_extra += ddot(R, rec.extra_gen);

    for (int rot = 0; rot < nrot; ++rot) {
      const double* vals = rec.values.data() + rot * nslot;
      const Mat3* gens = rec.gens.data() + rot * nslot;
      for (int s = 0; s < nslot; ++s) {
        u[s] = w * ddot(R, gens[s]);
        cot_coef[s] += u[s];
      }
      netdetail::forward_eff(m.net, eff, {vals, static_cast<std::size_t>(nslot)}, ws);
      netdetail::pgig_accumulate_eff(m.net, eff, {vals, static_cast<std::size_t>(nslot)},
                                     {u.data(), u.size()}, 1.0, ws, grad_raw.data());
    }
  }

  // pull the constants' cotangents back to the identity-slate gradient
  std::vector<double> cot_g0(nslot, 0.0);
  switch (m.variant) {
    case Variant::I:
      cot_g0 = panndetail::variant_i_recipe_pullback(m.group, g0, cot_coef, cot_extra);
      break;
    case Variant::Istar: {
      for (int s = 0; s < nslot; ++s) cot_g0[s] = 0.5 * ddot(cot_T, cache.id.gen[s]);
      break;
    }
    case Variant::Cstar: {
      // slot cotangents -> projection tensor -> identity-slate gradient
      std::array<double, 6> cot_that{};
      for (int s = 0; s < 6; ++s) cot_that[s] = -cot_coef[s];
      Mat3 mhat = Mat3::zero();
      mhat(0, 0) = cot_that[0];
      mhat(1, 1) = cot_that[1];
      mhat(2, 2) = cot_that[2];
      mhat(0, 1) = mhat(1, 0) = cot_that[3];
      mhat(0, 2) = mhat(2, 0) = cot_that[4];
      mhat(1, 2) = mhat(2, 1) = cot_that[5];
      const Mat3 R = m.frame.matrix();
      const Mat3 cot_Tm = R * mhat * transpose(R);
      for (int s = 0; s < nslot; ++s) cot_g0[s] = 0.5 * ddot(cot_Tm, cache.id.gen[s]);
      break;
    }
    case Variant::C: {
      std::array<double, 6> cp{}, cq{};
      for (int i = 0; i < 6; ++i) {
        cp[i] = cot_coef[i];
        cq[i] = cot_coef[6 + i];
      }
      cot_g0 = panndetail::variant_c_recipe_pullback(m, cache.id, g0, cp, cq, cot_coef[12]);
      break;
    }
  }
  netdetail::forward_eff(m.net, eff, cache.id.slate.value, ws);
  netdetail::pgig_accumulate_eff(m.net, eff, cache.id.slate.value, {cot_g0.data(), cot_g0.size()},
                                 1.0, ws, grad_raw.data());

  chain_gradient_to_raw(m.net, grad_raw);
  return batch_loss / static_cast<double>(batch.size());
}

struct RestartResult {
  int index = 0;
  std::uint64_t init_seed = 0;
  double calibration_mse = 0;
  double test_mse = 0;
  bool aborted = false;
};

struct LossReport {
  double calibration_mse = 0;
  double test_mse = 0;
  double log10_calibration_mse = 0;
  double log10_test_mse = 0;
  std::vector<RestartResult> restarts;
  int selected_restart = -1;
  std::string selection_metric = "test";
  std::vector<std::vector<double>> step_loss;  // per restart, per step (minibatch loss)
};

namespace traindetail {

inline void clip_constrained(NetworkParams& p) {
  if (p.reparametrize) return;
  for (int h = 0; h <= p.spec.depth(); ++h) {
    if (!p.spec.layer_constrained(h)) continue;
    double* w = p.raw.data() + p.weight_offset(h);
    const int n = p.spec.width_out(h) * p.spec.width_in(h);
    for (int k = 0; k < n; ++k) w[k] = std::max(w[k], 0.0);
  }
}

inline bool run_restart(PannModel& model, const TrainerCache& cache, const TrainConfig& cfg,
                        int restart_index, std::vector<double>& step_loss) {
  Batcher batcher(static_cast<int>(cache.records.size()), cfg.shuffle,
                  Rng(cfg.seed).fork(1000 + static_cast<std::uint64_t>(restart_index)));
  AdamState adam;
  adam.reset(model.net.raw.size());
  std::vector<double> grad;
  std::vector<int> batch;
  step_loss.clear();
  step_loss.reserve(cfg.steps);
  for (long step = 0; step < cfg.steps; ++step) {
    batcher.next(cfg.batch_size, batch);
    const double l = loss_and_gradient(model, cache, batch, grad);
    if (!std::isfinite(l)) return false;
    step_loss.push_back(l);
    adam_step(adam, model.net.raw, grad, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps);
    clip_constrained(model.net);
  }
  if (cfg.second_stage) {
    std::vector<int> all(cache.records.size());
    std::iota(all.begin(), all.end(), 0);
    AdamState adam2;
    adam2.reset(model.net.raw.size());
    for (long step = 0; step < cfg.second_stage_steps; ++step) {
      const double l = loss_and_gradient(model, cache, all, grad);
      if (!std::isfinite(l)) return false;
      step_loss.push_back(l);
      adam_step(adam2, model.net.raw, grad, cfg.second_stage_lr, cfg.beta1, cfg.beta2, cfg.eps);
      clip_constrained(model.net);
    }
  }
  model.norm = compute_normalization(model);
  return true;
}

}  // namespace traindetail

/// Multi-restart Sobolev calibration. Restart 0 continues from the passed
/// model; later restarts re-initialize the network with derived seeds. The
/// model with the lowest test loss is selected (calibration loss behind a
/// flag).
inline std::pair<PannModel, LossReport> train(const PannModel& m0, const Dataset& ds,
                                              const TrainConfig& cfg) {
  cfg.validate();
  const auto cal = ds.split_records("cal");
  const auto test = ds.split_records("test");
  if (cal.empty()) throw EmptyDataset("train: no calibration records");
  const traindetail::TrainerCache cache = traindetail::build_cache(m0, cal);

  LossReport report;
  report.selection_metric = cfg.select_on_calibration ? "calibration" : "test";

  struct Slot {
    PannModel model;
    RestartResult rr;
    std::vector<double> step_loss;
  };
  std::vector<Slot> slots(cfg.restarts);
  auto run_one = [&](int r) {
    Slot& slot = slots[r];
    slot.model = m0;
    slot.rr.index = r;
    slot.rr.init_seed =
        r == 0 ? m0.net.seed : Rng(cfg.seed).fork(static_cast<std::uint64_t>(r)).state;
    if (r > 0) slot.model.net = init(m0.net.spec, slot.rr.init_seed, m0.net.reparametrize);
    slot.model.norm = compute_normalization(slot.model);
    bool ok = false;
    try {
      ok = traindetail::run_restart(slot.model, cache, cfg, r, slot.step_loss);
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok) {
      slot.rr.aborted = true;
      return;
    }
    slot.rr.calibration_mse = loss(slot.model, cal);
    slot.rr.test_mse = test.empty() ? 0.0 : loss(slot.model, test);
  };
  if (cfg.threads > 1 && cfg.restarts > 1) {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int nthreads = std::min(cfg.threads, cfg.restarts);
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < cfg.restarts; r = next.fetch_add(1)) run_one(r);
      });
    for (auto& t : pool) t.join();
  } else {
    for (int r = 0; r < cfg.restarts; ++r) run_one(r);
  }

  PannModel best = m0;
  double best_metric = 0;
  for (int r = 0; r < cfg.restarts; ++r) {
    report.step_loss.push_back(std::move(slots[r].step_loss));
    report.restarts.push_back(slots[r].rr);
    if (slots[r].rr.aborted) continue;
    const double metric = cfg.select_on_calibration ? slots[r].rr.calibration_mse
                          : test.empty()            ? slots[r].rr.calibration_mse
                                                    : slots[r].rr.test_mse;
    if (report.selected_restart < 0 || metric < best_metric) {
      report.selected_restart = r;
      best_metric = metric;
      best = slots[r].model;
    }
  }
  if (report.selected_restart < 0) throw NonFiniteLoss("train: every restart diverged");
  const auto& sel = report.restarts[report.selected_restart];
  report.calibration_mse = sel.calibration_mse;
  report.test_mse = sel.test_mse;
  report.log10_calibration_mse = std::log10(std::max(sel.calibration_mse, 1e-300));
  report.log10_test_mse = std::log10(std::max(sel.test_mse, 1e-300));
  return {best, report};
}

}  // namespace polyaniso
