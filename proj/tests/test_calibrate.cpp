// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#include "polyaniso/calibrate.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <set>

#include "polyaniso/io.hpp"
#include "test_util.hpp"

namespace polyaniso {
namespace {

using testing::random_F;
using testing::rel_err;

const PreferredFrame kStd = PreferredFrame::standard();

std::vector<DataRecord> synthetic_records(const PannModel& m, int n, std::uint64_t seed,
                                          bool exact = false) {
  Rng rng(seed);
  std::vector<DataRecord> out;
  for (int k = 0; k < n; ++k) {
    DataRecord r;
    r.F = random_F(rng);
    if (exact) {
      r.P = stress(m, r.F);
    } else {
      for (int i = 0; i < 9; ++i) r.P.a[i] = rng.uniform(-1.0, 1.0);
    }
    r.split = "cal";
    out.push_back(r);
  }
  return out;
}

TEST(Loss, ExactModelScoresZero) {
  const PannModel m = build(Variant::I, GroupId::Cub, kStd, {}, 3);
  const auto recs = synthetic_records(m, 5, 1, /*exact=*/true);
  EXPECT_LE(loss(m, recs), 1e-25);
}

TEST(Loss, UnitOffsetAndMean) {
  const PannModel m = build(Variant::I, GroupId::Cub, kStd, {}, 3);
  Rng rng(2);
  DataRecord one;
  one.F = random_F(rng);
  one.P = stress(m, one.F);
  for (double& v : one.P.a) v -= 1.0;  // all nine components off by exactly one
  one.split = "cal";
  EXPECT_NEAR(loss(m, std::vector<DataRecord>{one}), 1.0, 1e-12);

  DataRecord exact;
  exact.F = random_F(rng);
  exact.P = stress(m, exact.F);
  exact.split = "cal";
  DataRecord off;
  off.F = random_F(rng);
  off.P = stress(m, off.F);
  off.P(0, 0) -= 3.0;  // squared norm error 9
  off.split = "cal";
  EXPECT_NEAR(loss(m, std::vector<DataRecord>{off, exact}), 0.5, 1e-12);
}

TEST(Loss, EmptyDatasetRejected) {
  const PannModel m = build(Variant::I, GroupId::Cub, kStd, {}, 3);
  EXPECT_THROW(loss(m, std::vector<DataRecord>{}), EmptyDataset);
}

TEST(Adam, FirstStepMovesBySignTimesRate) {
  AdamState st;
  std::vector<double> params = {1.0};
  adam_step(st, params, {2.0}, 0.01);
  EXPECT_NEAR(params[0], 1.0 - 0.01, 1e-9);
  // zero gradient leaves parameters unchanged
  AdamState st2;
  std::vector<double> p2 = {0.7};
  adam_step(st2, p2, {0.0}, 0.01);
  EXPECT_EQ(p2[0], 0.7);
}

TEST(Adam, SecondIdenticalStepIsBiasCorrected) {
  AdamState st;
  std::vector<double> params = {0.0};
  adam_step(st, params, {3.0}, 0.05);
  const double first = params[0];
  adam_step(st, params, {3.0}, 0.05);
  EXPECT_NEAR(std::abs(params[0] - first), 0.05, 1e-6);
}

double full_loss(PannModel m, const std::vector<const DataRecord*>& recs) {
  m.norm = compute_normalization(m);
  return loss(m, recs);
}

TEST(LossGradient, MatchesFiniteDifferencesForEveryVariant) {
  Rng rng(5);
  struct Case {
    Variant v;
    GroupId g;
  };
  const std::vector<Case> cases = {{Variant::I, GroupId::Cub},  {Variant::Istar, GroupId::Cub},
                                   {Variant::C, GroupId::Cub},  {Variant::Cstar, GroupId::Cub},
                                   {Variant::I, GroupId::Mon},  {Variant::I, GroupId::Ti},
                                   {Variant::C, GroupId::Tet},  {Variant::Istar, GroupId::Rho}};
  int case_index = 0;
  for (const Case& c : cases) {
    // alternate between the clipped and the reparametrized weight mechanism
    const PannModel m = build(c.v, c.g, kStd, {3}, rng.next_u64(), 1e-5, (case_index++ % 2) == 1);
    std::vector<DataRecord> recs = synthetic_records(m, 4, rng.next_u64());
    std::vector<const DataRecord*> ptrs;
    for (auto& r : recs) ptrs.push_back(&r);
    const auto cache = traindetail::build_cache(m, ptrs);
    std::vector<int> batch = {0, 1, 2, 3};
    std::vector<double> grad;
    const double l0 = loss_and_gradient(m, cache, batch, grad);
    EXPECT_LE(rel_err(l0, full_loss(m, ptrs)), 1e-12) << to_string(c.v) << " " << to_string(c.g);
    for (std::size_t k = 0; k < m.net.raw.size(); ++k) {
      PannModel mp = m, mm = m;
      const double h = 1e-5 * (1.0 + std::abs(m.net.raw[k]));
      mp.net.raw[k] += h;
      mm.net.raw[k] -= h;
      const double fd = (full_loss(mp, ptrs) - full_loss(mm, ptrs)) / (2 * h);
      EXPECT_LE(std::abs(grad[k] - fd) / std::max({std::abs(fd), std::abs(grad[k]), 1e-4}), 1e-5)
          << to_string(c.v) << " " << to_string(c.g) << " param " << k << " grad " << grad[k]
          << " fd " << fd;
    }
  }
}

TEST(Batcher, EveryEpochIsAPermutation) {
  Batcher b(10, true, Rng(3));
  std::vector<int> batch;
  for (int epoch = 0; epoch < 5; ++epoch) {
    std::multiset<int> seen;
    while (static_cast<int>(seen.size()) < 10) {
      b.next(3, batch);
      seen.insert(batch.begin(), batch.end());
    }
    EXPECT_EQ(seen.size(), 10u);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(seen.count(i), 1u) << "record " << i;
  }
}

Dataset tiny_dataset(std::uint64_t seed) {
  const auto cr = ReferenceMaterial::cubic_reference(1.0, 0.5, 1.0);
  return generate_dataset(cr,
                          {PathSpec::uniaxial(16), PathSpec::simple_shear(16),
                           PathSpec::mixed(8), PathSpec::random_f(8)},
                          "paths", false, seed);
}

TEST(Train, ZeroStepsReturnsInitialModel) {
  const PannModel m0 = build(Variant::C, GroupId::Cub, kStd, {}, 11);
  TrainConfig cfg;
  cfg.steps = 0;
  cfg.restarts = 1;
  cfg.seed = 1;
  const Dataset ds = tiny_dataset(5);
  const auto [m, rep] = train(m0, ds, cfg);
  EXPECT_EQ(std::memcmp(m.net.raw.data(), m0.net.raw.data(), m0.net.raw.size() * sizeof(double)),
            0);
  EXPECT_NEAR(rep.calibration_mse, loss(m0, ds.split_records("cal")), 1e-14);
}

TEST(Train, DeterministicGivenSeed) {
  const PannModel m0 = build(Variant::C, GroupId::Cub, kStd, {}, 13);
  TrainConfig cfg;
  cfg.steps = 60;
  cfg.restarts = 2;
  cfg.seed = 21;
  const Dataset ds = tiny_dataset(7);
  const auto [ma, ra] = train(m0, ds, cfg);
  const auto [mb, rb] = train(m0, ds, cfg);
  EXPECT_EQ(model_to_json(ma).dump(), model_to_json(mb).dump());
  EXPECT_EQ(loss_report_to_json(ra).dump(), loss_report_to_json(rb).dump());
  EXPECT_EQ(step_loss_to_csv(ra), step_loss_to_csv(rb));
}

TEST(Train, NormalizationHoldsThroughoutTraining) {
  const PannModel m0 = build(Variant::C, GroupId::Cub, kStd, {}, 17);
  const Dataset ds = tiny_dataset(9);
  for (long steps : {0L, 40L, 80L}) {
    TrainConfig cfg;
    cfg.steps = steps;
    cfg.restarts = 1;
    cfg.seed = 3;
    const auto [m, rep] = train(m0, ds, cfg);
    EXPECT_LE(max_abs(stress(m, Mat3::identity())), 1e-8) << "steps " << steps;
  }
}

TEST(Train, ShortRunReducesLoss) {
  const PannModel m0 = build(Variant::Istar, GroupId::Cub, kStd, {}, 19);
  const Dataset ds = tiny_dataset(11);
  TrainConfig cfg;
  cfg.steps = 300;
  cfg.restarts = 1;
  cfg.seed = 5;
  const double before = loss(m0, ds.split_records("cal"));
  const auto [m, rep] = train(m0, ds, cfg);
  EXPECT_LT(rep.calibration_mse, 0.5 * before);
  EXPECT_EQ(rep.selected_restart, 0);
  ASSERT_EQ(rep.step_loss.size(), 1u);
  EXPECT_EQ(rep.step_loss[0].size(), 300u);
}

TEST(Train, SelectionMetricIsConfigurable) {
  const PannModel m0 = build(Variant::Istar, GroupId::Cub, kStd, {}, 23);
  const Dataset ds = tiny_dataset(13);
  TrainConfig cfg;
  cfg.steps = 50;
  cfg.restarts = 3;
  cfg.seed = 7;
  const auto [m, rep] = train(m0, ds, cfg);
  double best_test = 1e300;
  for (const auto& r : rep.restarts)
    if (!r.aborted) best_test = std::min(best_test, r.test_mse);
  EXPECT_EQ(rep.test_mse, best_test);
  cfg.select_on_calibration = true;
  const auto [mc, repc] = train(m0, ds, cfg);
  double best_cal = 1e300;
  for (const auto& r : repc.restarts)
    if (!r.aborted) best_cal = std::min(best_cal, r.calibration_mse);
  EXPECT_EQ(repc.calibration_mse, best_cal);
}

TEST(Batcher, NoShuffleKeepsOrder) {
  Batcher b(5, false, Rng(1));
  std::vector<int> batch;
  b.next(3, batch);
  EXPECT_EQ(batch, (std::vector<int>{0, 1, 2}));
  b.next(3, batch);
  EXPECT_EQ(batch, (std::vector<int>{3, 4}));  // epoch tail is short
  b.next(3, batch);
  EXPECT_EQ(batch, (std::vector<int>{0, 1, 2}));
}

TEST(Train, SecondStageRunsFullBatch) {
  const PannModel m0 = build(Variant::Istar, GroupId::Cub, kStd, {}, 29);
  const Dataset ds = tiny_dataset(15);
  TrainConfig cfg;
  cfg.steps = 40;
  cfg.restarts = 1;
  cfg.seed = 9;
  cfg.second_stage = true;
  cfg.second_stage_steps = 10;
  const auto [m, rep] = train(m0, ds, cfg);
  ASSERT_EQ(rep.step_loss.size(), 1u);
  EXPECT_EQ(rep.step_loss[0].size(), 50u);
  EXPECT_LE(max_abs(stress(m, Mat3::identity())), 1e-8);
}

TEST(Train, ParallelRestartsMatchSequential) {
  const PannModel m0 = build(Variant::Istar, GroupId::Cub, kStd, {}, 31);
  const Dataset ds = tiny_dataset(17);
  TrainConfig cfg;
  cfg.steps = 60;
  cfg.restarts = 3;
  cfg.seed = 11;
  const auto [ms, rs] = train(m0, ds, cfg);
  cfg.threads = 3;
  const auto [mp, rp] = train(m0, ds, cfg);
  EXPECT_EQ(model_to_json(ms).dump(), model_to_json(mp).dump());
  EXPECT_EQ(loss_report_to_json(rs).dump(), loss_report_to_json(rp).dump());
}

TEST(TrainConfig, StrictJsonParsing) {
  EXPECT_NO_THROW(train_config_from_json(json::parse(R"({"steps": 10, "batch_size": 8})")));
  EXPECT_THROW(train_config_from_json(json::parse(R"({"steps": 10, "bad_key": 1})")),
               InvalidParams);
  EXPECT_THROW(train_config_from_json(json::parse(R"({"learning_rate": -1})")), InvalidParams);
}

}  // namespace
}  // namespace polyaniso
