// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#include "polyaniso/data.hpp"

#include <gtest/gtest.h>

#include "polyaniso/io.hpp"
#include "test_util.hpp"

namespace polyaniso {
namespace {

using testing::expect_near_mat;
using testing::random_F;

const PreferredFrame kStd = PreferredFrame::standard();

std::vector<PathSpec> default_paths() {
  PathSpec uni = PathSpec::uniaxial(175);
  PathSpec shear = PathSpec::simple_shear(101);
  PathSpec rnd_cal = PathSpec::random_f(224);
  rnd_cal.split = "cal";
  PathSpec mixed = PathSpec::mixed(172);
  PathSpec rnd_test = PathSpec::random_f(328);
  rnd_test.split = "test";
  return {uni, shear, rnd_cal, mixed, rnd_test};
}

TEST(ReferenceStress, VanishesAtIdentity) {
  const auto nh = ReferenceMaterial::neo_hooke(1.0, 0.4);
  expect_near_mat(reference_stress(nh, Mat3::identity()), Mat3::zero(), 1e-15);
  const auto cr = ReferenceMaterial::cubic_reference(1.0, 0.5, 1.0);
  expect_near_mat(reference_stress(cr, Mat3::identity()), Mat3::zero(), 1e-15);
}

TEST(ReferenceStress, MatchesFiniteDifferenceOfPotential) {
  Rng rng(3);
  for (const auto& mat :
       {ReferenceMaterial::neo_hooke(1.0, 0.4), ReferenceMaterial::cubic_reference(1.0, 0.5, 1.0)}) {
    for (int s = 0; s < 50; ++s) {
      const Mat3 F = random_F(rng);
      const Mat3 pa = reference_stress(mat, F);
      const Mat3 pf = stress_fd([&](const Mat3& f) { return reference_potential(mat, f); }, F);
      EXPECT_LE(frobenius_norm(pa - pf) / std::max(1.0, frobenius_norm(pf)), 1e-8);
    }
  }
}

TEST(ReferenceStress, CubicPullbackInvariance) {
  const auto cr = ReferenceMaterial::cubic_reference(1.0, 0.5, 1.0);
  const RotationSet rs = group_elements(GroupId::Cub, kStd);
  Rng rng(5);
  for (int s = 0; s < 20; ++s) {
    const Mat3 F = random_F(rng);
    const Mat3 p0 = reference_stress(cr, F);
    for (const Mat3& Q : rs.elements) {
      const Mat3 p1 = reference_stress(cr, F * transpose(Q)) * Q;
      EXPECT_LE(max_abs(p1 - p0), 1e-12 * std::max(1.0, max_abs(p0)));
    }
  }
}

TEST(ReferenceMaterialValidation, RejectsBadParameters) {
  EXPECT_THROW(ReferenceMaterial::neo_hooke(-1.0, 0.4), InvalidParams);
  EXPECT_THROW(ReferenceMaterial::neo_hooke(1.0, 0.6), InvalidParams);
  EXPECT_THROW(ReferenceMaterial::cubic_reference(0.0, 0.5, 1.0), InvalidParams);
}

TEST(SamplePaths, UniaxialLinspace) {
  const auto fs = sample_paths(PathSpec::uniaxial(3, 0.9, 1.1), 1);
  ASSERT_EQ(fs.size(), 3u);
  EXPECT_NEAR(fs[0](0, 0), 0.9, 1e-15);
  EXPECT_NEAR(fs[1](0, 0), 1.0, 1e-15);
  EXPECT_NEAR(fs[2](0, 0), 1.1, 1e-15);
  for (const Mat3& f : fs) {
    EXPECT_EQ(f(1, 1), 1.0);
    EXPECT_EQ(f(2, 2), 1.0);
  }
}

TEST(SamplePaths, SimpleShearIsIsochoric) {
  const auto fs = sample_paths(PathSpec::simple_shear(5, -0.2, 0.2), 1);
  for (const Mat3& f : fs) EXPECT_NEAR(det(f), 1.0, 1e-15);
  EXPECT_NEAR(fs.back()(0, 1), 0.2, 1e-15);
}

TEST(SamplePaths, RandomFRespectsJacobianBounds) {
  const auto fs = sample_paths(PathSpec::random_f(1000, 0.5, 1.6), 99);
  ASSERT_EQ(fs.size(), 1000u);
  for (const Mat3& f : fs) {
    EXPECT_GE(det(f), 0.5);
    EXPECT_LE(det(f), 1.6);
  }
}

TEST(GenerateDataset, EllipticOracleIsNotFiltered) {
  const auto cr = ReferenceMaterial::cubic_reference(1.0, 0.5, 1.0);
  std::vector<PathSpec> small = {PathSpec::uniaxial(15), PathSpec::simple_shear(15),
                                 PathSpec::mixed(15), PathSpec::random_f(15)};
  const Dataset ds = generate_dataset(cr, small, "paths", /*filter=*/true, 7);
  EXPECT_EQ(ds.filtered_out, 0);
  EXPECT_EQ(ds.count("cal"), 30);
  EXPECT_EQ(ds.count("test"), 30);
}

TEST(GenerateDataset, SplitRuleSendsPathsToCalibration) {
  const auto cr = ReferenceMaterial::cubic_reference(1.0, 0.5, 1.0);
  const Dataset ds = generate_dataset(cr, default_paths(), "paths", false, 7);
  EXPECT_EQ(ds.count("cal"), 500);
  EXPECT_EQ(ds.count("test"), 500);
}

TEST(GenerateDataset, DeterministicGivenSeed) {
  const auto cr = ReferenceMaterial::cubic_reference(1.0, 0.5, 1.0);
  const Dataset a = generate_dataset(cr, default_paths(), "paths", false, 11);
  const Dataset b = generate_dataset(cr, default_paths(), "paths", false, 11);
  EXPECT_EQ(dataset_records_to_jsonl(a), dataset_records_to_jsonl(b));
}

TEST(DatasetIO, RoundTripIsByteIdentical) {
  const auto cr = ReferenceMaterial::cubic_reference(1.0, 0.5, 1.0);
  std::vector<PathSpec> small = {PathSpec::uniaxial(40), PathSpec::random_f(960)};
  const Dataset ds = generate_dataset(cr, small, "paths", false, 13);
  ASSERT_EQ(ds.records.size(), 1000u);
  const std::string dir = ::testing::TempDir();
  save_dataset(ds, dir + "/d.jsonl", dir + "/d.header.json");
  const Dataset loaded = load_dataset(dir + "/d.jsonl", dir + "/d.header.json");
  save_dataset(loaded, dir + "/d2.jsonl", dir + "/d2.header.json");
  EXPECT_EQ(read_text_file(dir + "/d.jsonl"), read_text_file(dir + "/d2.jsonl"));
  EXPECT_EQ(loaded.records.size(), ds.records.size());
}

TEST(DatasetIO, MalformedRecordsCarryLineNumbers) {
  const std::string dir = ::testing::TempDir();
  write_text_file(dir + "/bad1.jsonl",
                  "{\"F\":[1,0,0,0,1,0,0,0,1],\"P\":[0,0,0,0,0,0,0,0,0],\"split\":\"cal\"}\n"
                  "{\"F\":[-1,0,0,0,1,0,0,0,1],\"P\":[0,0,0,0,0,0,0,0,0],\"split\":\"cal\"}\n");
  try {
    load_dataset(dir + "/bad1.jsonl");
    FAIL() << "expected MalformedRecord";
  } catch (const MalformedRecord& e) {
    EXPECT_EQ(e.line_number, 2);
  }
  write_text_file(dir + "/bad2.jsonl", "{\"F\":[1,0,0,0,1,0,0,0,1],\"split\":\"cal\"}\n");
  EXPECT_THROW(load_dataset(dir + "/bad2.jsonl"), MalformedRecord);
}

TEST(CubicReference, PassesConditionSuite) {
  const auto cr = ReferenceMaterial::cubic_reference(1.0, 0.5, 1.0);
  ConditionOptions opt;
  const RotationSet rs = group_elements(GroupId::Cub, kStd);
  opt.symmetry = &rs;
  const ConditionReport rep = condition_suite(material_from_reference(cr), opt);
  for (const auto& e : rep.entries) EXPECT_TRUE(e.pass || e.skipped) << e.name << " " << e.value;
  // elliptic over the default paths
  const Dataset ds = generate_dataset(cr, {PathSpec::uniaxial(9), PathSpec::simple_shear(9),
                                           PathSpec::mixed(9), PathSpec::random_f(9)},
                                      "paths", false, 3);
  std::vector<Mat3> Fs;
  for (const auto& r : ds.records) Fs.push_back(r.F);
  EXPECT_EQ(ellipticity_scan(material_from_reference(cr), Fs, 128).non_elliptic_count, 0);
}

}  // namespace
}  // namespace polyaniso
