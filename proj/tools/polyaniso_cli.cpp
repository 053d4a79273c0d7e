// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause
//
// Command-line front end: basis verification, group checks, synthetic data
// generation, model calibration, evaluation, and constitutive diagnostics.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "polyaniso/io.hpp"

namespace fs = std::filesystem;
using namespace polyaniso;

namespace {

int thread_cap() {
  if (const char* env = std::getenv("POLYANISO_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

struct SubArgs {
  std::uint64_t seed = 2026;
  std::string out = ".";
  std::string config;
  std::string variant = "C";
  std::string group = "cub";
  std::string model_path;
  std::string data_path;
  std::string material = "cubicref";
  std::string paths = "default";
  long steps = -1;
  int restarts = -1;
  int samples = 1000;
  bool select_on_calibration = false;
  bool filter = false;
  double alpha = 1e-5;
};

std::vector<PathSpec> default_path_specs() {
  PathSpec rnd_cal = PathSpec::random_f(224);
  rnd_cal.split = "cal";
  PathSpec rnd_test = PathSpec::random_f(328);
  rnd_test.split = "test";
  return {PathSpec::uniaxial(175), PathSpec::simple_shear(101), rnd_cal, PathSpec::mixed(172),
          rnd_test};
}

Dataset load_dataset_path(const std::string& path) {
  fs::path p(path);
  if (fs::is_directory(p))
    return load_dataset((p / "dataset.jsonl").string(), (p / "header.json").string());
  const fs::path header = p.parent_path() / "header.json";
  return load_dataset(p.string(), fs::exists(header) ? header.string() : "");
}

int cmd_verify_bases(const SubArgs& a) {
  bool all_pass = true;
  std::printf("%-5s %-18s %-6s %-12s %s\n", "group", "direction", "state", "max_rel_err",
              "tolerance");
  for (GroupId g : {GroupId::Iso, GroupId::Ti, GroupId::Mon, GroupId::Rho, GroupId::Tet,
                    GroupId::Cub}) {
    for (RelationDirection d :
         {RelationDirection::PolyFromGeneral, RelationDirection::GeneralFromPoly}) {
      const RelationReport rep = verify_roundtrip(g, d, a.samples, a.seed);
      double tol_min = 1e300;
      for (double t : rep.tolerance) tol_min = std::min(tol_min, t);
      std::printf("%-5s %-18s %-6s %-12.3e %.0e (worst slot %d)\n", to_string(g).c_str(),
                  to_string(d).c_str(), rep.pass ? "pass" : "FAIL", rep.worst_error, tol_min,
                  rep.worst_slot);
      all_pass = all_pass && rep.pass;
    }
  }
  return all_pass ? 0 : 1;
}

int cmd_verify_groups(const SubArgs& a) {
  bool all_pass = true;
  for (GroupId g : {GroupId::Tet, GroupId::Cub}) {
    const RotationSet rs = group_elements(g, PreferredFrame::standard());
    const GroupAxiomReport rep = verify_group_axioms(rs);
    std::printf("%-4s axioms (%zu elements): %s%s\n", to_string(g).c_str(), rs.elements.size(),
                rep.pass ? "pass" : "FAIL ", rep.pass ? "" : rep.failure.c_str());
    const double err = theorem_symmetrization_error(g, 100, a.seed);
    const bool thm = err <= 1e-10;
    std::printf("%-4s symmetrization theorem: %s (max rel err %.3e)\n", to_string(g).c_str(),
                thm ? "pass" : "FAIL", err);
    all_pass = all_pass && rep.pass && thm;
  }
  return all_pass ? 0 : 1;
}

int cmd_gen_data(const SubArgs& a) {
  if (a.material != "neohooke" && a.material != "cubicref")
    throw InvalidParams("gen-data: unknown material '" + a.material + "'");
  if (a.paths != "default") throw InvalidParams("gen-data: unknown path set '" + a.paths + "'");
  const ReferenceMaterial mat = a.material == "neohooke"
                                    ? ReferenceMaterial::neo_hooke(1.0, 0.4)
                                    : ReferenceMaterial::cubic_reference(1.0, 0.5, 1.0);
  const Dataset ds = generate_dataset(mat, default_path_specs(), "paths", a.filter, a.seed);
  fs::create_directories(a.out);
  save_dataset(ds, (fs::path(a.out) / "dataset.jsonl").string(),
               (fs::path(a.out) / "header.json").string());
  std::printf("wrote %d calibration + %d test records to %s (%d filtered)\n", ds.count("cal"),
              ds.count("test"), a.out.c_str(), ds.filtered_out);
  return 0;
}

int cmd_calibrate(const SubArgs& a) {
  TrainConfig cfg;
  if (!a.config.empty()) cfg = train_config_from_json(json::parse(read_text_file(a.config)));
  cfg.seed = a.seed;
  if (a.steps >= 0) cfg.steps = a.steps;
  if (a.restarts >= 1) cfg.restarts = a.restarts;
  if (a.select_on_calibration) cfg.select_on_calibration = true;
  cfg.threads = thread_cap();
  const Dataset ds = load_dataset_path(a.data_path);
  const PannModel m0 = build(variant_from_string(a.variant), group_from_string(a.group),
                             PreferredFrame::standard(), {}, a.seed, a.alpha);
  const auto [model, report] = train(m0, ds, cfg);
  fs::create_directories(a.out);
  const std::string model_path = a.model_path.empty()
                                     ? (fs::path(a.out) / ("model_" + a.variant + ".json")).string()
                                     : a.model_path;
  save_model(model, model_path);
  write_text_file((fs::path(a.out) / ("loss_report_" + a.variant + ".json")).string(),
                  loss_report_to_json(report).dump(2) + "\n");
  write_text_file((fs::path(a.out) / ("loss_steps_" + a.variant + ".csv")).string(),
                  step_loss_to_csv(report));
  std::printf("selected restart %d: log10MSE calibration %.3f test %.3f -> %s\n",
              report.selected_restart, report.log10_calibration_mse, report.log10_test_mse,
              model_path.c_str());
  return 0;
}

int cmd_evaluate(const SubArgs& a) {
  const PannModel m = load_model(a.model_path);
  const Dataset ds = load_dataset_path(a.data_path);
  const auto cal = ds.split_records("cal");
  const auto test = ds.split_records("test");
  const double cal_mse = cal.empty() ? 0.0 : loss(m, cal);
  const double test_mse = test.empty() ? 0.0 : loss(m, test);
  json j;
  j["variant"] = to_string(m.variant);
  j["log10MSE"] = {{"calibration", std::log10(std::max(cal_mse, 1e-300))},
                   {"test", std::log10(std::max(test_mse, 1e-300))}};
  std::printf("log10MSE  PANN-%s\n", to_string(m.variant).c_str());
  std::printf("  calibration  %8.3f\n", std::log10(std::max(cal_mse, 1e-300)));
  std::printf("  test         %8.3f\n", std::log10(std::max(test_mse, 1e-300)));
  fs::create_directories(a.out);
  write_text_file((fs::path(a.out) / "evaluate.json").string(), j.dump(2) + "\n");
  std::ostringstream csv;
  csv.precision(17);
  csv << "index,split";
  for (const char* t : {"F", "P_data", "P_model"})
    for (int k = 0; k < 9; ++k) csv << "," << t << k / 3 + 1 << k % 3 + 1;
  csv << "\n";
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto& r = ds.records[i];
    const Mat3 pm = stress(m, r.F);
    csv << i << "," << r.split;
    for (double v : r.F.a) csv << "," << v;
    for (double v : r.P.a) csv << "," << v;
    for (double v : pm.a) csv << "," << v;
    csv << "\n";
  }
  write_text_file((fs::path(a.out) / "stress_table.csv").string(), csv.str());
  return 0;
}

int cmd_diagnose(const SubArgs& a) {
  const PannModel m = load_model(a.model_path);
  std::vector<Mat3> scan_path;
  if (!a.data_path.empty()) {
    const Dataset ds = load_dataset_path(a.data_path);
    for (const auto& r : ds.records)
      if (r.split == "test") scan_path.push_back(r.F);
  } else {
    for (const Mat3& F : sample_paths(PathSpec::mixed(50), a.seed)) scan_path.push_back(F);
    for (const Mat3& F : sample_paths(PathSpec::uniaxial(25), a.seed)) scan_path.push_back(F);
  }
  const Material mat = material_from_model(m);
  const EllipticityReport er = ellipticity_scan(mat, scan_path, 512, 1e-5);
  const ProbeReport pr = polyconvexity_probe(m, a.samples, 1e-9, a.seed);
  const ConditionReport cr = condition_suite(m, a.seed);
  json j;
  j["ellipticity"] = ellipticity_report_to_json(er);
  j["polyconvexity_probe"] = probe_report_to_json(pr);
  j["condition_suite"] = condition_report_to_json(cr);
  fs::create_directories(a.out);
  write_text_file((fs::path(a.out) / "diagnose.json").string(), j.dump(2) + "\n");
  write_text_file((fs::path(a.out) / "ellipticity.csv").string(), ellipticity_report_to_csv(er));
  std::printf("ellipticity: %d / %zu points non-elliptic\n", er.non_elliptic_count,
              scan_path.size());
  std::printf("polyconvexity probe: %s%s\n", pr.pass ? "pass" : "FAIL",
              pr.informational ? " (informational: variant not structurally polyconvex)" : "");
  for (const auto& e : cr.entries)
    std::printf("condition %-22s %s (%.3e)\n", e.name.c_str(),
                e.skipped ? "skipped" : (e.pass ? "pass" : "FAIL"), e.value);
  const bool structural_ok =
      variant_is_polyconvex(m.variant) ? (pr.pass && er.non_elliptic_count == 0) : true;
  return structural_ok ? 0 : 1;
}

int cmd_info(const SubArgs& a) {
  const PannModel m = build(variant_from_string(a.variant), group_from_string(a.group),
                            PreferredFrame::standard(), {}, a.seed, a.alpha);
  std::printf("variant %s, group %s: %d parameters\n", a.variant.c_str(), a.group.c_str(),
              m.net.spec.param_count());
  std::printf("network inputs: %d invariant slots, hidden widths", m.net.spec.input_width);
  for (int w : m.net.spec.hidden) std::printf(" %d", w);
  std::printf(", constraint %s\n", to_string(m.net.spec.constraint).c_str());
  if (variant_is_symmetrized(m.variant))
    std::printf("group symmetrization over %zu rotations\n", m.rotations.elements.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyconvex anisotropic PANN hyperelasticity toolkit"};
  app.require_subcommand(1);
  SubArgs a;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", a.seed, "deterministic run seed");
    sub->add_option("--out", a.out, "output directory");
  };

  CLI::App* vb = app.add_subcommand("verify-bases", "machine-check both basis relation directions");
  vb->add_option("--samples", a.samples, "random SPD samples per group");
  add_common(vb);

  CLI::App* vg =
      app.add_subcommand("verify-groups", "rotation-group axioms and symmetrization theorems");
  add_common(vg);

  CLI::App* gd = app.add_subcommand("gen-data", "generate a synthetic stress dataset");
  gd->add_option("--material", a.material, "cubicref | neohooke");
  gd->add_option("--paths", a.paths, "path set (default)");
  gd->add_flag("--filter", a.filter, "apply the acoustic-tensor ellipticity filter");
  add_common(gd);

  CLI::App* cal = app.add_subcommand("calibrate", "Sobolev calibration on (F, P) data");
  cal->add_option("--variant", a.variant, "I | Istar | C | Cstar")->required();
  cal->add_option("--data", a.data_path, "dataset directory or records file")->required();
  cal->add_option("--config", a.config, "training config JSON (strict keys)");
  cal->add_option("--steps", a.steps, "override training steps");
  cal->add_option("--restarts", a.restarts, "override restart count");
  cal->add_option("--group", a.group, "symmetry group (default cub)");
  cal->add_option("--alpha", a.alpha, "growth coefficient");
  cal->add_option("--model-out", a.model_path, "model JSON path");
  cal->add_flag("--select-on-calibration", a.select_on_calibration,
                "select restarts on calibration loss instead of test loss");
  add_common(cal);

  CLI::App* ev = app.add_subcommand("evaluate", "stress tables and log10MSE for a saved model");
  ev->add_option("--model", a.model_path, "model JSON")->required();
  ev->add_option("--data", a.data_path, "dataset directory or records file")->required();
  add_common(ev);

  CLI::App* dg = app.add_subcommand("diagnose", "ellipticity and polyconvexity reports");
  dg->add_option("--model", a.model_path, "model JSON")->required();
  dg->add_option("--data", a.data_path, "dataset whose test split provides the scan path");
  dg->add_option("--samples", a.samples, "polyconvexity probe samples");
  add_common(dg);

  CLI::App* inf = app.add_subcommand("info", "architecture and parameter counts");
  inf->add_option("--variant", a.variant, "I | Istar | C | Cstar");
  inf->add_option("--group", a.group, "symmetry group");
  add_common(inf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (vb->parsed()) return cmd_verify_bases(a);
    if (vg->parsed()) return cmd_verify_groups(a);
    if (gd->parsed()) return cmd_gen_data(a);
    if (cal->parsed()) return cmd_calibrate(a);
    if (ev->parsed()) return cmd_evaluate(a);
    if (dg->parsed()) return cmd_diagnose(a);
    if (inf->parsed()) return cmd_info(a);
  } catch (const InvalidParams& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const MalformedRecord& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
