// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "polyaniso/calibrate.hpp"
#include "polyaniso/diagnostics.hpp"

namespace polyaniso {

using json = nlohmann::ordered_json;

// ---- network ----------------------------------------------------------------

inline json network_to_json(const NetworkParams& p) {
  json j;
  j["spec"] = {{"input_width", p.spec.input_width},
               {"hidden", p.spec.hidden},
               {"constraint", to_string(p.spec.constraint)}};
  j["reparametrize"] = p.reparametrize;
  j["seed"] = p.seed;
  json layers = json::array();
  for (int h = 0; h <= p.spec.depth(); ++h) {
    json layer;
    const int nw = p.spec.width_out(h) * p.spec.width_in(h);
    layer["w"] = std::vector<double>(p.raw.begin() + p.weight_offset(h),
                                     p.raw.begin() + p.weight_offset(h) + nw);
    if (h < p.spec.depth())
      layer["b"] = std::vector<double>(p.raw.begin() + p.bias_offset(h),
                                       p.raw.begin() + p.bias_offset(h) + p.spec.width_out(h));
    layers.push_back(layer);
  }
  j["layers"] = layers;
  return j;
}

inline NetworkParams network_from_json(const json& j) {
  NetworkParams p;
  p.spec.input_width = j.at("spec").at("input_width").get<int>();
  p.spec.hidden = j.at("spec").at("hidden").get<std::vector<int>>();
  p.spec.constraint = constraint_from_string(j.at("spec").at("constraint").get<std::string>());
  p.spec.validate();
  p.reparametrize = j.at("reparametrize").get<bool>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.raw.assign(p.spec.param_count(), 0.0);
  const json& layers = j.at("layers");
  if (static_cast<int>(layers.size()) != p.spec.depth() + 1)
    throw InvalidParams("network_from_json: layer count mismatch");
  for (int h = 0; h <= p.spec.depth(); ++h) {
    const auto w = layers[h].at("w").get<std::vector<double>>();
    const int nw = p.spec.width_out(h) * p.spec.width_in(h);
    if (static_cast<int>(w.size()) != nw) throw InvalidParams("network_from_json: weight size");
    std::copy(w.begin(), w.end(), p.raw.begin() + p.weight_offset(h));
    if (h < p.spec.depth()) {
      const auto b = layers[h].at("b").get<std::vector<double>>();
      if (static_cast<int>(b.size()) != p.spec.width_out(h))
        throw InvalidParams("network_from_json: bias size");
      std::copy(b.begin(), b.end(), p.raw.begin() + p.bias_offset(h));
    }
  }
  return p;
}

// ---- model ------------------------------------------------------------------

inline json model_to_json(const PannModel& m) {
  json j;
  j["format"] = "polyaniso-model-v1";
  j["variant"] = to_string(m.variant);
  j["group"] = to_string(m.group);
  j["frame"] = {{"n1", m.frame.n1}, {"n2", m.frame.n2}, {"n3", m.frame.n3}};
  j["alpha"] = m.alpha;
  j["seed"] = m.seed;
  j["network"] = network_to_json(m.net);
  return j;  // normalization constants are re-derived on load, never persisted
}

inline PannModel model_from_json(const json& j) {
  if (j.at("format").get<std::string>() != "polyaniso-model-v1")
    throw InvalidParams("model_from_json: unknown format");
  PannModel m;
  m.variant = variant_from_string(j.at("variant").get<std::string>());
  m.group = group_from_string(j.at("group").get<std::string>());
  m.frame.n1 = j.at("frame").at("n1").get<Vec3>();
  m.frame.n2 = j.at("frame").at("n2").get<Vec3>();
  m.frame.n3 = j.at("frame").at("n3").get<Vec3>();
  m.frame.validate();
  m.alpha = j.at("alpha").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.net = network_from_json(j.at("network"));
  if (variant_is_symmetrized(m.variant)) m.rotations = group_elements(m.group, m.frame);
  m.norm = compute_normalization(m);
  return m;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << text;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void save_model(const PannModel& m, const std::string& path) {
  write_text_file(path, model_to_json(m).dump(2) + "\n");
}

inline PannModel load_model(const std::string& path) {
  return model_from_json(json::parse(read_text_file(path)));
}

// ---- dataset ----------------------------------------------------------------

inline std::string dataset_records_to_jsonl(const Dataset& ds) {
  std::ostringstream out;
  for (const auto& r : ds.records) {
    json j;
    j["F"] = std::vector<double>(r.F.a.begin(), r.F.a.end());
    j["P"] = std::vector<double>(r.P.a.begin(), r.P.a.end());
    j["split"] = r.split;
    out << j.dump() << "\n";
  }
  return out.str();
}

inline json dataset_header_to_json(const Dataset& ds) {
  json j;
  j["star"] = ds.star;
  j["unit"] = ds.unit;
  j["material"] = ds.material;
  j["seed"] = ds.seed;
  j["counts"] = {{"calibration", ds.count("cal")}, {"test", ds.count("test")}};
  j["filtered_out"] = ds.filtered_out;
  return j;
}

inline void save_dataset(const Dataset& ds, const std::string& records_path,
                         const std::string& header_path) {
  write_text_file(records_path, dataset_records_to_jsonl(ds));
  write_text_file(header_path, dataset_header_to_json(ds).dump(2) + "\n");
}

inline Dataset load_dataset(const std::string& records_path, const std::string& header_path = "") {
  Dataset ds;
  if (!header_path.empty()) {
    const json h = json::parse(read_text_file(header_path));
    ds.star = h.at("star").get<double>();
    ds.unit = h.value("unit", std::string("star"));
    ds.material = h.value("material", std::string());
    ds.seed = h.value("seed", std::uint64_t{0});
    ds.filtered_out = h.value("filtered_out", 0);
  }
  std::istringstream in(read_text_file(records_path));
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const std::exception& e) {
      throw MalformedRecord(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!j.contains("F") || !j.contains("P") || !j.contains("split"))
      throw MalformedRecord("record must carry F, P and split", line_no);
    const auto fv = j.at("F").get<std::vector<double>>();
    const auto pv = j.at("P").get<std::vector<double>>();
    if (fv.size() != 9 || pv.size() != 9) throw MalformedRecord("F and P must have 9 entries", line_no);
    DataRecord r;
    std::copy(fv.begin(), fv.end(), r.F.a.begin());
    std::copy(pv.begin(), pv.end(), r.P.a.begin());
    r.split = j.at("split").get<std::string>();
    if (r.split != "cal" && r.split != "test") throw MalformedRecord("split must be cal or test", line_no);
    if (!all_finite(r.F) || !all_finite(r.P)) throw MalformedRecord("non-finite entries", line_no);
    if (!(det(r.F) > 0)) throw MalformedRecord("det F <= 0", line_no);
    ds.records.push_back(std::move(r));
  }
  return ds;
}

// ---- training config / reports ------------------------------------------------

/// Strict parse: unknown keys are rejected.
inline TrainConfig train_config_from_json(const json& j) {
  static const std::vector<std::string> known = {
      "learning_rate", "steps",          "batch_size",        "shuffle",
      "restarts",      "seed",           "beta1",             "beta2",
      "eps",           "second_stage",   "second_stage_steps", "second_stage_lr",
      "select_on_calibration", "threads"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : known) ok = ok || it.key() == k;
    if (!ok) throw InvalidParams("train config: unknown key '" + it.key() + "'");
  }
  TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.steps = j.value("steps", c.steps);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.shuffle = j.value("shuffle", c.shuffle);
  c.restarts = j.value("restarts", c.restarts);
  c.seed = j.value("seed", c.seed);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.eps = j.value("eps", c.eps);
  c.second_stage = j.value("second_stage", c.second_stage);
  c.second_stage_steps = j.value("second_stage_steps", c.second_stage_steps);
  c.second_stage_lr = j.value("second_stage_lr", c.second_stage_lr);
  c.select_on_calibration = j.value("select_on_calibration", c.select_on_calibration);
  c.threads = j.value("threads", c.threads);
  c.validate();
  return c;
}

inline json loss_report_to_json(const LossReport& r) {
  json j;
  j["calibration_mse"] = r.calibration_mse;
  j["test_mse"] = r.test_mse;
  j["log10_calibration_mse"] = r.log10_calibration_mse;
  j["log10_test_mse"] = r.log10_test_mse;
  j["selection_metric"] = r.selection_metric;
  j["selected_restart"] = r.selected_restart;
  json restarts = json::array();
  for (const auto& rr : r.restarts)
    restarts.push_back({{"index", rr.index},
                        {"init_seed", rr.init_seed},
                        {"calibration_mse", rr.calibration_mse},
                        {"test_mse", rr.test_mse},
                        {"aborted", rr.aborted}});
  j["restarts"] = restarts;
  return j;
}

inline std::string step_loss_to_csv(const LossReport& r) {
  std::ostringstream out;
  out << "restart,step,batch_loss\n";
  out.precision(17);
  for (std::size_t k = 0; k < r.step_loss.size(); ++k)
    for (std::size_t s = 0; s < r.step_loss[k].size(); ++s)
      out << k << "," << s << "," << r.step_loss[k][s] << "\n";
  return out.str();
}

inline json condition_report_to_json(const ConditionReport& r) {
  json j;
  j["pass"] = r.pass;
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"name", e.name},
                       {"pass", e.pass},
                       {"skipped", e.skipped},
                       {"value", e.value},
                       {"tolerance", e.tol},
                       {"detail", e.detail}});
  j["conditions"] = entries;
  return j;
}

inline json ellipticity_report_to_json(const EllipticityReport& r) {
  json j;
  j["tolerance"] = r.tolerance;
  j["points"] = r.F.size();
  j["non_elliptic_count"] = r.non_elliptic_count;
  json worst = json::array();
  for (std::size_t k = 0; k < r.F.size(); ++k)
    if (r.non_elliptic[k])
      worst.push_back({{"index", k},
                       {"min_eigenvalue", r.min_eig[k]},
                       {"direction", r.direction[k]},
                       {"polarization", r.polarization[k]}});
  j["non_elliptic_points"] = worst;
  return j;
}

inline std::string ellipticity_report_to_csv(const EllipticityReport& r) {
  std::ostringstream out;
  out << "index,min_eigenvalue,tangent_norm,non_elliptic\n";
  out.precision(17);
  for (std::size_t k = 0; k < r.F.size(); ++k)
    out << k << "," << r.min_eig[k] << "," << r.tangent_norm[k] << ","
        << (r.non_elliptic[k] ? 1 : 0) << "\n";
  return out.str();
}

inline json probe_report_to_json(const ProbeReport& r) {
  return json{{"pass", r.pass},
              {"informational", r.informational},
              {"gradient_violations", r.gradient_violations},
              {"network_convexity_violations", r.network_convexity_violations},
              {"slot_convexity_violations", r.slot_convexity_violations},
              {"witness", r.witness}};
}

inline json relation_report_to_json(const RelationReport& r) {
  json j;
  j["group"] = to_string(r.group);
  j["direction"] = to_string(r.direction);
  j["pass"] = r.pass;
  j["max_rel_error"] = r.max_rel_error;
  j["tolerance"] = r.tolerance;
  j["worst_slot"] = r.worst_slot;
  j["worst_error"] = r.worst_error;
  return j;
}

}  // namespace polyaniso
