#pragma once

// Scene files and protocol trace files (JSON).
//
// Scene:  {"grid": {"rows": 4, "cols": 4},
//          "shapes": [{"rect": [r0, c0, r1, c1]}, {"cells": [1, 2]}],
//          "cells": [5, 6]}
// "shapes" and the top-level "cells" are both optional; at least one cell
// must be covered.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "pqgi/protocol.hpp"

namespace pqgi {

class SceneError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                                     const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw SceneError(where + ": missing field \"" + key + "\"");
  return obj.at(key);
}

inline long long as_int(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number_integer()) throw SceneError(where + ": expected an integer");
  return v.get<long long>();
}

inline std::vector<std::uint64_t> parse_cells(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array()) throw SceneError(where + ": expected an array of cell serials");
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto c = as_int(v[i], where + "[" + std::to_string(i) + "]");
    if (c < 1) throw SceneError(where + "[" + std::to_string(i) + "]: serials start at 1");
    out.push_back(static_cast<std::uint64_t>(c));
  }
  return out;
}

}  // namespace detail

inline Scene scene_from_json(const nlohmann::json& j, const std::string& source = "scene") {
  if (!j.is_object()) throw SceneError(source + ": top level must be an object");
  Scene scene;
  const auto& grid = detail::require(j, "grid", source);
  const auto rows = detail::as_int(detail::require(grid, "rows", source + ".grid"), source + ".grid.rows");
  const auto cols = detail::as_int(detail::require(grid, "cols", source + ".grid"), source + ".grid.cols");
  if (rows < 1 || cols < 1 || rows > (1 << 20) || cols > (1 << 20))
    throw SceneError(source + ".grid: rows and cols must be in [1, 2^20]");
  scene.grid = {static_cast<int>(rows), static_cast<int>(cols)};

  if (j.contains("shapes")) {
    const auto& shapes = j.at("shapes");
    if (!shapes.is_array()) throw SceneError(source + ".shapes: expected an array");
    for (std::size_t i = 0; i < shapes.size(); ++i) {
      const std::string where = source + ".shapes[" + std::to_string(i) + "]";
      const auto& s = shapes[i];
      if (s.is_object() && s.contains("rect")) {
        const auto& r = s.at("rect");
        if (!r.is_array() || r.size() != 4) throw SceneError(where + ".rect: expected [r0, c0, r1, c1]");
        Rect rect{static_cast<int>(detail::as_int(r[0], where + ".rect[0]")),
                  static_cast<int>(detail::as_int(r[1], where + ".rect[1]")),
                  static_cast<int>(detail::as_int(r[2], where + ".rect[2]")),
                  static_cast<int>(detail::as_int(r[3], where + ".rect[3]"))};
        if (rect.r0 > rect.r1 || rect.c0 > rect.c1)
          throw SceneError(where + ".rect: corners out of order");
        if (rect.r0 < 0 || rect.c0 < 0 || rect.r1 >= scene.grid.rows || rect.c1 >= scene.grid.cols)
          throw SceneError(where + ".rect: outside the " + std::to_string(rows) + "x" +
                           std::to_string(cols) + " grid");
        scene.rects.push_back(rect);
      } else if (s.is_object() && s.contains("cells")) {
        auto cells = detail::parse_cells(s.at("cells"), where + ".cells");
        scene.cells.insert(scene.cells.end(), cells.begin(), cells.end());
      } else {
        throw SceneError(where + ": expected {\"rect\": [...]} or {\"cells\": [...]}");
      }
    }
  }
  if (j.contains("cells")) {
    auto cells = detail::parse_cells(j.at("cells"), source + ".cells");
    scene.cells.insert(scene.cells.end(), cells.begin(), cells.end());
  }
  for (const auto c : scene.cells)
    if (c > scene.grid.cells())
      throw SceneError(source + ".cells: serial " + std::to_string(c) + " outside [1, " +
                       std::to_string(scene.grid.cells()) + "]");
  if (scene.rects.empty() && scene.cells.empty())
    throw SceneError(source + ": scene covers no cells");
  return scene;
}

inline Scene parse_scene(const std::string& text, const std::string& source = "scene") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SceneError(source + ": " + e.what());
  }
  return scene_from_json(j, source);
}

inline Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SceneError(path.string() + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str(), path.string());
}

// ---------------------------------------------------------------------------
// Trace
// ---------------------------------------------------------------------------

inline const char* to_string(MeasureMode m) { return m == MeasureMode::exact ? "exact" : "sample"; }

inline nlohmann::ordered_json to_json(const CostSummary& c) {
  return {{"m", c.m},
          {"n", c.n},
          {"r", c.r},
          {"alice_to_bob_qubits", c.alice_to_bob_qubits},
          {"bob_to_alice_qubits", c.bob_to_alice_qubits},
          {"total_qubits", c.total_qubits},
          {"paper_formula_qubits", c.paper_formula_qubits},
          {"classical_baselines_bits", {{"atallah", c.atallah_bits}, {"qin", c.qin_bits}}}};
}

inline nlohmann::ordered_json to_json(const CountEstimate& e, bool with_distribution) {
  nlohmann::ordered_json j{{"search_space", e.search_space},
                           {"counting_bits", e.counting_bits},
                           {"y", e.y},
                           {"theta_hat", e.theta_hat},
                           {"t_hat", e.t_hat},
                           {"t_rounded", e.t_rounded}};
  if (e.reference_count) j["reference_count"] = *e.reference_count;
  if (e.success_prob) j["success_prob"] = *e.success_prob;
  if (with_distribution) j["distribution"] = e.distribution;
  return j;
}

inline nlohmann::ordered_json to_json(const QuantumState& s) {
  nlohmann::ordered_json layout = nlohmann::ordered_json::array();
  for (const auto& r : s.layout().registers())
    layout.push_back({{"name", r.name}, {"width", r.width}});
  nlohmann::ordered_json amps = nlohmann::ordered_json::array();
  const auto a = s.amplitudes();
  for (BasisIndex x = 0; x < a.size(); ++x)
    if (std::abs(a[x]) > 1e-12) amps.push_back({x, a[x].real(), a[x].imag()});
  return {{"layout", layout}, {"amplitudes", amps}};
}

inline nlohmann::ordered_json to_json(const ProtocolTranscript& t, bool verbose = false) {
  nlohmann::ordered_json j;
  j["format"] = "pqgi-trace";
  j["version"] = 1;
  j["config"] = {{"adversary", t.adversary},
                 {"mode", to_string(t.mode)},
                 {"seed", t.seed},
                 {"counting_bits", t.inputs.p}};
  j["inputs"] = {{"M", t.inputs.M}, {"N", t.inputs.N}, {"R", t.inputs.R},
                 {"m", t.inputs.m}, {"n", t.inputs.n}, {"r", t.inputs.r}, {"p", t.inputs.p}};
  auto steps = nlohmann::ordered_json::array();
  for (const auto& s : t.steps) {
    nlohmann::ordered_json rec{{"step", s.step}, {"actor", s.actor}, {"action", s.action}};
    if (s.qubits) rec["qubits"] = *s.qubits;
    if (s.check_passed) rec["check_passed"] = *s.check_passed;
    if (s.probability) rec["probability"] = *s.probability;
    if (s.observed) rec["observed"] = *s.observed;
    if (!s.note.empty()) rec["note"] = s.note;
    steps.push_back(std::move(rec));
  }
  j["steps"] = std::move(steps);
  j["cheat_check_pass_probability"] = t.cheat_check_pass_probability;
  j["verdict"] = to_string(t.verdict);
  j["count_estimate"] = t.count_estimate ? to_json(*t.count_estimate, verbose) : nlohmann::ordered_json();
  j["cost"] = to_json(t.cost);
  j["notes"] = t.notes;
  if (verbose) {
    auto states = nlohmann::ordered_json::array();
    for (const auto& snap : t.snapshots) {
      auto s = to_json(snap.state);
      s["label"] = snap.label;
      states.push_back(std::move(s));
    }
    j["states"] = std::move(states);
  }
  j["complete"] = true;
  return j;
}

/// Writes via a temporary file and rename, so a failed write never leaves a
/// trace behind that looks complete.
inline void write_trace(const std::filesystem::path& path, const ProtocolTranscript& t,
                        bool verbose = false) {
  const std::string text = to_json(t, verbose).dump(2) + "\n";
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write trace to " + tmp.string());
    out << text;
    if (!out.flush()) throw std::runtime_error("failed writing trace to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace pqgi
