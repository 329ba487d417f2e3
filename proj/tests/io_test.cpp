#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pqgi/io.hpp"

namespace pqgi {
namespace {

const std::filesystem::path kScenes = PQGI_SCENE_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_scene(text);
  } catch (const SceneError& e) {
    return e.what();
  }
  return "";
}

TEST(Scene, ParsesRectsAndCells) {
  const auto s = parse_scene(R"({"grid": {"rows": 3, "cols": 5},
      "shapes": [{"rect": [0, 0, 0, 1]}, {"cells": [15]}], "cells": [7]})");
  EXPECT_EQ(s.grid, (GridConfig{3, 5}));
  EXPECT_EQ(rasterize(s).serials(), (std::vector<std::uint64_t>{1, 2, 7, 15}));
}

TEST(Scene, DiagnosticsNameTheField) {
  EXPECT_EQ(error_of(R"({"shapes": []})"), "scene: missing field \"grid\"");
  EXPECT_EQ(error_of(R"({"grid": {"rows": 4}})"), "scene.grid: missing field \"cols\"");
  EXPECT_EQ(error_of(R"({"grid": {"rows": 4, "cols": 4}, "shapes": [{"rect": [0, 0, 5]}]})"),
            "scene.shapes[0].rect: expected [r0, c0, r1, c1]");
  EXPECT_EQ(error_of(R"({"grid": {"rows": 4, "cols": 4}, "shapes": [{"rect": [0, 0, 4, 0]}]})"),
            "scene.shapes[0].rect: outside the 4x4 grid");
  EXPECT_EQ(error_of(R"({"grid": {"rows": 4, "cols": 4}, "cells": [3, 17]})"),
            "scene.cells: serial 17 outside [1, 16]");
  EXPECT_EQ(error_of(R"({"grid": {"rows": 4, "cols": 4}, "cells": [0]})"),
            "scene.cells[0]: serials start at 1");
  EXPECT_EQ(error_of(R"({"grid": {"rows": 4, "cols": 4}, "shapes": []})"), "scene: scene covers no cells");
  EXPECT_EQ(error_of(R"({"grid": {"rows": 4, "cols": "4"}})"), "scene.grid.cols: expected an integer");
  EXPECT_NE(error_of("{\"grid\": \n{\"rows\": 4,,}}").find("line 2"), std::string::npos);
}

TEST(Scene, LoadsBundledFiles) {
  EXPECT_EQ(rasterize(load_scene(kScenes / "alice_squares.json")).serials(),
            (std::vector<std::uint64_t>{1, 2, 5, 6}));
  EXPECT_EQ(rasterize(load_scene(kScenes / "bob_squares.json")).serials(),
            (std::vector<std::uint64_t>{6, 7, 10, 11}));
  EXPECT_THROW(load_scene(kScenes / "empty.json"), SceneError);
  EXPECT_THROW(load_scene(kScenes / "bad_rect.json"), SceneError);
  EXPECT_THROW(load_scene(kScenes / "no_such_file.json"), SceneError);
}

TEST(Trace, ContainsVerdictAndCompletionMarker) {
  const auto a = load_scene(kScenes / "alice_squares.json");
  const auto b = load_scene(kScenes / "bob_squares.json");
  const auto j = to_json(run_protocol(a, b, {}, AdversaryStrategy::honest()));
  EXPECT_EQ(j["verdict"], "INTERSECT");
  EXPECT_EQ(j["count_estimate"]["y"], 10);
  EXPECT_EQ(j["cost"]["total_qubits"], 18);
  EXPECT_EQ(j["complete"], true);
  EXPECT_FALSE(j.contains("states"));
  EXPECT_FALSE(j["count_estimate"].contains("distribution"));

  const auto v = to_json(run_protocol(a, b, {}, AdversaryStrategy::honest(), {true}), true);
  EXPECT_EQ(v["states"].size(), 3u);
  EXPECT_EQ(v["count_estimate"]["distribution"].size(), 128u);

  const auto ab = to_json(run_protocol(a, b, {}, AdversaryStrategy::bob_tamper(1)));
  EXPECT_EQ(ab["verdict"], "ABORT");
  EXPECT_TRUE(ab["count_estimate"].is_null());
}

TEST(Trace, SameSeedWritesIdenticalBytes) {
  const auto dir = std::filesystem::temp_directory_path() / "pqgi_io_test";
  std::filesystem::create_directories(dir);
  const auto a = load_scene(kScenes / "alice_squares.json");
  const auto b = load_scene(kScenes / "bob_squares.json");
  CountingConfig cfg;
  cfg.mode = MeasureMode::sample;
  cfg.seed = 1234;
  write_trace(dir / "one.json", run_protocol(a, b, cfg, AdversaryStrategy::bob_measure_data(), {true}), true);
  write_trace(dir / "two.json", run_protocol(a, b, cfg, AdversaryStrategy::bob_measure_data(), {true}), true);
  const auto one = slurp(dir / "one.json");
  EXPECT_FALSE(one.empty());
  EXPECT_EQ(one, slurp(dir / "two.json"));
  EXPECT_FALSE(std::filesystem::exists(dir / "one.json.tmp"));
  std::filesystem::remove_all(dir);
}

TEST(Trace, UnwritablePathThrowsAndLeavesNothing) {
  const auto target = std::filesystem::temp_directory_path() / "pqgi_missing_dir" / "t.json";
  const auto a = load_scene(kScenes / "alice_disjoint.json");
  const auto b = load_scene(kScenes / "bob_disjoint.json");
  EXPECT_THROW(write_trace(target, run_protocol(a, b, {}, AdversaryStrategy::honest())), std::runtime_error);
  EXPECT_FALSE(std::filesystem::exists(target));
}

}  // namespace
}  // namespace pqgi
