#pragma once

// Plane partitioning, rasterization of shapes into grid serials, and the
// classical intersection oracle.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pqgi {

struct GridConfig {
  int rows = 0;
  int cols = 0;

  std::uint64_t cells() const {
    return static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols);
  }
  void validate() const {
    if (rows < 1 || cols < 1) throw std::invalid_argument("grid needs rows >= 1 and cols >= 1");
  }
  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

/// Cells (r0, c0)..(r1, c1) inclusive, 0-based.
struct Rect {
  int r0 = 0, c0 = 0, r1 = 0, c1 = 0;
};

struct Scene {
  GridConfig grid;
  std::vector<Rect> rects;
  std::vector<std::uint64_t> cells;

  void validate() const {
    grid.validate();
    for (const auto& r : rects) {
      if (r.r0 > r.r1 || r.c0 > r.c1)
        throw std::invalid_argument("rectangle corners are out of order");
      if (r.r0 < 0 || r.c0 < 0 || r.r1 >= grid.rows || r.c1 >= grid.cols)
        throw std::invalid_argument("rectangle lies outside the grid");
    }
    for (const auto c : cells)
      if (c < 1 || c > grid.cells())
        throw std::invalid_argument("cell " + std::to_string(c) + " outside [1, " +
                                    std::to_string(grid.cells()) + "]");
  }
};

/// Sorted unique serials in [1, R].
class GridSet {
 public:
  GridSet() = default;
  explicit GridSet(std::vector<std::uint64_t> serials) : serials_(std::move(serials)) {
    std::sort(serials_.begin(), serials_.end());
    serials_.erase(std::unique(serials_.begin(), serials_.end()), serials_.end());
    if (!serials_.empty() && serials_.front() == 0)
      throw std::invalid_argument("grid serials start at 1");
  }

  std::size_t size() const { return serials_.size(); }
  bool empty() const { return serials_.empty(); }
  const std::vector<std::uint64_t>& serials() const { return serials_; }
  friend bool operator==(const GridSet&, const GridSet&) = default;

 private:
  std::vector<std::uint64_t> serials_;
};

/// Row-major, top-left cell is 1.
inline std::uint64_t grid_serial(int row, int col, const GridConfig& grid) {
  if (row < 0 || row >= grid.rows || col < 0 || col >= grid.cols)
    throw std::invalid_argument("cell (" + std::to_string(row) + "," + std::to_string(col) +
                                ") is outside the " + std::to_string(grid.rows) + "x" +
                                std::to_string(grid.cols) + " grid");
  return static_cast<std::uint64_t>(row) * static_cast<std::uint64_t>(grid.cols) +
         static_cast<std::uint64_t>(col) + 1;
}

inline std::pair<int, int> grid_cell(std::uint64_t serial, const GridConfig& grid) {
  if (serial < 1 || serial > grid.cells())
    throw std::invalid_argument("serial " + std::to_string(serial) + " is outside the grid");
  const auto idx = serial - 1;
  return {static_cast<int>(idx / static_cast<std::uint64_t>(grid.cols)),
          static_cast<int>(idx % static_cast<std::uint64_t>(grid.cols))};
}

inline GridSet rasterize(const Scene& scene) {
  scene.validate();
  std::vector<std::uint64_t> out(scene.cells.begin(), scene.cells.end());
  for (const auto& r : scene.rects)
    for (int row = r.r0; row <= r.r1; ++row)
      for (int col = r.c0; col <= r.c1; ++col) out.push_back(grid_serial(row, col, scene.grid));
  GridSet set(std::move(out));
  if (set.empty()) throw std::invalid_argument("scene covers no cells");
  return set;
}

struct Intersection {
  bool intersects = false;
  GridSet common;
};

inline Intersection classical_intersect(const GridSet& a, const GridSet& b) {
  std::vector<std::uint64_t> common;
  std::set_intersection(a.serials().begin(), a.serials().end(), b.serials().begin(),
                        b.serials().end(), std::back_inserter(common));
  const bool hit = !common.empty();
  return {hit, GridSet(std::move(common))};
}

}  // namespace pqgi
