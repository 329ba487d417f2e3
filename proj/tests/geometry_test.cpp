#include <gtest/gtest.h>

#include <random>
#include <set>

#include "pqgi/geometry.hpp"

namespace pqgi {
namespace {

const GridConfig k4x4{4, 4};

TEST(GridSerial, RowMajorFromOne) {
  EXPECT_EQ(grid_serial(0, 0, k4x4), 1u);
  EXPECT_EQ(grid_serial(0, 3, k4x4), 4u);
  EXPECT_EQ(grid_serial(1, 0, k4x4), 5u);
  EXPECT_EQ(grid_serial(3, 3, k4x4), 16u);
  EXPECT_THROW(grid_serial(4, 0, k4x4), std::invalid_argument);
  EXPECT_THROW(grid_serial(0, -1, k4x4), std::invalid_argument);
}

TEST(GridSerial, RoundTripsOnRectangularGrids) {
  for (const GridConfig g : {GridConfig{1, 1}, GridConfig{3, 5}, GridConfig{7, 2}}) {
    std::set<std::uint64_t> seen;
    for (int r = 0; r < g.rows; ++r)
      for (int c = 0; c < g.cols; ++c) {
        const auto s = grid_serial(r, c, g);
        EXPECT_TRUE(seen.insert(s).second);
        EXPECT_EQ(grid_cell(s, g), std::make_pair(r, c));
      }
    EXPECT_EQ(seen.size(), g.cells());
    EXPECT_EQ(*seen.rbegin(), g.cells());
  }
}

TEST(Rasterize, UnitSquares) {
  EXPECT_EQ(rasterize({k4x4, {{0, 0, 1, 1}}, {}}).serials(), (std::vector<std::uint64_t>{1, 2, 5, 6}));
  EXPECT_EQ(rasterize({k4x4, {{1, 1, 2, 2}}, {}}).serials(), (std::vector<std::uint64_t>{6, 7, 10, 11}));
}

TEST(Rasterize, UnionOfShapesAndCells) {
  const Scene s{k4x4, {{0, 0, 0, 1}, {0, 1, 1, 1}}, {16, 2}};
  EXPECT_EQ(rasterize(s).serials(), (std::vector<std::uint64_t>{1, 2, 6, 16}));
}

TEST(Rasterize, RejectsBadScenes) {
  EXPECT_THROW(rasterize({k4x4, {}, {}}), std::invalid_argument);
  EXPECT_THROW(rasterize({k4x4, {{0, 0, 4, 0}}, {}}), std::invalid_argument);
  EXPECT_THROW(rasterize({k4x4, {{2, 0, 1, 0}}, {}}), std::invalid_argument);
  EXPECT_THROW(rasterize({k4x4, {}, {17}}), std::invalid_argument);
  EXPECT_THROW(rasterize({k4x4, {}, {0}}), std::invalid_argument);
  EXPECT_THROW(rasterize({{0, 4}, {}, {1}}), std::invalid_argument);
}

TEST(ClassicalIntersect, Examples) {
  const GridSet a({1, 2, 5, 6}), b({6, 7, 10, 11}), c({3, 4});
  const auto ab = classical_intersect(a, b);
  EXPECT_TRUE(ab.intersects);
  EXPECT_EQ(ab.common.serials(), std::vector<std::uint64_t>{6});
  EXPECT_FALSE(classical_intersect(a, c).intersects);
  EXPECT_TRUE(classical_intersect(c, c).intersects);
}

// Property: the intersection is symmetric and agrees with a membership scan.
TEST(ClassicalIntersect, AgreesWithMembershipScan) {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint64_t> x, y;
    for (std::uint64_t s = 1; s <= 16; ++s) {
      if (gen() % 3 == 0) x.push_back(s);
      if (gen() % 3 == 0) y.push_back(s);
    }
    const GridSet a(x), b(y);
    std::vector<std::uint64_t> common;
    for (auto s : x)
      for (auto u : y)
        if (s == u) common.push_back(s);
    const auto res = classical_intersect(a, b);
    EXPECT_EQ(res.common.serials(), common);
    EXPECT_EQ(res.intersects, !common.empty());
    EXPECT_EQ(classical_intersect(b, a).common, res.common);
  }
}

TEST(GridSet, SortsAndDeduplicates) {
  EXPECT_EQ(GridSet({5, 1, 5, 3}).serials(), (std::vector<std::uint64_t>{1, 3, 5}));
  EXPECT_THROW(GridSet({0, 1}), std::invalid_argument);
}

}  // namespace
}  // namespace pqgi
