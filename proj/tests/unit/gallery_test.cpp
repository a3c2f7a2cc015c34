#include <gtest/gtest.h>

#include <cmath>

#include "mms/gallery.hpp"

namespace mms {
namespace {

TEST(Gallery, Grid) {
  const auto g = make_grid(4, 3);
  EXPECT_EQ(g.size(), 12);
  EXPECT_EQ(g.edges().size(), 17u);
  EXPECT_EQ(g.label(g.index_of("3,2")), "3,2");
  EXPECT_EQ(g.index_of("1,2"), 2 * 4 + 1);
  EXPECT_EQ(g.diameter(), 5.0);
}

TEST(Gallery, PathCompleteTheta) {
  EXPECT_EQ(make_path_graph(6).diameter(), 5.0);
  const auto k = make_complete(5);
  EXPECT_EQ(k.edges().size(), 10u);
  EXPECT_EQ(k.diameter(), 1.0);
  const auto th = make_theta(2.0, 4.0, 2);
  EXPECT_EQ(th.dist(0, 1), 2.0);
  EXPECT_EQ(th.size(), 2 + 3 + 7);
  EXPECT_EQ(*th.edge_length(0, th.index_of("s1")), 0.5);
  EXPECT_EQ(th.dist(th.index_of("l4"), 0), 2.0);
}

TEST(Gallery, RandomIsDeterministic) {
  const auto a = make_random_connected(20, 7, 99);
  const auto b = make_random_connected(20, 7, 99);
  EXPECT_EQ(a.distances(), b.distances());
  EXPECT_EQ(a.measure(), b.measure());
  const auto c = make_random_connected(20, 7, 100);
  EXPECT_NE(a.distances(), c.distances());
  EXPECT_GE(a.measure().minCoeff(), 0.5);
  EXPECT_LE(a.measure().maxCoeff(), 2.0);
}

TEST(Gallery, PowerWeightCellAverages) {
  const int n = 5;
  const auto line = make_power_weight_line(n, 1.0);
  // Cells of width 0.4; the center cell [-0.2, 0.2] averages |x| to 0.1.
  EXPECT_NEAR(line.omega[2], 0.1, 1e-15);
  EXPECT_NEAR(line.omega[0], 0.8, 1e-15);
  EXPECT_NEAR(line.positions[0], -0.8, 1e-15);
  EXPECT_NEAR(line.lambda.sum(), 2.0, 1e-15);
  EXPECT_NEAR(line.omega[1], line.omega[3], 0.0);
  const auto s = line_space(line);
  EXPECT_NEAR(s.dist(0, 4), 1.6, 1e-15);
}

TEST(Gallery, SnowflakeOverride) {
  const auto p = make_path_graph(5);
  const auto f = snowflake_view(p, 0.5);
  ASSERT_TRUE(f.override_metric().has_value());
  EXPECT_EQ((*f.override_metric())(0, 4), 2.0);
  EXPECT_EQ(f.dist(0, 4), 4.0);
  EXPECT_THROW(snowflake_view(p, 1.5), Error);
}

}  // namespace
}  // namespace mms
