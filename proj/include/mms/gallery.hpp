#pragma once

#include <cstdint>
#include <functional>

#include "mms/space.hpp"
#include "mms/weights.hpp"

namespace mms {

/// width x height 4-neighbor grid. Node (i, j) has index j * width + i and
/// label "i,j".
MetricMeasureSpace make_grid(int width, int height, double edge_len = 1.0, double measure = 1.0);

/// Path 0 - 1 - ... - (n-1).
MetricMeasureSpace make_path_graph(int n, double edge_len = 1.0, double measure = 1.0);

/// Complete graph on n nodes.
MetricMeasureSpace make_complete(int n, double edge_len = 1.0, double measure = 1.0);

/// Two arcs between x (index 0) and y (index 1). Each arc of length L is split
/// into max(1, round(L * subdivisions)) equal edges. Interior nodes of the
/// short arc come first, labelled s1, s2, ..., then the long arc's l1, l2, ...
MetricMeasureSpace make_theta(double short_len, double long_len, int subdivisions = 1,
                              double measure = 1.0);

/// Connected random graph: a random spanning tree plus `extra` random edges,
/// lengths uniform in [len_lo, len_hi], masses uniform in [0.5, 2].
MetricMeasureSpace make_random_connected(int n, int extra, std::uint64_t seed,
                                         double len_lo = 1.0, double len_hi = 2.0);

/// Weighted line on n unit cells with omega(x_i) = weight_fn(x_i), positions
/// symmetric around 0 in [-1, 1]. Throws NonpositiveWeight on a zero weight.
WeightedLine make_weighted_line(int n, const std::function<double(double)>& weight_fn);

/// Weighted line on n equal cells of [-1, 1] with omega the exact cell
/// average of |x|^a, so that the center cell keeps a positive weight.
WeightedLine make_power_weight_line(int n, double a);

/// Path-graph view of a weighted line: consecutive cells joined by edges of
/// length equal to the distance of their positions, node mass omega * lambda.
MetricMeasureSpace line_space(const WeightedLine& line);

/// Attaches dist^exponent as override metric (exponent in (0, 1]).
MetricMeasureSpace snowflake_view(const MetricMeasureSpace& space, double exponent);

}  // namespace mms
