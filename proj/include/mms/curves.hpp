#pragma once

#include <limits>
#include <vector>

#include "mms/space.hpp"

namespace mms {

/// Edge path x_0, ..., x_m. `lengths[i]` is the length of edge (x_i, x_{i+1}).
struct CurvePath {
  std::vector<Index> nodes;
  std::vector<double> lengths;

  Index front() const { return nodes.front(); }
  Index back() const { return nodes.back(); }
  bool empty() const { return nodes.empty(); }
  std::size_t edge_count() const { return lengths.size(); }
};

/// Builds a path from a node sequence, looking up edge lengths. Throws
/// InvalidInput if some consecutive pair is not an edge.
CurvePath make_path(const MetricMeasureSpace& space, std::vector<Index> nodes);

/// Trapezoid contribution of one traversed edge. Every integral in the
/// library goes through this so that solver and oracle agree bit for bit.
inline double edge_cost(double length, double gu, double gv) { return length * ((gu + gv) * 0.5); }

/// Inclusive length budget test with a relative tolerance of 1e-12, absorbing
/// rounding differences between summation orders of the same path.
inline bool within_budget(double length, double budget) {
  return length <= budget * (1.0 + 1e-12);
}

/// Traversal length (an edge used twice counts twice).
double curve_length(const CurvePath& path);

/// Trapezoid line integral: sum of len(u,v) (g(u) + g(v)) / 2, accumulated in
/// path order.
double curve_integral(const CurvePath& path, const ScalarField& g);

struct ParetoPoint {
  double length;
  double cost;
  CurvePath path;
};

/// Path from x to y with Len <= budget minimizing the trapezoid integral of g.
/// Exact bi-criteria label setting over (length, cost) labels with Pareto
/// dominance; ties go to the shorter path, then the lexicographically smaller
/// node sequence. Throws NoFeasiblePath when budget < d(x, y).
CurvePath min_obstruction_path(const MetricMeasureSpace& space, Index x, Index y,
                               const ScalarField& g, double budget);

/// Full Pareto frontier of (length, cost) at y within the budget, ascending
/// in length (and therefore strictly descending in cost).
std::vector<ParetoPoint> pareto_frontier(const MetricMeasureSpace& space, Index x, Index y,
                                         const ScalarField& g, double budget);

/// Min-cost path with no length restriction (Dijkstra on trapezoid costs).
CurvePath cheapest_path(const MetricMeasureSpace& space, Index x, Index y, const ScalarField& g);

/// Min trapezoid cost from x to every node, no length restriction.
std::vector<double> cheapest_costs(const MetricMeasureSpace& space, Index x, const ScalarField& g);

/// Brute-force enumeration of every x-y walk within the budget that uses each
/// edge at most twice. Returned in discovery order, or sorted by cost (then
/// length) when g is supplied. Throws TooLarge above `node_cap` nodes.
std::vector<CurvePath> enumerate_paths_oracle(const MetricMeasureSpace& space, Index x, Index y,
                                              double budget, int node_cap = 10,
                                              const ScalarField* g = nullptr);

/// min over pairs x != y of [cheapest g-integral from x to y] - |f(x) - f(y)|.
/// Nonnegative iff g is a discrete upper gradient of f.
double upper_gradient_check(const MetricMeasureSpace& space, const ScalarField& f,
                            const ScalarField& g);

}  // namespace mms
