#pragma once

// Independent, deliberately naive re-implementations used as test oracles.
// None of them reuse the cached orders or prefix masses of the library.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mms/space.hpp"

namespace mms::testing {

// All-pairs distances by Floyd-Warshall on the raw edge list.
Eigen::MatrixXd floyd_warshall(Index n, const std::vector<Edge>& edges);

// Hop counts from a source on an unweighted view of the graph.
std::vector<int> bfs_hops(const MetricMeasureSpace& space, Index source);

double ball_mass(const MetricMeasureSpace& space, Index x, double r);

// sup over closed balls B(x, rho), 0 <= rho <= s, of the average of |f|^p.
double maximal_power(const MetricMeasureSpace& space, const Eigen::VectorXd& f, double p,
                     double s, Index x);

double doubling(const MetricMeasureSpace& space, std::optional<double> r_max = std::nullopt);

struct SimplePath {
  std::vector<Index> nodes;
  double length = 0.0;
};

// Every simple x-y path of length <= budget, by depth-first search.
std::vector<SimplePath> simple_paths(const MetricMeasureSpace& space, Index x, Index y,
                                     double budget);

double trapezoid(const MetricMeasureSpace& space, const std::vector<Index>& nodes,
                 const Eigen::VectorXd& g);

// Best trapezoid cost over simple paths within the budget (+inf if none).
double min_cost(const MetricMeasureSpace& space, Index x, Index y, const Eigen::VectorXd& g,
                double budget);

// Largest ratio of (1/d) min-cost over g to M_{1,Cd}g(x) + M_{1,Cd}g(y), over
// all nonnegative g and all pairs, solved as one linear program per pair.
// This is the p = 1 connectivity constant without the cap g <= 1, which is
// the limit of alpha(tau)/tau as tau -> 0 and an upper bound for every tau.
double ap1_constant_lp(const MetricMeasureSpace& space, double C);

// Direct evaluation of the Poincare ratio on one ball.
double pi_ratio_direct(const MetricMeasureSpace& space, const Eigen::VectorXd& f, Index x,
                       double r, double C, double p);

MetricMeasureSpace random_space(std::mt19937_64& rng, int n_min, int n_max, double len_lo = 1.0,
                                double len_hi = 2.0);

}  // namespace mms::testing
