#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mms/errors.hpp"

namespace mms {

using Index = int;

/// Real-valued function on the nodes of a space: test functions, obstacles,
/// gradients and weights all use this representation.
using ScalarField = Eigen::VectorXd;

struct Edge {
  Index u;
  Index v;
  double length;
};

struct Neighbor {
  Index node;
  double length;
};

/// Finite metric measure space: a connected, undirected graph with positive
/// edge lengths and positive node masses, metrized by shortest paths.
///
/// Immutable after construction. Besides the distance matrix it caches, for
/// each center, the nodes sorted by distance together with prefix masses, so
/// that every closed ball is a prefix of that order.
class MetricMeasureSpace {
 public:
  MetricMeasureSpace() = default;

  Index size() const { return static_cast<Index>(measure_.size()); }

  double dist(Index a, Index b) const { return dist_(a, b); }
  const Eigen::MatrixXd& distances() const { return dist_; }
  const Eigen::VectorXd& measure() const { return measure_; }
  double total_measure() const { return measure_.sum(); }

  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Neighbor> neighbors(Index node) const { return adjacency_[node]; }
  std::optional<double> edge_length(Index a, Index b) const;

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(Index node) const { return labels_[node]; }
  Index index_of(const std::string& label) const;

  /// Nodes ordered by distance from `center` (the center first).
  std::span<const Index> order(Index center) const { return order_[center]; }
  /// Distances matching order(center).
  std::span<const double> sorted_dist(Index center) const { return sorted_dist_[center]; }
  /// Prefix sums of the measure along order(center); entry k is the mass of
  /// the first k+1 nodes.
  std::span<const double> prefix_mass(Index center) const { return prefix_mass_[center]; }

  /// Number of nodes in the closed ball B(center, r).
  Index ball_count(Index center, double r) const;
  double ball_mass(Index center, double r) const;

  /// Diagnostic metric that replaces `dist` only for quasiconvexity and
  /// PI-failure studies; curve lengths always stay edge sums.
  const std::optional<Eigen::MatrixXd>& override_metric() const { return override_; }
  MetricMeasureSpace with_override_metric(Eigen::MatrixXd metric) const;

  double diameter() const { return size() ? dist_.maxCoeff() : 0.0; }

 private:
  friend MetricMeasureSpace build_space(std::vector<Edge> edges, Eigen::VectorXd measure,
                                        std::vector<std::string> labels);

  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  Eigen::VectorXd measure_;
  Eigen::MatrixXd dist_;
  std::vector<std::string> labels_;
  std::vector<std::vector<Index>> order_;
  std::vector<std::vector<double>> sorted_dist_;
  std::vector<std::vector<double>> prefix_mass_;
  std::optional<Eigen::MatrixXd> override_;
};

/// Validates the graph and computes the all-pairs shortest-path metric.
/// Parallel edges are merged keeping the shortest one. Labels default to the
/// decimal node index.
///
/// Throws NonpositiveWeight for non-positive edge lengths or masses,
/// DisconnectedGraph when some node is unreachable, InvalidInput for
/// self-loops or out-of-range endpoints.
MetricMeasureSpace build_space(std::vector<Edge> edges, Eigen::VectorXd measure,
                               std::vector<std::string> labels = {});

/// Closed ball {y : d(center, y) <= radius}.
struct Ball {
  Index center = 0;
  double radius = 0.0;
  std::vector<Index> members;  // sorted by distance from the center
  double mass = 0.0;
};

Ball ball(const MetricMeasureSpace& space, Index center, double radius);

/// Positive radii at which some ball around `center` changes: the distinct
/// nonzero distances from the center, ascending.
std::vector<double> distance_levels(const MetricMeasureSpace& space, Index center);

/// sup over centers and radii r (r < r_max when given) of mu(B(x,2r))/mu(B(x,r)).
/// The supremum over real radii is taken over the finite critical set
/// {d(x,y), d(x,y)/2}, where the ratio changes.
double doubling_constant(const MetricMeasureSpace& space,
                         std::optional<double> r_max = std::nullopt);

/// Max over node pairs of path distance divided by the comparison metric:
/// `override_dist` if given, else the space's override metric, else the
/// path metric itself (which yields 1).
double quasiconvexity_constant(const MetricMeasureSpace& space,
                               const std::optional<Eigen::MatrixXd>& override_dist = std::nullopt);

}  // namespace mms
