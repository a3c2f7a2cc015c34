#include "mms/space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <tuple>

namespace mms {

namespace {

std::vector<double> dijkstra(const std::vector<std::vector<Neighbor>>& adjacency, Index source) {
  const auto n = adjacency.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& nb : adjacency[u]) {
      const double cand = d + nb.length;
      if (cand < dist[nb.node]) {
        dist[nb.node] = cand;
        heap.emplace(cand, nb.node);
      }
    }
  }
  return dist;
}

}  // namespace

MetricMeasureSpace build_space(std::vector<Edge> edges, Eigen::VectorXd measure,
                               std::vector<std::string> labels) {
  const Index n = static_cast<Index>(measure.size());
  if (n == 0) throw Error(ErrorCode::InvalidInput, "space has no nodes");
  for (Index i = 0; i < n; ++i) {
    if (!(measure[i] > 0.0) || !std::isfinite(measure[i]))
      throw Error(ErrorCode::NonpositiveWeight, "measure of node " + std::to_string(i) +
                                                    " must be positive and finite");
  }
  if (labels.empty()) {
    labels.reserve(n);
    for (Index i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  } else if (static_cast<Index>(labels.size()) != n) {
    throw Error(ErrorCode::InvalidInput, "label count does not match node count");
  }

  MetricMeasureSpace s;
  s.adjacency_.assign(n, {});
  // Merge parallel edges, keeping the shortest.
  std::vector<Edge> merged;
  {
    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (const auto& e : edges) {
      if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
        throw Error(ErrorCode::InvalidInput, "edge endpoint out of range");
      if (e.u == e.v) throw Error(ErrorCode::InvalidInput, "self-loop at node " + labels[e.u]);
      if (!(e.length > 0.0) || !std::isfinite(e.length))
        throw Error(ErrorCode::NonpositiveWeight,
                    "edge " + labels[e.u] + "-" + labels[e.v] + " must have positive length");
      canon.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.length});
    }
    std::sort(canon.begin(), canon.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.u, a.v, a.length) < std::tie(b.u, b.v, b.length);
    });
    for (const auto& e : canon) {
      if (!merged.empty() && merged.back().u == e.u && merged.back().v == e.v) continue;
      merged.push_back(e);
    }
  }
  for (const auto& e : merged) {
    s.adjacency_[e.u].push_back({e.v, e.length});
    s.adjacency_[e.v].push_back({e.u, e.length});
  }
  for (auto& adj : s.adjacency_)
    std::sort(adj.begin(), adj.end(), [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });

  s.dist_.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto row = dijkstra(s.adjacency_, i);
    for (Index j = 0; j < n; ++j) {
      if (!std::isfinite(row[j]))
        throw Error(ErrorCode::DisconnectedGraph,
                    "node " + labels[j] + " unreachable from node " + labels[i]);
      s.dist_(i, j) = row[j];
    }
  }
  // Runs from both endpoints may round differently; keep the metric symmetric.
  for (Index i = 0; i < n; ++i) {
    s.dist_(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      const double d = std::min(s.dist_(i, j), s.dist_(j, i));
      s.dist_(i, j) = s.dist_(j, i) = d;
    }
  }

  s.edges_ = std::move(merged);
  s.measure_ = std::move(measure);
  s.labels_ = std::move(labels);

  s.order_.resize(n);
  s.sorted_dist_.resize(n);
  s.prefix_mass_.resize(n);
  for (Index c = 0; c < n; ++c) {
    auto& ord = s.order_[c];
    ord.resize(n);
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(),
                     [&](Index a, Index b) { return s.dist_(c, a) < s.dist_(c, b); });
    auto& sd = s.sorted_dist_[c];
    auto& pm = s.prefix_mass_[c];
    sd.resize(n);
    pm.resize(n);
    double acc = 0.0;
    for (Index k = 0; k < n; ++k) {
      sd[k] = s.dist_(c, ord[k]);
      acc += s.measure_[ord[k]];
      pm[k] = acc;
    }
  }
  return s;
}

std::optional<double> MetricMeasureSpace::edge_length(Index a, Index b) const {
  const auto& adj = adjacency_[a];
  auto it = std::lower_bound(adj.begin(), adj.end(), b,
                             [](const Neighbor& nb, Index v) { return nb.node < v; });
  if (it == adj.end() || it->node != b) return std::nullopt;
  return it->length;
}

Index MetricMeasureSpace::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(ErrorCode::InvalidInput, "unknown node id '" + label + "'");
  return static_cast<Index>(it - labels_.begin());
}

Index MetricMeasureSpace::ball_count(Index center, double r) const {
  const auto& sd = sorted_dist_[center];
  return static_cast<Index>(std::upper_bound(sd.begin(), sd.end(), r) - sd.begin());
}

double MetricMeasureSpace::ball_mass(Index center, double r) const {
  const Index k = ball_count(center, r);
  return k > 0 ? prefix_mass_[center][k - 1] : 0.0;
}

MetricMeasureSpace MetricMeasureSpace::with_override_metric(Eigen::MatrixXd metric) const {
  if (metric.rows() != size() || metric.cols() != size())
    throw Error(ErrorCode::InvalidInput, "override metric has wrong shape");
  MetricMeasureSpace copy = *this;
  copy.override_ = std::move(metric);
  return copy;
}

Ball ball(const MetricMeasureSpace& space, Index center, double radius) {
  if (radius < 0.0) throw Error(ErrorCode::InvalidInput, "ball radius must be nonnegative");
  Ball b;
  b.center = center;
  b.radius = radius;
  const Index k = space.ball_count(center, radius);
  auto ord = space.order(center);
  b.members.assign(ord.begin(), ord.begin() + k);
  b.mass = space.prefix_mass(center)[k - 1];
  return b;
}

std::vector<double> distance_levels(const MetricMeasureSpace& space, Index center) {
  std::vector<double> levels;
  for (double d : space.sorted_dist(center)) {
    if (d > 0.0 && (levels.empty() || d != levels.back())) levels.push_back(d);
  }
  return levels;
}

double doubling_constant(const MetricMeasureSpace& space, std::optional<double> r_max) {
  double best = 1.0;
  for (Index x = 0; x < space.size(); ++x) {
    std::vector<double> critical;
    for (double d : distance_levels(space, x)) {
      critical.push_back(d);
      critical.push_back(d / 2.0);
    }
    for (double r : critical) {
      if (r_max && !(r < *r_max)) continue;
      const double ratio = space.ball_mass(x, 2.0 * r) / space.ball_mass(x, r);
      best = std::max(best, ratio);
    }
  }
  return best;
}

double quasiconvexity_constant(const MetricMeasureSpace& space,
                               const std::optional<Eigen::MatrixXd>& override_dist) {
  const Eigen::MatrixXd* cmp = nullptr;
  if (override_dist) {
    cmp = &*override_dist;
  } else if (space.override_metric()) {
    cmp = &*space.override_metric();
  }
  if (!cmp || space.size() < 2) return 1.0;
  double best = 0.0;
  for (Index i = 0; i < space.size(); ++i) {
    for (Index j = i + 1; j < space.size(); ++j) {
      const double d = (*cmp)(i, j);
      if (!(d > 0.0)) throw Error(ErrorCode::InvalidInput, "override metric vanishes off the diagonal");
      best = std::max(best, space.dist(i, j) / d);
    }
  }
  return best;
}

}  // namespace mms
