#include "mms/gallery.hpp"

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <utility>

namespace mms {

MetricMeasureSpace make_grid(int width, int height, double edge_len, double measure) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidInput, "grid dimensions must be >= 1");
  std::vector<Edge> edges;
  std::vector<std::string> labels;
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      const int id = j * width + i;
      labels.push_back(std::to_string(i) + "," + std::to_string(j));
      if (i + 1 < width) edges.push_back({id, id + 1, edge_len});
      if (j + 1 < height) edges.push_back({id, id + width, edge_len});
    }
  }
  return build_space(std::move(edges), Eigen::VectorXd::Constant(width * height, measure),
                     std::move(labels));
}

MetricMeasureSpace make_path_graph(int n, double edge_len, double measure) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "path needs at least one node");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, edge_len});
  return build_space(std::move(edges), Eigen::VectorXd::Constant(n, measure));
}

MetricMeasureSpace make_complete(int n, double edge_len, double measure) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "complete graph needs at least one node");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, edge_len});
  return build_space(std::move(edges), Eigen::VectorXd::Constant(n, measure));
}

MetricMeasureSpace make_theta(double short_len, double long_len, int subdivisions,
                              double measure) {
  if (!(short_len > 0.0) || !(long_len > 0.0))
    throw Error(ErrorCode::NonpositiveWeight, "arc lengths must be positive");
  if (subdivisions < 1) throw Error(ErrorCode::InvalidInput, "subdivisions must be >= 1");
  std::vector<Edge> edges;
  std::vector<std::string> labels{"x", "y"};
  auto add_arc = [&](double len, const std::string& prefix) {
    const int m = std::max(1, static_cast<int>(std::lround(len * subdivisions)));
    const double step = len / m;
    int prev = 0;
    for (int k = 1; k < m; ++k) {
      const int id = static_cast<int>(labels.size());
      labels.push_back(prefix + std::to_string(k));
      edges.push_back({prev, id, step});
      prev = id;
    }
    edges.push_back({prev, 1, step});
  };
  add_arc(short_len, "s");
  add_arc(long_len, "l");
  const int n = static_cast<int>(labels.size());
  return build_space(std::move(edges), Eigen::VectorXd::Constant(n, measure), std::move(labels));
}

MetricMeasureSpace make_random_connected(int n, int extra, std::uint64_t seed, double len_lo,
                                         double len_hi) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "random graph needs at least one node");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> length(len_lo, len_hi);
  std::uniform_real_distribution<double> mass(0.5, 2.0);
  std::vector<Edge> edges;
  std::set<std::pair<int, int>> present;
  for (int i = 1; i < n; ++i) {
    const int j = std::uniform_int_distribution<int>(0, i - 1)(rng);
    edges.push_back({j, i, length(rng)});
    present.insert({j, i});
  }
  const long max_edges = static_cast<long>(n) * (n - 1) / 2;
  std::uniform_int_distribution<int> node(0, n - 1);
  for (int added = 0; added < extra && static_cast<long>(present.size()) < max_edges;) {
    int a = node(rng), b = node(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!present.insert({a, b}).second) continue;
    edges.push_back({a, b, length(rng)});
    ++added;
  }
  Eigen::VectorXd mu(n);
  for (int i = 0; i < n; ++i) mu[i] = mass(rng);
  return build_space(std::move(edges), std::move(mu));
}

namespace {

WeightedLine symmetric_cells(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidInput, "weighted line needs n >= 2");
  WeightedLine line;
  line.positions.resize(n);
  for (int i = 0; i < n; ++i) line.positions[i] = static_cast<double>(2 * i + 1 - n) / n;
  line.lambda = Eigen::VectorXd::Constant(n, 2.0 / n);
  return line;
}

}  // namespace

WeightedLine make_weighted_line(int n, const std::function<double(double)>& weight_fn) {
  WeightedLine line = symmetric_cells(n);
  line.omega = line.positions.unaryExpr(weight_fn);
  validate(line);
  return line;
}

WeightedLine make_power_weight_line(int n, double a) {
  if (!(a > -1.0)) throw Error(ErrorCode::InvalidExponent, "power weight needs a > -1");
  WeightedLine line = symmetric_cells(n);
  auto antiderivative = [a](double x) {
    return std::copysign(std::pow(std::abs(x), a + 1.0) / (a + 1.0), x);
  };
  line.omega.resize(n);
  for (int i = 0; i < n; ++i) {
    const double lo = static_cast<double>(2 * i - n) / n;
    const double hi = static_cast<double>(2 * i + 2 - n) / n;
    line.omega[i] = (antiderivative(hi) - antiderivative(lo)) / (hi - lo);
  }
  validate(line);
  return line;
}

MetricMeasureSpace line_space(const WeightedLine& line) {
  validate(line);
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < line.size(); ++i)
    edges.push_back({i, i + 1, line.positions[i + 1] - line.positions[i]});
  return build_space(std::move(edges), line.mu());
}

MetricMeasureSpace snowflake_view(const MetricMeasureSpace& space, double exponent) {
  if (!(exponent > 0.0 && exponent <= 1.0))
    throw Error(ErrorCode::InvalidExponent, "snowflake exponent must lie in (0, 1]");
  return space.with_override_metric(space.distances().array().pow(exponent).matrix());
}

}  // namespace mms
