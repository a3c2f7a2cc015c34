#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

#include "lp.hpp"
#include "mms/gallery.hpp"

namespace mms::testing {

Eigen::MatrixXd floyd_warshall(Index n, const std::vector<Edge>& edges) {
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, inf);
  for (Index i = 0; i < n; ++i) d(i, i) = 0.0;
  for (const auto& e : edges) {
    d(e.u, e.v) = std::min(d(e.u, e.v), e.length);
    d(e.v, e.u) = std::min(d(e.v, e.u), e.length);
  }
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
  return d;
}

std::vector<int> bfs_hops(const MetricMeasureSpace& space, Index source) {
  std::vector<int> hops(space.size(), -1);
  std::queue<Index> q;
  hops[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const Index u = q.front();
    q.pop();
    for (const auto& e : space.edges()) {
      Index v = -1;
      if (e.u == u) v = e.v;
      else if (e.v == u) v = e.u;
      if (v >= 0 && hops[v] < 0) {
        hops[v] = hops[u] + 1;
        q.push(v);
      }
    }
  }
  return hops;
}

namespace {
const Eigen::MatrixXd& metric_of(const MetricMeasureSpace& space) {
  return space.override_metric() ? *space.override_metric() : space.distances();
}
}  // namespace

double ball_mass(const MetricMeasureSpace& space, Index x, double r) {
  double m = 0.0;
  for (Index w = 0; w < space.size(); ++w)
    if (space.dist(x, w) <= r) m += space.measure()[w];
  return m;
}

double maximal_power(const MetricMeasureSpace& space, const Eigen::VectorXd& f, double p,
                     double s, Index x) {
  double best = 0.0;
  for (Index z = 0; z < space.size(); ++z) {
    const double rho = space.dist(x, z);
    if (rho > s) continue;
    double mass = 0.0, sum = 0.0;
    for (Index w = 0; w < space.size(); ++w)
      if (space.dist(x, w) <= rho) {
        mass += space.measure()[w];
        sum += space.measure()[w] * std::pow(std::abs(f[w]), p);
      }
    best = std::max(best, sum / mass);
  }
  return best;
}

double doubling(const MetricMeasureSpace& space, std::optional<double> r_max) {
  double best = 1.0;
  for (Index x = 0; x < space.size(); ++x)
    for (Index z = 0; z < space.size(); ++z)
      for (double r : {space.dist(x, z), space.dist(x, z) / 2.0}) {
        if (!(r > 0.0)) continue;
        if (r_max && !(r < *r_max)) continue;
        best = std::max(best, ball_mass(space, x, 2.0 * r) / ball_mass(space, x, r));
      }
  return best;
}

std::vector<SimplePath> simple_paths(const MetricMeasureSpace& space, Index x, Index y,
                                     double budget) {
  std::vector<SimplePath> out;
  std::vector<bool> used(space.size(), false);
  SimplePath cur;
  cur.nodes.push_back(x);
  used[x] = true;
  auto rec = [&](auto&& self, Index u) -> void {
    if (u == y) {
      out.push_back(cur);
      return;
    }
    for (const auto& nb : space.neighbors(u)) {
      if (used[nb.node]) continue;
      const double len = cur.length + nb.length;
      if (len > budget * (1.0 + 1e-12)) continue;
      used[nb.node] = true;
      cur.nodes.push_back(nb.node);
      const double saved = cur.length;
      cur.length = len;
      self(self, nb.node);
      cur.length = saved;
      cur.nodes.pop_back();
      used[nb.node] = false;
    }
  };
  rec(rec, x);
  return out;
}

double trapezoid(const MetricMeasureSpace& space, const std::vector<Index>& nodes,
                 const Eigen::VectorXd& g) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    sum += *space.edge_length(nodes[i], nodes[i + 1]) * ((g[nodes[i]] + g[nodes[i + 1]]) * 0.5);
  return sum;
}

double min_cost(const MetricMeasureSpace& space, Index x, Index y, const Eigen::VectorXd& g,
                double budget) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : simple_paths(space, x, y, budget))
    best = std::min(best, trapezoid(space, p.nodes, g));
  return best;
}

double ap1_constant_lp(const MetricMeasureSpace& space, double C) {
  const Index n = space.size();
  double best = 0.0;
  for (Index x = 0; x < n; ++x)
    for (Index y = x + 1; y < n; ++y) {
      const double r = space.dist(x, y);
      const auto paths = simple_paths(space, x, y, C * r);
      const Index t = n, a = n + 1, b = n + 2;
      std::vector<Eigen::VectorXd> rows;
      for (const auto& path : paths) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(n + 3);
        row[t] = 1.0;
        for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
          const double len = *space.edge_length(path.nodes[i], path.nodes[i + 1]);
          row[path.nodes[i]] -= len / 2.0;
          row[path.nodes[i + 1]] -= len / 2.0;
        }
        rows.push_back(row);
      }
      for (auto [center, level] : {std::pair{x, a}, std::pair{y, b}}) {
        std::set<double> radii;
        for (Index z = 0; z < n; ++z)
          if (space.dist(center, z) <= C * r) radii.insert(space.dist(center, z));
        for (double rho : radii) {
          Eigen::VectorXd row = Eigen::VectorXd::Zero(n + 3);
          const double mass = ball_mass(space, center, rho);
          for (Index w = 0; w < n; ++w)
            if (space.dist(center, w) <= rho) row[w] = space.measure()[w] / mass;
          row[level] = -1.0;
          rows.push_back(row);
        }
      }
      Eigen::VectorXd norm = Eigen::VectorXd::Zero(n + 3);
      norm[a] = norm[b] = 1.0;
      rows.push_back(norm);

      Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), n + 3);
      for (std::size_t i = 0; i < rows.size(); ++i) A.row(static_cast<Eigen::Index>(i)) = rows[i];
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(A.rows());
      rhs[A.rows() - 1] = 1.0;
      Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 3);
      c[t] = 1.0;
      const LpResult res = maximize(A, rhs, c);
      if (!res.bounded) return std::numeric_limits<double>::infinity();
      best = std::max(best, res.value / r);
    }
  return best;
}

double pi_ratio_direct(const MetricMeasureSpace& space, const Eigen::VectorXd& f, Index x,
                       double r, double C, double p) {
  const Eigen::MatrixXd& d = metric_of(space);
  const Index n = space.size();
  const auto& mu = space.measure();
  double mB = 0.0, sB = 0.0;
  for (Index w = 0; w < n; ++w)
    if (d(x, w) <= r) {
      mB += mu[w];
      sB += mu[w] * f[w];
    }
  const double mean = sB / mB;
  double dev = 0.0;
  for (Index w = 0; w < n; ++w)
    if (d(x, w) <= r) dev += mu[w] * std::abs(f[w] - mean);
  dev /= mB;

  double mC = 0.0, lip = 0.0;
  for (Index w = 0; w < n; ++w) {
    if (!(d(x, w) <= C * r)) continue;
    double slope = 0.0;
    for (const auto& e : space.edges()) {
      if (e.u == w) slope = std::max(slope, std::abs(f[w] - f[e.v]) / e.length);
      if (e.v == w) slope = std::max(slope, std::abs(f[w] - f[e.u]) / e.length);
    }
    mC += mu[w];
    lip += mu[w] * std::pow(slope, p);
  }
  const double denom = r * std::pow(lip / mC, 1.0 / p);
  if (dev == 0.0) return 0.0;
  return dev / denom;
}

MetricMeasureSpace random_space(std::mt19937_64& rng, int n_min, int n_max, double len_lo,
                                double len_hi) {
  std::uniform_int_distribution<int> size(n_min, n_max);
  const int n = size(rng);
  std::uniform_int_distribution<int> extra(0, n);
  return make_random_connected(n, extra(rng), rng(), len_lo, len_hi);
}

}  // namespace mms::testing
