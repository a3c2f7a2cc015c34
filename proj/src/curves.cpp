#include "mms/curves.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <tuple>
#include <queue>

#include "mms/maximal.hpp"

namespace mms {

CurvePath make_path(const MetricMeasureSpace& space, std::vector<Index> nodes) {
  if (nodes.empty()) throw Error(ErrorCode::InvalidInput, "empty path");
  CurvePath path;
  path.lengths.reserve(nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const auto len = space.edge_length(nodes[i], nodes[i + 1]);
    if (!len)
      throw Error(ErrorCode::InvalidInput, "nodes " + space.label(nodes[i]) + " and " +
                                               space.label(nodes[i + 1]) + " are not adjacent");
    path.lengths.push_back(*len);
  }
  path.nodes = std::move(nodes);
  return path;
}

double curve_length(const CurvePath& path) {
  double total = 0.0;
  for (double len : path.lengths) total += len;
  return total;
}

double curve_integral(const CurvePath& path, const ScalarField& g) {
  double total = 0.0;
  for (std::size_t i = 0; i < path.lengths.size(); ++i)
    total += edge_cost(path.lengths[i], g[path.nodes[i]], g[path.nodes[i + 1]]);
  return total;
}

namespace {

struct Label {
  Index node;
  double length;
  double cost;
  int parent;
  bool alive;
};

class LabelSetting {
 public:
  LabelSetting(const MetricMeasureSpace& space, Index x, Index y, const ScalarField& g,
               double budget)
      : space_(space), x_(x), y_(y), g_(g), budget_(budget), at_node_(space.size()) {}

  /// Runs until the first label at y is settled (or to exhaustion when
  /// `frontier` is set). Returns settled label ids at y in settle order.
  std::vector<int> run(bool frontier) {
    std::vector<int> settled_at_target;
    push({x_, 0.0, 0.0, -1, true});
    while (!heap_.empty()) {
      const int id = heap_.top().id;
      heap_.pop();
      const Label cur = labels_[id];
      if (!cur.alive) continue;
      if (cur.node == y_) {
        settled_at_target.push_back(id);
        if (!frontier) break;
        continue;
      }
      for (const auto& nb : space_.neighbors(cur.node)) {
        const double len = cur.length + nb.length;
        if (!within_budget(len + space_.dist(nb.node, y_), budget_)) continue;
        const double cost = cur.cost + edge_cost(nb.length, g_[cur.node], g_[nb.node]);
        push({nb.node, len, cost, id, true});
      }
    }
    return settled_at_target;
  }

  CurvePath path_of(int id) const {
    CurvePath p;
    std::vector<int> chain;
    for (int cur = id; cur >= 0; cur = labels_[cur].parent) chain.push_back(cur);
    std::reverse(chain.begin(), chain.end());
    for (std::size_t i = 0; i < chain.size(); ++i) {
      p.nodes.push_back(labels_[chain[i]].node);
      if (i > 0) p.lengths.push_back(labels_[chain[i]].length - labels_[chain[i - 1]].length);
    }
    // Recover exact edge lengths rather than differences of sums.
    for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
      p.lengths[i] = *space_.edge_length(p.nodes[i], p.nodes[i + 1]);
    return p;
  }

  const Label& label(int id) const { return labels_[id]; }

 private:
  struct HeapItem {
    double cost;
    double length;
    int id;
    bool operator>(const HeapItem& o) const {
      if (cost != o.cost) return cost > o.cost;
      if (length != o.length) return length > o.length;
      return id > o.id;
    }
  };

  std::vector<Index> node_sequence(int id) const {
    std::vector<Index> seq;
    for (int cur = id; cur >= 0; cur = labels_[cur].parent) seq.push_back(labels_[cur].node);
    std::reverse(seq.begin(), seq.end());
    return seq;
  }

  void push(Label lab) {
    auto& bucket = at_node_[lab.node];
    const int new_id = static_cast<int>(labels_.size());
    bool keep = true;
    std::size_t w = 0;
    std::vector<Index> new_seq;
    for (std::size_t r = 0; r < bucket.size(); ++r) {
      const int other = bucket[r];
      Label& o = labels_[other];
      if (!o.alive) continue;
      bool drop_other = false;
      if (keep) {
        if (o.length == lab.length && o.cost == lab.cost) {
          if (lab.parent >= 0 && new_seq.empty()) {
            new_seq = node_sequence(lab.parent);
            new_seq.push_back(lab.node);
          }
          if (new_seq < node_sequence(other)) {
            drop_other = true;
          } else {
            keep = false;
          }
        } else if (o.length <= lab.length && o.cost <= lab.cost) {
          keep = false;
        } else if (lab.length <= o.length && lab.cost <= o.cost) {
          drop_other = true;
        }
      }
      if (drop_other) {
        o.alive = false;
        continue;
      }
      bucket[w++] = other;
    }
    bucket.resize(w);
    if (!keep) return;
    labels_.push_back(lab);
    bucket.push_back(new_id);
    heap_.push({lab.cost, lab.length, new_id});
  }

  const MetricMeasureSpace& space_;
  Index x_;
  Index y_;
  const ScalarField& g_;
  double budget_;
  std::vector<Label> labels_;
  std::vector<std::vector<int>> at_node_;
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap_;
};

void check_solver_args(const MetricMeasureSpace& space, Index x, Index y, const ScalarField& g,
                       double budget) {
  detail::require_size(space, g);
  detail::require_nonnegative(g, "obstacle");
  if (x < 0 || y < 0 || x >= space.size() || y >= space.size())
    throw Error(ErrorCode::InvalidInput, "endpoint out of range");
  if (!within_budget(space.dist(x, y), budget))
    throw Error(ErrorCode::NoFeasiblePath,
                "budget " + std::to_string(budget) + " below d(" + space.label(x) + "," +
                    space.label(y) + ") = " + std::to_string(space.dist(x, y)));
}

}  // namespace

CurvePath min_obstruction_path(const MetricMeasureSpace& space, Index x, Index y,
                               const ScalarField& g, double budget) {
  check_solver_args(space, x, y, g, budget);
  LabelSetting search(space, x, y, g, budget);
  const auto settled = search.run(false);
  if (settled.empty())
    throw Error(ErrorCode::NoFeasiblePath, "no path within budget");  // unreachable in practice
  return search.path_of(settled.front());
}

std::vector<ParetoPoint> pareto_frontier(const MetricMeasureSpace& space, Index x, Index y,
                                         const ScalarField& g, double budget) {
  check_solver_args(space, x, y, g, budget);
  LabelSetting search(space, x, y, g, budget);
  std::vector<ParetoPoint> out;
  for (int id : search.run(true)) {
    const auto& lab = search.label(id);
    if (!lab.alive) continue;
    if (!out.empty() && out.back().length <= lab.length) continue;
    out.push_back({lab.length, lab.cost, search.path_of(id)});
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<double> cheapest_costs(const MetricMeasureSpace& space, Index x, const ScalarField& g) {
  detail::require_size(space, g);
  detail::require_nonnegative(g, "gradient");
  std::vector<double> cost(space.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  cost[x] = 0.0;
  heap.emplace(0.0, x);
  while (!heap.empty()) {
    auto [c, u] = heap.top();
    heap.pop();
    if (c > cost[u]) continue;
    for (const auto& nb : space.neighbors(u)) {
      const double cand = c + edge_cost(nb.length, g[u], g[nb.node]);
      if (cand < cost[nb.node]) {
        cost[nb.node] = cand;
        heap.emplace(cand, nb.node);
      }
    }
  }
  return cost;
}

CurvePath cheapest_path(const MetricMeasureSpace& space, Index x, Index y, const ScalarField& g) {
  detail::require_size(space, g);
  detail::require_nonnegative(g, "obstacle");
  const Index n = space.size();
  std::vector<double> cost(n, std::numeric_limits<double>::infinity());
  std::vector<double> len(n, std::numeric_limits<double>::infinity());
  std::vector<Index> parent(n, -1);
  using Item = std::tuple<double, double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  cost[x] = 0.0;
  len[x] = 0.0;
  heap.emplace(0.0, 0.0, x);
  while (!heap.empty()) {
    auto [c, l, u] = heap.top();
    heap.pop();
    if (c > cost[u] || (c == cost[u] && l > len[u])) continue;
    for (const auto& nb : space.neighbors(u)) {
      const double cand = c + edge_cost(nb.length, g[u], g[nb.node]);
      const double cl = l + nb.length;
      if (cand < cost[nb.node] || (cand == cost[nb.node] && cl < len[nb.node])) {
        cost[nb.node] = cand;
        len[nb.node] = cl;
        parent[nb.node] = u;
        heap.emplace(cand, cl, nb.node);
      }
    }
  }
  std::vector<Index> seq;
  for (Index cur = y; cur != -1; cur = parent[cur]) {
    seq.push_back(cur);
    if (cur == x) break;
  }
  std::reverse(seq.begin(), seq.end());
  return make_path(space, std::move(seq));
}

std::vector<CurvePath> enumerate_paths_oracle(const MetricMeasureSpace& space, Index x, Index y,
                                              double budget, int node_cap,
                                              const ScalarField* g) {
  if (space.size() > node_cap)
    throw Error(ErrorCode::TooLarge, "path enumeration is capped at " + std::to_string(node_cap) +
                                         " nodes, space has " + std::to_string(space.size()));
  std::map<std::pair<Index, Index>, int> uses;
  std::vector<CurvePath> out;
  CurvePath cur;
  cur.nodes.push_back(x);

  std::function<void(double)> dfs = [&](double len) {
    const Index u = cur.nodes.back();
    if (u == y) out.push_back(cur);
    for (const auto& nb : space.neighbors(u)) {
      const double next = len + nb.length;
      if (!within_budget(next, budget)) continue;
      auto key = std::minmax(u, nb.node);
      int& count = uses[{key.first, key.second}];
      if (count >= 2) continue;
      ++count;
      cur.nodes.push_back(nb.node);
      cur.lengths.push_back(nb.length);
      dfs(next);
      cur.nodes.pop_back();
      cur.lengths.pop_back();
      --count;
    }
  };
  dfs(0.0);

  if (g) {
    std::vector<std::pair<double, double>> keys;
    std::vector<std::size_t> idx(out.size());
    keys.reserve(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      keys.emplace_back(curve_integral(out[i], *g), curve_length(out[i]));
      idx[i] = i;
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (keys[a] != keys[b]) return keys[a] < keys[b];
      return out[a].nodes < out[b].nodes;
    });
    std::vector<CurvePath> sorted;
    sorted.reserve(out.size());
    for (auto i : idx) sorted.push_back(std::move(out[i]));
    out = std::move(sorted);
  }
  return out;
}

double upper_gradient_check(const MetricMeasureSpace& space, const ScalarField& f,
                            const ScalarField& g) {
  detail::require_size(space, f);
  double margin = std::numeric_limits<double>::infinity();
  for (Index x = 0; x < space.size(); ++x) {
    const auto cost = cheapest_costs(space, x, g);
    for (Index y = 0; y < space.size(); ++y) {
      if (y == x) continue;
      margin = std::min(margin, cost[y] - std::abs(f[x] - f[y]));
    }
  }
  return std::isfinite(margin) ? margin : 0.0;
}

}  // namespace mms
