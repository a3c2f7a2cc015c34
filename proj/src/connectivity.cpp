#include "mms/connectivity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "mms/maximal.hpp"

namespace mms {

double endpoint_maximal_sum(const MetricMeasureSpace& space, const ScalarField& g, double p,
                            double C, Index x, Index y) {
  const double r = space.dist(x, y);
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidInput, "endpoints must be distinct");
  return maximal_at(space, g, p, C * r, x) + maximal_at(space, g, p, C * r, y);
}

ObstacleFunction make_obstacle(const MetricMeasureSpace& space, ScalarField g, Index x, Index y,
                               double p, double C, double tau) {
  detail::require_size(space, g);
  for (Index i = 0; i < space.size(); ++i) {
    if (!(g[i] >= 0.0 && g[i] <= 1.0))
      throw Error(ErrorCode::Inadmissible,
                  "obstacle value at node " + space.label(i) + " is outside [0, 1]");
  }
  ObstacleFunction out;
  out.attained = endpoint_maximal_sum(space, g, p, C, x, y);
  if (!(out.attained < tau))
    throw Error(ErrorCode::Inadmissible, "maximal sum " + std::to_string(out.attained) +
                                             " is not below tau = " + std::to_string(tau));
  out.values = std::move(g);
  out.x = x;
  out.y = y;
  out.p = p;
  out.C = C;
  out.tau = tau;
  return out;
}

double alpha_given_field(const MetricMeasureSpace& space, const ScalarField& g, double C, Index x,
                         Index y) {
  const double r = space.dist(x, y);
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidInput, "endpoints must be distinct");
  const CurvePath path = min_obstruction_path(space, x, y, g, C * r);
  return curve_integral(path, g) / r;
}

double alpha_given_g(const MetricMeasureSpace& space, const ObstacleFunction& g) {
  return alpha_given_field(space, g.values, g.C, g.x, g.y);
}

std::vector<std::pair<Index, Index>> probe_pairs(const MetricMeasureSpace& space,
                                                 const SearchConfig& config) {
  const Index n = space.size();
  auto in_scale = [&](Index a, Index b) {
    return !config.r_max || space.dist(a, b) <= *config.r_max;
  };
  std::vector<std::pair<Index, Index>> all;
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b)
      if (in_scale(a, b)) all.emplace_back(a, b);
  if (n <= config.all_pairs_below || static_cast<int>(all.size()) <= config.pair_sample) return all;

  std::stable_sort(all.begin(), all.end(), [&](const auto& u, const auto& v) {
    return space.dist(u.first, u.second) < space.dist(v.first, v.second);
  });
  std::mt19937_64 rng(config.seed);
  std::vector<std::pair<Index, Index>> out;
  const int strata = std::max(1, config.pair_sample);
  for (int s = 0; s < strata; ++s) {
    const std::size_t lo = all.size() * s / strata;
    const std::size_t hi = all.size() * (s + 1) / strata;
    if (lo >= hi) continue;
    out.push_back(all[std::uniform_int_distribution<std::size_t>(lo, hi - 1)(rng)]);
  }
  // Up to four pairs realizing the largest probed distance.
  const double top = space.dist(all.back().first, all.back().second);
  int added = 0;
  for (auto it = all.rbegin(); it != all.rend() && added < 4; ++it) {
    if (space.dist(it->first, it->second) != top) break;
    out.push_back(*it);
    ++added;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

/// Search state for one pair at one level.
class PairSearch {
 public:
  PairSearch(const MetricMeasureSpace& space, double p, double C, Index x, Index y, double tau,
             double slack)
      : space_(space), p_(p), C_(C), x_(x), y_(y), tau_(tau), slack_(slack) {
    r_ = space.dist(x, y);
    budget_ = C * r_;
    if (!within_budget(r_, budget_))
      throw Error(ErrorCode::NoFeasiblePath, "budget below pair distance");
    for (Index z = 0; z < space.size(); ++z)
      if (within_budget(space.dist(x, z) + space.dist(z, y), budget_)) region_.push_back(z);
  }

  const std::vector<Index>& region() const { return region_; }
  double r() const { return r_; }

  /// Unscaled optimal cost of a base field.
  double cost(const ScalarField& phi) const {
    return curve_integral(min_obstruction_path(space_, x_, y_, phi, budget_), phi);
  }

  double msum(const ScalarField& phi) const {
    return endpoint_maximal_sum(space_, phi, p_, C_, x_, y_);
  }

  /// Largest admissible multiple of phi with values in [0, 1].
  double scale(double peak, double sum) const {
    if (!(peak > 0.0)) return 0.0;
    double c = 1.0 / peak;
    if (sum > 0.0) c = std::min(c, tau_ * (1.0 - slack_) / sum);
    return c;
  }

  struct Eval {
    double value = 0.0;
    double raw_cost = 0.0;
    double sum = 0.0;
    double c = 0.0;
  };

  Eval evaluate(const ScalarField& phi) const {
    Eval e;
    const double peak = phi.maxCoeff();
    if (!(peak > 0.0) || !(tau_ > 0.0)) return e;
    e.sum = msum(phi);
    e.c = scale(peak, e.sum);
    e.raw_cost = cost(phi);
    e.value = e.c * e.raw_cost / r_;
    return e;
  }

  ScalarField region_indicator(const std::vector<Index>& nodes) const {
    ScalarField phi = ScalarField::Zero(space_.size());
    for (Index z : nodes) phi[z] = 1.0;
    return phi;
  }

 private:
  const MetricMeasureSpace& space_;
  double p_;
  double C_;
  Index x_;
  Index y_;
  double tau_;
  double slack_;
  double r_ = 0.0;
  double budget_ = 0.0;
  std::vector<Index> region_;
};

struct Best {
  double value = -1.0;
  ScalarField field;
  Index x = 0;
  Index y = 0;

  void offer(double v, const ScalarField& g, Index a, Index b) {
    if (v > value) {
      value = v;
      field = g;
      x = a;
      y = b;
    }
  }
};

struct SubsetRecord {
  double sum;
  double cost;
};

/// All subsets of the reachable region of a pair, as bitmasks over region().
std::vector<SubsetRecord> enumerate_subsets(const PairSearch& ps, Index n) {
  const auto& region = ps.region();
  const std::size_t m = region.size();
  std::vector<SubsetRecord> out(std::size_t{1} << m);
  out[0] = {0.0, 0.0};
  for (std::size_t mask = 1; mask < out.size(); ++mask) {
    ScalarField phi = ScalarField::Zero(n);
    for (std::size_t b = 0; b < m; ++b)
      if (mask & (std::size_t{1} << b)) phi[region[b]] = 1.0;
    out[mask] = {ps.msum(phi), ps.cost(phi)};
  }
  return out;
}

ScalarField mask_field(const std::vector<Index>& region, std::size_t mask, Index n, double c) {
  ScalarField phi = ScalarField::Zero(n);
  for (std::size_t b = 0; b < region.size(); ++b)
    if (mask & (std::size_t{1} << b)) phi[region[b]] = c;
  return phi;
}

class AlphaSearch {
 public:
  AlphaSearch(const MetricMeasureSpace& space, double p, double C, const SearchConfig& config,
              const std::vector<ScalarField>& extra)
      : space_(space), p_(p), C_(C), config_(config), extra_(extra) {
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidExponent, "alpha needs p >= 1");
    pairs_ = probe_pairs(space, config);
    for (const auto& f : extra_) detail::require_size(space, f);
  }

  AlphaRow row(double tau, const AlphaRow* previous) {
    AlphaRow out;
    out.tau = tau;
    out.exact_indicators = space_.size() <= config_.oracle_cap;
    Best best;
    if (tau > 0.0) {
      for (std::size_t k = 0; k < pairs_.size(); ++k) search_pair(k, tau, best);
    }
    if (best.value > 0.0) {
      out.witness = make_obstacle(space_, best.field, best.x, best.y, p_, C_, tau);
      out.alpha = alpha_given_g(space_, out.witness);
    } else {
      const auto [a, b] = pairs_.empty() ? std::pair<Index, Index>{0, 1} : pairs_.front();
      out.witness.values = ScalarField::Zero(space_.size());
      out.witness.x = a;
      out.witness.y = b;
      out.witness.p = p_;
      out.witness.C = C_;
      out.witness.tau = tau;
      out.alpha = 0.0;
    }
    if (previous && previous->alpha > out.alpha && previous->witness.attained < tau) {
      const bool exact = out.exact_indicators;
      out = *previous;
      out.tau = tau;
      out.witness.tau = tau;
      out.exact_indicators = exact;
    }
    return out;
  }

  bool has_pairs() const { return !pairs_.empty(); }

 private:
  void search_pair(std::size_t k, double tau, Best& best) {
    const auto [x, y] = pairs_[k];
    const double r = space_.dist(x, y);
    PairSearch ps(space_, p_, C_, x, y, tau, config_.slack);
    const Index n = space_.size();
    const auto& region = ps.region();

    auto offer = [&](const ScalarField& phi, const PairSearch::Eval& e) {
      if (e.value > best.value) best.offer(e.value, phi * e.c, x, y);
    };
    auto consider = [&](const ScalarField& phi) {
      const auto e = ps.evaluate(phi);
      offer(phi, e);
      return e;
    };

    ScalarField local_best = ScalarField::Zero(n);
    double local_value = 0.0;
    auto track = [&](const ScalarField& phi) {
      const auto e = consider(phi);
      if (e.value > local_value) {
        local_value = e.value;
        local_best = phi * e.c;
      }
      return e;
    };

    // Exhaustive indicators of subsets of the reachable region.
    if (n <= config_.oracle_cap && region.size() <= 20) {
      auto it = subsets_.find(k);
      if (it == subsets_.end()) it = subsets_.emplace(k, enumerate_subsets(ps, n)).first;
      const auto& records = it->second;
      std::size_t arg = 0;
      double top = 0.0;
      for (std::size_t mask = 1; mask < records.size(); ++mask) {
        const double v = ps.scale(1.0, records[mask].sum) * records[mask].cost / r;
        if (v > top) {
          top = v;
          arg = mask;
        }
      }
      if (arg) track(mask_field(region, arg, n, 1.0));
    } else {
      greedy(ps, track);
    }

    // Ball indicators and tents centred in the region.
    for (Index z : region) {
      const auto levels = distance_levels(space_, z);
      std::vector<double> radii{0.0};
      radii.insert(radii.end(), levels.begin(), levels.end());
      for (std::size_t li = 0; li < radii.size(); ++li) {
        const double rho = radii[li];
        if (rho > C_ * r) break;
        ScalarField ind = ScalarField::Zero(n);
        ScalarField tent = ScalarField::Zero(n);
        const double reach = li + 1 < radii.size() ? radii[li + 1] : rho + 1.0;
        for (Index w : region) {
          const double d = space_.dist(z, w);
          if (d <= rho) ind[w] = 1.0;
          if (d < reach) tent[w] = 1.0 - d / reach;
        }
        track(ind);
        if (li > 0) track(tent);
      }
    }

    // Values outside the region only raise the maximal sum, so they are dropped.
    for (const auto& f : extra_) {
      ScalarField phi = ScalarField::Zero(n);
      for (Index z : region) phi[z] = std::max(0.0, f[z]);
      track(phi);
    }

    // Random starts and the best field so far, refined by coordinate ascent.
    std::mt19937_64 rng(config_.seed + 0x9e3779b97f4a7c15ULL * (k + 1));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<ScalarField> starts;
    if (local_value > 0.0) starts.push_back(local_best);
    for (int s = 0; s < config_.restarts; ++s) {
      ScalarField phi = ScalarField::Zero(n);
      for (Index z : region) phi[z] = unif(rng);
      starts.push_back(phi);
    }
    // Pattern search with shrinking steps. The ratio is a concave cost over a
    // convex denominator, so it has no strict local maxima away from the top.
    for (auto phi : starts) {
      auto e0 = ps.evaluate(phi);
      double current = e0.value;
      offer(phi, e0);
      for (double step = 0.5; step >= 1.0 / 64; step /= 2) {
        for (int sweep = 0; sweep < config_.ascent_sweeps; ++sweep) {
          bool improved = false;
          for (Index z : region) {
            const double keep = phi[z];
            const double h = step * phi.maxCoeff();
            for (double v : {keep + h, std::max(0.0, keep - h), 0.0}) {
              if (v == keep) continue;
              phi[z] = v;
              const auto e = ps.evaluate(phi);
              if (e.value > current) {
                current = e.value;
                offer(phi, e);
                improved = true;
                break;
              }
              phi[z] = keep;
            }
          }
          if (!improved) break;
        }
      }
    }
  }

  template <class Track>
  void greedy(const PairSearch& ps, Track& track) {
    const Index n = space_.size();
    const auto& region = ps.region();
    std::vector<Index> chosen;
    std::vector<bool> used(n, false);
    for (int step = 0; step < config_.greedy_steps && chosen.size() < region.size(); ++step) {
      Index pick = -1;
      double pick_value = -1.0, pick_cost = -1.0, pick_sum = 0.0;
      for (Index z : region) {
        if (used[z]) continue;
        chosen.push_back(z);
        const auto e = ps.evaluate(ps.region_indicator(chosen));
        chosen.pop_back();
        const bool better =
            e.value > pick_value ||
            (e.value == pick_value &&
             (e.raw_cost > pick_cost || (e.raw_cost == pick_cost && e.sum < pick_sum)));
        if (better) {
          pick = z;
          pick_value = e.value;
          pick_cost = e.raw_cost;
          pick_sum = e.sum;
        }
      }
      if (pick < 0) break;
      used[pick] = true;
      chosen.push_back(pick);
      track(ps.region_indicator(chosen));
    }
  }

  const MetricMeasureSpace& space_;
  double p_;
  double C_;
  SearchConfig config_;
  const std::vector<ScalarField>& extra_;
  std::vector<std::pair<Index, Index>> pairs_;
  std::map<std::size_t, std::vector<SubsetRecord>> subsets_;
};

}  // namespace

AlphaRow alpha_estimate(const MetricMeasureSpace& space, double p, double C, double tau,
                        const SearchConfig& config, const std::vector<ScalarField>& extra) {
  AlphaSearch search(space, p, C, config, extra);
  return search.row(tau, nullptr);
}

AlphaProfile alpha_profile(const MetricMeasureSpace& space, double p, double C,
                           std::vector<double> tau_grid, const SearchConfig& config,
                           const std::vector<ScalarField>& extra) {
  for (double t : tau_grid)
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidInput, "tau must lie in [0, 1]");
  std::sort(tau_grid.begin(), tau_grid.end());
  AlphaProfile profile;
  profile.p = p;
  profile.C = C;
  profile.r_max = config.r_max;
  profile.seed = config.seed;
  AlphaSearch search(space, p, C, config, extra);
  for (double t : tau_grid) {
    const AlphaRow* prev = profile.rows.empty() ? nullptr : &profile.rows.back();
    profile.rows.push_back(search.row(t, prev));
  }
  return profile;
}

double ap_connectivity_constant(const AlphaProfile& profile) {
  double best = 0.0;
  for (const auto& row : profile.rows)
    if (row.tau > 0.0) best = std::max(best, row.alpha / row.tau);
  return best;
}

double ap_connectivity_constant(const MetricMeasureSpace& space, double p, double C,
                                const std::vector<double>& tau_grid, const SearchConfig& config) {
  return ap_connectivity_constant(alpha_profile(space, p, C, tau_grid, config));
}

AlphaRow alpha_indicator_exact(const MetricMeasureSpace& space, double p, double C, double tau,
                               double slack, int node_cap) {
  const Index n = space.size();
  if (n > node_cap)
    throw Error(ErrorCode::TooLarge, "subset enumeration is capped at " + std::to_string(node_cap) +
                                         " nodes, space has " + std::to_string(n));
  AlphaRow out;
  out.tau = tau;
  out.exact_indicators = true;
  out.witness.values = ScalarField::Zero(n);
  out.witness.x = 0;
  out.witness.y = n > 1 ? 1 : 0;
  out.witness.p = p;
  out.witness.C = C;
  out.witness.tau = tau;
  if (!(tau > 0.0) || n < 2) return out;

  double top = 0.0;
  ScalarField arg;
  Index ax = 0, ay = 0;
  for (Index x = 0; x < n; ++x) {
    for (Index y = x + 1; y < n; ++y) {
      PairSearch ps(space, p, C, x, y, tau, slack);
      const auto records = enumerate_subsets(ps, n);
      for (std::size_t mask = 1; mask < records.size(); ++mask) {
        const double c = ps.scale(1.0, records[mask].sum);
        const double v = c * records[mask].cost / ps.r();
        if (v > top) {
          top = v;
          arg = mask_field(ps.region(), mask, n, c);
          ax = x;
          ay = y;
        }
      }
    }
  }
  if (top > 0.0) {
    out.witness = make_obstacle(space, arg, ax, ay, p, C, tau);
    out.alpha = alpha_given_g(space, out.witness);
  }
  return out;
}

SublinearityResult sublinearity_check(const MetricMeasureSpace& space, double tau, double K,
                                      const ObstacleFunction& g) {
  if (!(K >= 1.0)) throw Error(ErrorCode::InvalidInput, "K must be >= 1");
  const double attained = endpoint_maximal_sum(space, g.values, g.p, g.C, g.x, g.y);
  if (!(attained < K * tau))
    throw Error(ErrorCode::Inadmissible, "maximal sum " + std::to_string(attained) +
                                             " is not below K tau = " + std::to_string(K * tau));
  const ScalarField scaled = g.values / K;
  SublinearityResult out;
  out.scaled_attained = endpoint_maximal_sum(space, scaled, g.p, g.C, g.x, g.y);
  if (!(out.scaled_attained < tau))
    throw Error(ErrorCode::Inadmissible, "scaled obstacle has maximal sum " +
                                             std::to_string(out.scaled_attained) +
                                             " not below tau = " + std::to_string(tau));
  const double r = space.dist(g.x, g.y);
  out.cost = curve_integral(min_obstruction_path(space, g.x, g.y, g.values, g.C * r), g.values);
  out.scaled_cost = curve_integral(min_obstruction_path(space, g.x, g.y, scaled, g.C * r), scaled);
  out.slack = (K * out.scaled_cost - out.cost) / r;
  return out;
}

}  // namespace mms
