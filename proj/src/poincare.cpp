#include "mms/poincare.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "mms/curves.hpp"
#include "mms/maximal.hpp"

namespace mms {

ScalarField lip_field(const MetricMeasureSpace& space, const ScalarField& f) {
  detail::require_size(space, f);
  ScalarField out = ScalarField::Zero(space.size());
  for (Index u = 0; u < space.size(); ++u)
    for (const auto& nb : space.neighbors(u))
      out[u] = std::max(out[u], std::abs(f[u] - f[nb.node]) / nb.length);
  return out;
}

BallGeometry::BallGeometry(const MetricMeasureSpace& space) {
  dist_ = space.override_metric() ? &*space.override_metric() : &space.distances();
  const Index n = space.size();
  const auto& mu = space.measure();
  order_.resize(n);
  sorted_dist_.resize(n);
  prefix_mass_.resize(n);
  for (Index c = 0; c < n; ++c) {
    auto& ord = order_[c];
    ord.resize(n);
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(),
                     [&](Index a, Index b) { return (*dist_)(c, a) < (*dist_)(c, b); });
    // The center comes first even if the override metric has ties at zero.
    auto self = std::find(ord.begin(), ord.end(), c);
    std::rotate(ord.begin(), self, self + 1);
    double acc = 0.0;
    for (Index k = 0; k < n; ++k) {
      sorted_dist_[c].push_back(k == 0 ? 0.0 : (*dist_)(c, ord[k]));
      acc += mu[ord[k]];
      prefix_mass_[c].push_back(acc);
    }
  }
}

Index BallGeometry::count(Index c, double r) const {
  const auto& sd = sorted_dist_[c];
  return static_cast<Index>(std::upper_bound(sd.begin(), sd.end(), r) - sd.begin());
}

double BallGeometry::mass(Index c, double r) const { return prefix_mass_[c][count(c, r) - 1]; }

std::vector<double> BallGeometry::critical_radii(Index c, double C,
                                                 std::optional<double> r_max) const {
  std::vector<double> radii;
  const auto& sd = sorted_dist_[c];
  const double top = sd.back();
  for (double d : sd) {
    if (!(d > 0.0)) continue;
    radii.push_back(d);
    radii.push_back(d / C);
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  std::vector<double> out;
  for (double r : radii) {
    if (r > top) break;
    if (r_max && !(r < *r_max)) break;
    out.push_back(r);
  }
  return out;
}

namespace {

inline double root(double v, double p) { return p == 1.0 ? v : std::pow(v, 1.0 / p); }
inline double power(double v, double p) {
  return p == 1.0 ? v : p == 2.0 ? v * v : std::pow(v, p);
}

/// Ratio at one ball given Lip^p.
double ratio_at(const BallGeometry& geo, const Eigen::VectorXd& mu, const ScalarField& f,
                const ScalarField& lip_p, Index c, double r, double C, double p) {
  const auto ord = geo.order(c);
  const Index k = geo.count(c, r);
  const Index kc = geo.count(c, C * r);
  double mass = 0.0, mean = 0.0;
  for (Index i = 0; i < k; ++i) {
    mass += mu[ord[i]];
    mean += f[ord[i]] * mu[ord[i]];
  }
  mean /= mass;
  double osc = 0.0;
  for (Index i = 0; i < k; ++i) osc += std::abs(f[ord[i]] - mean) * mu[ord[i]];
  osc /= mass;
  if (!(osc > 0.0)) return 0.0;
  double cmass = 0.0, energy = 0.0;
  for (Index i = 0; i < kc; ++i) {
    cmass += mu[ord[i]];
    energy += lip_p[ord[i]] * mu[ord[i]];
  }
  const double den = r * root(energy / cmass, p);
  if (!(den > 0.0))
    throw Error(ErrorCode::DegenerateDenominator,
                "Lip f vanishes on the inflated ball while f oscillates on the ball");
  return osc / den;
}

ScalarField lip_power(const MetricMeasureSpace& space, const ScalarField& f, double p) {
  return lip_field(space, f).unaryExpr([p](double v) { return power(v, p); });
}

struct BallRef {
  Index center;
  double radius;
};

std::vector<BallRef> all_balls(const BallGeometry& geo, double C, std::optional<double> r_max) {
  std::vector<BallRef> balls;
  for (Index c = 0; c < geo.size(); ++c)
    for (double r : geo.critical_radii(c, C, r_max)) balls.push_back({c, r});
  return balls;
}

class PIEvaluator {
 public:
  PIEvaluator(const MetricMeasureSpace& space, double p, double C, std::optional<double> r_max)
      : space_(space), geo_(space), p_(p), C_(C), balls_(all_balls(geo_, C, r_max)),
        ball_best_(balls_.size(), 0.0) {
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidExponent, "Poincare exponent must be >= 1");
    if (!(C >= 1.0)) throw Error(ErrorCode::InvalidInput, "inflation factor must be >= 1");
  }

  PIWitness evaluate(const ScalarField& f, const std::string& family) {
    detail::require_size(space_, f);
    const ScalarField lp = lip_power(space_, f, p_);
    PIWitness w;
    w.f = f;
    w.family = family;
    w.ratio = 0.0;
    for (std::size_t b = 0; b < balls_.size(); ++b) {
      const double v =
          ratio_at(geo_, space_.measure(), f, lp, balls_[b].center, balls_[b].radius, C_, p_);
      ball_best_[b] = std::max(ball_best_[b], v);
      if (v > w.ratio) {
        w.ratio = v;
        w.center = balls_[b].center;
        w.radius = balls_[b].radius;
      }
    }
    return w;
  }

  double ratio(const ScalarField& f, Index c, double r) const {
    return ratio_at(geo_, space_.measure(), f, lip_power(space_, f, p_), c, r, C_, p_);
  }

  const std::vector<BallRef>& balls() const { return balls_; }
  const std::vector<double>& ball_best() const { return ball_best_; }
  const BallGeometry& geometry() const { return geo_; }

 private:
  const MetricMeasureSpace& space_;
  BallGeometry geo_;
  double p_;
  double C_;
  std::vector<BallRef> balls_;
  std::vector<double> ball_best_;
};

ScalarField distance_field(const BallGeometry& geo, const std::vector<Index>& set) {
  ScalarField f(geo.size());
  for (Index z = 0; z < geo.size(); ++z) {
    double d = std::numeric_limits<double>::infinity();
    for (Index s : set) d = std::min(d, geo.dist(z, s));
    f[z] = d;
  }
  return f;
}

/// Top generalized eigenvector of variance on B against mean squared edge
/// slope on CB, solved on CB and its neighbors.
ScalarField spectral_candidate(const MetricMeasureSpace& space, const BallGeometry& geo, Index c,
                               double r, double C) {
  const Index n = space.size();
  const auto ord = geo.order(c);
  const Index k = geo.count(c, r);
  const Index kc = geo.count(c, C * r);
  const auto& mu = space.measure();

  std::vector<Index> local(n, -1);
  std::vector<Index> nodes;
  auto take = [&](Index z) {
    if (local[z] < 0) {
      local[z] = static_cast<Index>(nodes.size());
      nodes.push_back(z);
    }
  };
  for (Index i = 0; i < kc; ++i) take(ord[i]);
  for (Index i = 0; i < kc; ++i)
    for (const auto& nb : space.neighbors(ord[i])) take(nb.node);
  const Index m = static_cast<Index>(nodes.size());

  double mass = 0.0;
  for (Index i = 0; i < k; ++i) mass += mu[ord[i]];
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  for (Index i = 0; i < k; ++i) w[local[ord[i]]] = mu[ord[i]] / mass;
  Eigen::MatrixXd A = Eigen::MatrixXd(w.asDiagonal()) - w * w.transpose();

  double cmass = 0.0;
  for (Index i = 0; i < kc; ++i) cmass += mu[ord[i]];
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  for (Index i = 0; i < kc; ++i) {
    const Index u = ord[i];
    const auto nbs = space.neighbors(u);
    const double weight = mu[u] / cmass / static_cast<double>(nbs.size());
    for (const auto& nb : nbs) {
      const double a = weight / (nb.length * nb.length);
      const Index lu = local[u], lv = local[nb.node];
      L(lu, lu) += a;
      L(lv, lv) += a;
      L(lu, lv) -= a;
      L(lv, lu) -= a;
    }
  }
  const double shift = 1e-9 * std::max(1.0, L.diagonal().maxCoeff());
  L.diagonal().array() += shift;

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, L);
  ScalarField f = ScalarField::Zero(n);
  if (solver.info() != Eigen::Success) return f;
  const Eigen::VectorXd v = solver.eigenvectors().col(m - 1);
  for (Index i = 0; i < m; ++i) f[nodes[i]] = v[i];
  return f;
}

}  // namespace

double pi_ratio(const MetricMeasureSpace& space, const ScalarField& f, Index x, double r, double C,
                double p) {
  detail::require_size(space, f);
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidInput, "radius must be positive");
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidExponent, "Poincare exponent must be >= 1");
  BallGeometry geo(space);
  return ratio_at(geo, space.measure(), f, lip_power(space, f, p), x, r, C, p);
}

PIWitness best_ball(const MetricMeasureSpace& space, const ScalarField& f, double p, double C,
                    std::optional<double> r_max) {
  PIEvaluator eval(space, p, C, r_max);
  return eval.evaluate(f, "given");
}

PIEstimate pi_constant_over(const MetricMeasureSpace& space, const std::vector<ScalarField>& pool,
                            double p, double C, std::optional<double> r_max) {
  PIEvaluator eval(space, p, C, r_max);
  PIEstimate out;
  for (const auto& f : pool) {
    out.pool.push_back(eval.evaluate(f, "pool"));
    if (out.pool.back().ratio > out.value) {
      out.value = out.pool.back().ratio;
      out.witness = out.pool.back();
    }
  }
  return out;
}

std::vector<std::pair<double, double>> pi_scale_profile(const MetricMeasureSpace& space,
                                                        const std::vector<ScalarField>& pool,
                                                        double p, double C) {
  PIEvaluator eval(space, p, C, std::nullopt);
  for (const auto& f : pool) eval.evaluate(f, "pool");
  std::vector<std::pair<double, double>> rows;
  const auto& balls = eval.balls();
  const auto& best = eval.ball_best();
  for (std::size_t b = 0; b < balls.size(); ++b) rows.emplace_back(balls[b].radius, best[b]);
  std::sort(rows.begin(), rows.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& [r, v] : rows) {
    if (!merged.empty() && merged.back().first == r)
      merged.back().second = std::max(merged.back().second, v);
    else
      merged.emplace_back(r, v);
  }
  return merged;
}

PIEstimate pi_constant(const MetricMeasureSpace& space, double p, double C,
                       const SearchConfig& config) {
  PIEvaluator eval(space, p, C, config.r_max);
  const BallGeometry& geo = eval.geometry();
  const Index n = space.size();
  PIEstimate out;
  auto add = [&](const ScalarField& f, const std::string& family) {
    out.pool.push_back(eval.evaluate(f, family));
    const auto& w = out.pool.back();
    if (w.ratio > out.value) {
      out.value = w.ratio;
      out.witness = w;
    }
    return out.pool.back();
  };
  if (n < 2 || eval.balls().empty()) {
    out.witness.f = ScalarField::Zero(n);
    return out;
  }

  // Distance fields from single nodes.
  for (Index z = 0; z < n; ++z) add(distance_field(geo, {z}), "distance");

  // Greedy growth of the source set, scored on the current worst ball.
  {
    Index seed_node = 0;
    double seed_ratio = -1.0;
    for (Index z = 0; z < n; ++z) {
      if (out.pool[z].ratio > seed_ratio) {
        seed_ratio = out.pool[z].ratio;
        seed_node = z;
      }
    }
    std::vector<Index> set{seed_node};
    PIWitness current = out.pool[seed_node];
    for (int step = 0; step < config.greedy_steps && static_cast<Index>(set.size()) < n; ++step) {
      Index pick = -1;
      double pick_ratio = -1.0;
      for (Index z = 0; z < n; ++z) {
        if (std::find(set.begin(), set.end(), z) != set.end()) continue;
        set.push_back(z);
        const double v = eval.ratio(distance_field(geo, set), current.center, current.radius);
        set.pop_back();
        if (v > pick_ratio) {
          pick_ratio = v;
          pick = z;
        }
      }
      if (pick < 0) break;
      set.push_back(pick);
      current = add(distance_field(geo, set), "greedy-distance");
    }
  }

  // Generalized eigenvectors on the most critical balls.
  if (p == 2.0 && config.spectral) {
    const auto& balls = eval.balls();
    std::vector<std::size_t> idx(balls.size());
    std::iota(idx.begin(), idx.end(), 0);
    const auto& best = eval.ball_best();
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return best[a] > best[b]; });
    const std::size_t limit = n <= 30 ? idx.size() : std::min<std::size_t>(idx.size(), 16);
    for (std::size_t t = 0; t < limit; ++t) {
      const auto& ball = balls[idx[t]];
      const ScalarField f = spectral_candidate(space, geo, ball.center, ball.radius, C);
      if (f.cwiseAbs().maxCoeff() > 0.0) add(f, "spectral");
    }
  }

  // Coordinate ascent from the best field and from random fields.
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<ScalarField, std::string>> starts{{out.witness.f, "ascent-best"}};
  for (int s = 0; s < config.restarts; ++s) {
    ScalarField f(n);
    for (Index z = 0; z < n; ++z) f[z] = unif(rng);
    starts.emplace_back(add(f, "random").f, "ascent-random");
  }
  for (auto& [f, family] : starts) {
    PIWitness w = eval.evaluate(f, family);
    if (!(w.ratio > 0.0)) continue;
    for (int sweep = 0; sweep < config.ascent_sweeps; ++sweep) {
      bool improved = false;
      double current = eval.ratio(f, w.center, w.radius);
      const double lo = f.minCoeff(), hi = f.maxCoeff();
      for (Index z = 0; z < n; ++z) {
        const double keep = f[z];
        double nb_mean = 0.0;
        const auto nbs = space.neighbors(z);
        for (const auto& nb : nbs) nb_mean += f[nb.node];
        nb_mean /= static_cast<double>(nbs.size());
        for (double v : {lo, hi, nb_mean, 2.0 * keep - nb_mean}) {
          if (v == keep) continue;
          f[z] = v;
          const double cand = eval.ratio(f, w.center, w.radius);
          if (cand > current) {
            current = cand;
            improved = true;
            break;
          }
          f[z] = keep;
        }
      }
      if (!improved) break;
    }
    add(f, family);
  }
  return out;
}

namespace {

/// For each center, running maxima of (avg over prefix balls of g^p) so that
/// M_{p,s}g(x)^p is a lookup by ball count.
class MaximalTable {
 public:
  MaximalTable(const MetricMeasureSpace& space, const ScalarField& g, double p) : space_(space), p_(p) {
    detail::require_size(space, g);
    detail::require_nonnegative(g, "upper gradient");
    const Index n = space.size();
    const auto& mu = space.measure();
    running_.resize(n);
    for (Index x = 0; x < n; ++x) {
      const auto ord = space.order(x);
      const auto sd = space.sorted_dist(x);
      const auto pm = space.prefix_mass(x);
      auto& run = running_[x];
      run.resize(n);
      double acc = 0.0, best = 0.0;
      for (Index k = 0; k < n; ++k) {
        acc += power(g[ord[k]], p) * mu[ord[k]];
        if (k + 1 == n || sd[k + 1] != sd[k]) best = std::max(best, acc / pm[k]);
        run[k] = best;
      }
    }
  }

  double at(Index x, double s) const {
    const Index k = space_.ball_count(x, s);
    return root(running_[x][k - 1], p_);
  }

 private:
  const MetricMeasureSpace& space_;
  double p_;
  std::vector<std::vector<double>> running_;
};

}  // namespace

PointwiseWitness pointwise_pi_ratio(const MetricMeasureSpace& space, const ScalarField& f,
                                    const ScalarField& g, double p, double C) {
  detail::require_size(space, f);
  MaximalTable table(space, g, p);
  PointwiseWitness out;
  out.f = f;
  out.g = g;
  for (Index x = 0; x < space.size(); ++x) {
    for (Index y = x + 1; y < space.size(); ++y) {
      const double r = space.dist(x, y);
      const double num = std::abs(f[x] - f[y]);
      if (!(num > 0.0)) continue;
      const double den = r * (table.at(x, C * r) + table.at(y, C * r));
      const double v = den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
      if (v > out.ratio) {
        out.ratio = v;
        out.x = x;
        out.y = y;
      }
    }
  }
  return out;
}

double pointwise_pi_margin(const MetricMeasureSpace& space, const ScalarField& f,
                           const ScalarField& g, double p, double C, double C_PPI) {
  detail::require_size(space, f);
  const double ug = upper_gradient_check(space, f, g);
  const double tol = 1e-12 * std::max(1.0, f.cwiseAbs().maxCoeff());
  if (ug < -tol)
    throw Error(ErrorCode::NotUpperGradient,
                "g fails the upper gradient inequality by " + std::to_string(-ug));
  MaximalTable table(space, g, p);
  double margin = std::numeric_limits<double>::infinity();
  for (Index x = 0; x < space.size(); ++x) {
    for (Index y = x + 1; y < space.size(); ++y) {
      const double r = space.dist(x, y);
      const double rhs = C_PPI * r * (table.at(x, C * r) + table.at(y, C * r));
      margin = std::min(margin, rhs - std::abs(f[x] - f[y]));
    }
  }
  return std::isfinite(margin) ? margin : 0.0;
}

PIReport characterization_consistency(const MetricMeasureSpace& space, double p, double C,
                                      std::vector<double> tau_grid, const SearchConfig& config,
                                      double tolerance) {
  PIReport rep;
  rep.p = p;
  rep.C = C;
  rep.r_max = config.r_max;
  rep.seed = config.seed;
  rep.doubling = doubling_constant(space, config.r_max);
  rep.quasiconvexity = quasiconvexity_constant(space);
  rep.pi = pi_constant(space, p, C, config);

  auto offer_ppi = [&](const ScalarField& f, const ScalarField& g, const std::string& family) {
    PointwiseWitness w = pointwise_pi_ratio(space, f, g, p, C);
    w.family = family;
    if (w.ratio > rep.C_PPI) {
      rep.C_PPI = w.ratio;
      rep.ppi_witness = w;
    }
    rep.ppi_pool.push_back(std::move(w));
  };
  for (const auto& w : rep.pi.pool) offer_ppi(w.f, lip_field(space, w.f), "lip:" + w.family);

  // A level low enough that no admissible rescaling is capped by g <= 1.
  const auto& mu = space.measure();
  const double low = 0.5 * root(mu.minCoeff() / mu.sum(), p);
  tau_grid.push_back(std::min(1.0, low));

  AlphaProfile first;
  try {
    first = alpha_profile(space, p, C, tau_grid, config);
    rep.ap_established = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoFeasiblePath) throw;
    rep.ap_established = false;
    rep.ap_note = "A_pC not established: some pair has no path within C d(x,y)";
  }

  std::vector<ScalarField> extra;
  if (rep.ap_established) {
    for (const auto& row : first.rows) {
      const auto& g = row.witness;
      if (!(row.alpha > 0.0) || !(g.attained > 0.0)) continue;
      const ScalarField g_eps = g.values.array() + g.attained;
      const auto costs = cheapest_costs(space, g.x, g_eps);
      offer_ppi(Eigen::Map<const ScalarField>(costs.data(), static_cast<Eigen::Index>(costs.size())),
                g_eps, "path-cost");
      extra.push_back(g.values);
    }
  }
  for (const auto& w : rep.ppi_pool) extra.push_back(w.g);

  if (rep.ap_established) {
    rep.alpha = alpha_profile(space, p, C, tau_grid, config, extra);
    rep.C_A = std::max(ap_connectivity_constant(rep.alpha), ap_connectivity_constant(first));
    rep.margin_ptpi_from_ap = rep.C_A / (1.0 - config.slack) - rep.C_PPI;
    rep.ptpi_from_ap_ok = rep.margin_ptpi_from_ap >= -tolerance * std::max(1.0, rep.C_PPI);

    rep.margin_length = std::numeric_limits<double>::infinity();
    rep.margin_cost = std::numeric_limits<double>::infinity();
    for (const auto& row : first.rows) {
      const auto& g = row.witness;
      if (!(row.alpha > 0.0) || !(g.attained > 0.0)) continue;
      const ScalarField g_eps = g.values.array() + g.attained;
      const CurvePath path = cheapest_path(space, g.x, g.y, g_eps);
      const double r = space.dist(g.x, g.y);
      PathCheck check;
      check.x = g.x;
      check.y = g.y;
      check.tau = row.tau;
      check.maximal_sum = g.attained;
      check.length_ratio = curve_length(path) / r;
      check.cost_ratio = curve_integral(path, g.values) / (r * g.attained);
      const double slack = tolerance * std::max(1.0, rep.C_PPI);
      check.length_ok = check.length_ratio <= 5.0 * rep.C_PPI + slack;
      check.cost_ok = check.cost_ratio <= 4.0 * rep.C_PPI + slack;
      rep.margin_length = std::min(rep.margin_length, 5.0 * rep.C_PPI - check.length_ratio);
      rep.margin_cost = std::min(rep.margin_cost, 4.0 * rep.C_PPI - check.cost_ratio);
      rep.path_checks.push_back(check);
    }
    if (rep.path_checks.empty()) rep.margin_length = rep.margin_cost = 0.0;
    rep.ap_from_ptpi_ok = std::all_of(rep.path_checks.begin(), rep.path_checks.end(),
                                      [](const PathCheck& c) { return c.length_ok && c.cost_ok; });
  }
  return rep;
}

}  // namespace mms
