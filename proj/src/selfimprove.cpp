#include "mms/selfimprove.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mms/maximal.hpp"

namespace mms {

namespace {

void require_exponent(double p) {
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidExponent, "self-improvement needs p > 1");
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(ErrorCode::InvalidInput, std::string(what) + " must be positive and finite");
}

long double log2l_of(double v) { return std::log2(static_cast<long double>(v)); }

double to_double(long double log2_value) {
  return static_cast<double>(std::exp2(log2_value));
}

bool leq(double lhs, double rhs) {
  return lhs <= rhs + 1e-12 * std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

}  // namespace

long double kz_log2_epsilon_bound(double D, double p, double C_PI) {
  require_exponent(p);
  require_positive(C_PI, "C_PI");
  if (!(D >= 1.0)) throw Error(ErrorCode::InvalidInput, "doubling constant must be >= 1");
  const long double P = p;
  const long double denom =
      (13.0L * P + 3.0L) + P * log2l_of(C_PI) + (3.0L * P + 4.0L) * log2l_of(D);
  return log2l_of(p) - denom / (P - 1.0L);
}

double kz_epsilon_bound(double D, double p, double C_PI) {
  return to_double(kz_log2_epsilon_bound(D, p, C_PI));
}

long double kz_log2_epsilon_from_CA(double D, double p, double C_A) {
  require_exponent(p);
  require_positive(C_A, "C_A");
  if (!(D >= 1.0)) throw Error(ErrorCode::InvalidInput, "doubling constant must be >= 1");
  const long double P = p;
  const long double denom = (7.0L * P + 3.0L) + P * log2l_of(C_A) + 4.0L * log2l_of(D);
  return log2l_of(p) - denom / (P - 1.0L);
}

double kz_epsilon_from_CA(double D, double p, double C_A) {
  return to_double(kz_log2_epsilon_from_CA(D, p, C_A));
}

double kz_large_p_ratio(double D, double p, double C_PI, int exponent) {
  const long double l = kz_log2_epsilon_bound(D, p, C_PI) + exponent + log2l_of(C_PI) +
                        3.0L * log2l_of(D) - log2l_of(p);
  return to_double(l);
}

namespace {

IterationParams base_params(double p, double q, double delta, double M, double C_A, double D,
                            double C) {
  require_exponent(p);
  if (!(q <= p)) throw Error(ErrorCode::InvalidInput, "q must not exceed p");
  if (!(q >= 1.0)) throw Error(ErrorCode::InvalidExponent, "q must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidInput, "delta must lie in (0, 1)");
  if (!(M >= 2.0)) throw Error(ErrorCode::InvalidInput, "M must be >= 2");
  require_positive(C_A, "C_A");
  require_positive(C, "C");
  if (!(D >= 1.0)) throw Error(ErrorCode::InvalidInput, "doubling constant must be >= 1");
  IterationParams out;
  out.p = p;
  out.q = q;
  out.delta = delta;
  out.M = M;
  out.C_A = C_A;
  out.D = D;
  out.C = C;
  out.L = C / (1.0 - delta);
  return out;
}

void finish(IterationParams& out) {
  out.S = out.C * std::pow(out.M, static_cast<double>(out.k));
  out.window = static_cast<double>(static_cast<long double>(out.k) * (out.p - out.q) / out.p *
                                   log2l_of(out.M));
}

}  // namespace

IterationParams default_params(double p, double q, double delta, double M, double C_A, double D,
                               double C) {
  IterationParams out = base_params(p, q, delta, M, C_A, D, C);
  const long double P = p;
  out.log2_k_real = ((6.0L * P + 3.0L) + P * log2l_of(C_A) + 4.0L * log2l_of(D)) / (P - 1.0L) -
                    P / (P - 1.0L) * log2l_of(delta);
  if (out.log2_k_real >= 62.0L) {
    out.k = std::numeric_limits<std::int64_t>::max();
  } else {
    out.k = static_cast<std::int64_t>(std::ceil(std::exp2(out.log2_k_real)));
  }
  finish(out);
  // The window uses the unrounded k so that q = p - epsilon sits exactly on it.
  const long double window_real =
      std::exp2(out.log2_k_real) * (P - q) / P * log2l_of(M);
  if (!(window_real <= 1.0L + 1e-9L))
    throw Error(ErrorCode::WindowViolated,
                "M^{k(p-q)/p} = 2^" + std::to_string(static_cast<double>(window_real)) +
                    " exceeds 2; q is below p - epsilon");
  out.window = static_cast<double>(window_real);
  return out;
}

IterationParams explicit_params(double p, double q, double delta, double M, std::int64_t k,
                                double C_A, double D, double C) {
  if (k < 1) throw Error(ErrorCode::InvalidInput, "k must be >= 1");
  IterationParams out = base_params(p, q, delta, M, C_A, D, C);
  out.k = k;
  out.log2_k_real = std::log2(static_cast<long double>(k));
  finish(out);
  return out;
}

LevelDecomposition level_decomposition(const MetricMeasureSpace& space, const ScalarField& g,
                                       Index x, Index y, double tau,
                                       const IterationParams& params) {
  if (!(tau > 0.0)) throw Error(ErrorCode::Inadmissible, "no obstacle is admissible at tau = 0");
  make_obstacle(space, g, x, y, params.q, params.L, tau);
  LevelDecomposition dec;
  dec.x = x;
  dec.y = y;
  dec.tau = tau;
  dec.r = space.dist(x, y);
  const Index n = space.size();
  dec.maximal = maximal_function(space, g, params.q, params.delta * params.L * dec.r);

  for (std::int64_t i = 1; i <= params.k; ++i) {
    const double threshold = std::pow(params.M, static_cast<double>(i)) * tau / 2.0;
    std::vector<bool> level(n);
    bool any = false;
    for (Index z = 0; z < n; ++z) {
      level[z] = dec.maximal[z] > threshold;
      any = any || level[z];
    }
    if (!any) break;
    dec.F.push_back(std::move(level));
  }
  const std::size_t m = dec.F.size();
  dec.E.assign(m, std::vector<bool>(n, false));
  for (std::size_t i = m; i-- > 0;) {
    for (Index z = 0; z < n; ++z)
      dec.E[i][z] = dec.F[i][z] || (i + 1 < m && dec.E[i + 1][z]);
  }

  const double k = static_cast<double>(params.k);
  dec.h = ScalarField::Zero(n);
  ScalarField hp_bound = ScalarField::Zero(n);
  for (std::size_t i = 0; i < m; ++i) {
    const double Mi = std::pow(params.M, static_cast<double>(i + 1));
    for (Index z = 0; z < n; ++z) {
      if (!dec.E[i][z]) continue;
      dec.h[z] += Mi;
      hp_bound[z] += std::pow(Mi, params.p);
    }
  }
  dec.h /= k;
  hp_bound *= std::pow(2.0, params.p) / std::pow(k, params.p);

  dec.nested = true;
  for (std::size_t i = 0; i + 1 < m; ++i)
    for (Index z = 0; z < n; ++z)
      if (dec.E[i + 1][z] && !dec.E[i][z]) dec.nested = false;
  dec.excludes_endpoints = true;
  for (const auto& level : dec.E)
    if (level[x] || level[y]) dec.excludes_endpoints = false;
  dec.h_pointwise = true;
  for (Index z = 0; z < n; ++z)
    if (!leq(std::pow(dec.h[z], params.p), hp_bound[z])) dec.h_pointwise = false;

  const long double P = params.p;
  const long double log2_bound =
      2.0L +
      ((2.0L * P + 3.0L) + 4.0L * log2l_of(params.D) +
       static_cast<long double>(params.k) * (P - params.q) * log2l_of(params.M)) /
          P -
      (P - 1.0L) / P * std::log2(static_cast<long double>(params.k));
  dec.h_bound = to_double(log2_bound);
  dec.h_maximal_sum = maximal_at(space, dec.h, params.p, params.C * dec.r, x) +
                      maximal_at(space, dec.h, params.p, params.C * dec.r, y);
  return dec;
}

LevelSelection select_level(const MetricMeasureSpace& space, const CurvePath& path,
                            const LevelDecomposition& dec, const IterationParams& params) {
  LevelSelection sel;
  const Index n = space.size();
  double sum = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dec.E.size(); ++i) {
    const double Mi = std::pow(params.M, static_cast<double>(i + 1));
    const double v = Mi * curve_integral(path, indicator(n, dec.E[i]));
    sel.level_integrals.push_back(v);
    sum += v;
    if (v < best) {
      best = v;
      sel.i0 = static_cast<std::int64_t>(i + 1);
    }
  }
  if (static_cast<std::int64_t>(dec.E.size()) < params.k && !(best <= 0.0)) {
    best = 0.0;
    sel.i0 = static_cast<std::int64_t>(dec.E.size() + 1);
  }
  sel.selected = best;
  sel.mean = sum / static_cast<double>(params.k);
  sel.h_integral = curve_integral(path, dec.h);
  sel.bound = params.C_A * dec.h_bound * dec.r;
  if (!(sel.h_integral < sel.bound))
    throw Error(ErrorCode::NoPathBound, "integral of h along the route is " +
                                            std::to_string(sel.h_integral) + ", not below " +
                                            std::to_string(sel.bound));
  return sel;
}

bool IterationResult::all_hold() const {
  return std::all_of(links.begin(), links.end(),
                     [](const CertificateLink& l) { return !l.applicable || l.holds; });
}

const CertificateLink* IterationResult::link(const std::string& name) const {
  for (const auto& l : links)
    if (l.name == name) return &l;
  return nullptr;
}

IterationResult iteration_step(const MetricMeasureSpace& space, const ScalarField& g, Index x,
                               Index y, double tau, const IterationParams& params, int depth) {
  IterationResult res;
  res.params = params;
  res.tau = tau;
  res.decomposition = level_decomposition(space, g, x, y, tau, params);
  const auto& dec = res.decomposition;
  const double r = dec.r;
  res.gamma = min_obstruction_path(space, x, y, dec.h, params.C * r);
  res.selection = select_level(space, res.gamma, dec, params);
  const auto i0 = res.selection.i0;
  const double Mi0 = std::pow(params.M, static_cast<double>(i0));

  // Gaps: maximal runs of route nodes inside E_{i0}.
  const auto& nodes = res.gamma.nodes;
  for (std::size_t pos = 1; pos + 1 < nodes.size(); ++pos) {
    if (!dec.in_E(static_cast<std::size_t>(i0), nodes[pos])) continue;
    Gap gap;
    gap.start = pos - 1;
    std::size_t end = pos;
    while (dec.in_E(static_cast<std::size_t>(i0), nodes[end])) ++end;
    gap.end = end;
    gap.a = nodes[gap.start];
    gap.b = nodes[gap.end];
    for (std::size_t e = gap.start; e < gap.end; ++e) gap.traversed += res.gamma.lengths[e];
    gap.d = space.dist(gap.a, gap.b);
    if (gap.d > 0.0) {
      const double s = params.L * gap.d;
      gap.endpoint_sum = maximal_at(space, g, params.q, s, gap.a) +
                         maximal_at(space, g, params.q, s, gap.b);
      try {
        gap.replacement = min_obstruction_path(space, gap.a, gap.b, g, s);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoFeasiblePath) throw;
        throw Error(ErrorCode::GapInfeasible, "no route between " + space.label(gap.a) + " and " +
                                                  space.label(gap.b) + " within L d_j");
      }
      gap.replacement_cost = curve_integral(gap.replacement, g);
      gap.realized_alpha = gap.replacement_cost / gap.d;
    } else {
      gap.replacement = make_path(space, {gap.a});
    }
    res.gaps.push_back(std::move(gap));
    pos = end;
  }

  // Splice gamma'.
  std::vector<Index> spliced;
  std::size_t pos = 0;
  for (const auto& gap : res.gaps) {
    spliced.insert(spliced.end(), nodes.begin() + pos, nodes.begin() + gap.start + 1);
    spliced.insert(spliced.end(), gap.replacement.nodes.begin() + 1, gap.replacement.nodes.end());
    pos = gap.end + 1;
  }
  spliced.insert(spliced.end(), nodes.begin() + pos, nodes.end());
  res.improved = make_path(space, std::move(spliced));

  std::vector<bool> in_gap_edge(res.gamma.edge_count(), false);
  for (const auto& gap : res.gaps)
    for (std::size_t e = gap.start; e < gap.end; ++e) in_gap_edge[e] = true;
  for (std::size_t e = 0; e < res.gamma.edge_count(); ++e)
    if (!in_gap_edge[e])
      res.kept_integral += edge_cost(res.gamma.lengths[e], g[nodes[e]], g[nodes[e + 1]]);
  res.improved_integral = curve_integral(res.improved, g);

  double sum_d = 0.0, sum_gap = 0.0, sum_cost = 0.0, sum_replaced_len = 0.0;
  for (const auto& gap : res.gaps) {
    sum_d += gap.d;
    sum_gap += gap.traversed;
    sum_cost += gap.replacement_cost;
    sum_replaced_len += curve_length(gap.replacement);
  }
  const double e_integral =
      curve_integral(res.gamma, indicator(space.size(), i0 <= static_cast<std::int64_t>(dec.E.size())
                                                            ? dec.E[i0 - 1]
                                                            : std::vector<bool>(space.size())));

  auto add = [&](std::string name, bool applicable, bool holds, double lhs, double rhs) {
    res.links.push_back({std::move(name), applicable, holds, lhs, rhs});
  };
  add("exclusion", true, dec.excludes_endpoints, 0.0, 0.0);
  add("nesting", true, dec.nested, 0.0, 0.0);
  add("h_pointwise", true, dec.h_pointwise, 0.0, 0.0);
  add("h_bound", true, dec.h_maximal_sum < dec.h_bound, dec.h_maximal_sum, dec.h_bound);
  add("path_bound", true, res.selection.h_integral < res.selection.bound,
      res.selection.h_integral, res.selection.bound);
  add("level_selection", true, leq(res.selection.selected, res.selection.h_integral),
      res.selection.selected, res.selection.h_integral);
  {
    const double rhs = 2.0 * res.selection.h_integral / Mi0;
    const bool holds = leq(sum_d, sum_gap) && leq(sum_gap, 2.0 * e_integral) &&
                       leq(2.0 * e_integral, rhs);
    add("gap_measure", true, holds, sum_gap, rhs);
  }
  {
    const bool applicable = res.selection.h_integral < params.delta * r / 2.0;
    const double rhs = params.delta * r / Mi0;
    add("gap_budget", applicable, sum_gap < rhs, sum_gap, rhs);
  }
  {
    bool applicable = false, holds = true;
    double worst = 0.0;
    for (const auto& gap : res.gaps) {
      if (!(gap.d > 0.0) || !(gap.d <= params.delta * r)) continue;
      applicable = true;
      worst = std::max(worst, gap.endpoint_sum);
      if (!leq(gap.endpoint_sum, Mi0 * tau)) holds = false;
    }
    add("endpoint_levels", applicable, holds, worst, Mi0 * tau);
  }
  {
    double worst = 0.0;
    for (Index z : nodes)
      if (!dec.in_E(static_cast<std::size_t>(i0), z)) worst = std::max(worst, g[z]);
    const double Mk = std::pow(params.M, static_cast<double>(params.k));
    add("on_curve", true, leq(worst, Mi0 * tau) && leq(worst, Mk * tau), worst, Mi0 * tau);
  }
  add("decomposition", true,
      std::abs(res.improved_integral - (res.kept_integral + sum_cost)) <=
          1e-12 * std::max(1.0, res.improved_integral),
      res.improved_integral, res.kept_integral + sum_cost);
  add("kept_bound", true, leq(res.kept_integral, params.S * tau * r), res.kept_integral,
      params.S * tau * r);
  {
    const double lhs = curve_length(res.improved);
    const double rhs = curve_length(res.gamma) - sum_gap + sum_replaced_len;
    const double cap = curve_length(res.gamma) - sum_gap + params.L * sum_d;
    add("length_accounting", true, leq(lhs, rhs) && leq(rhs, cap), lhs, cap);
  }
  {
    const double lhs = curve_length(res.improved);
    add("length", sum_d <= params.delta * r, leq(lhs, params.L * r), lhs, params.L * r);
  }

  if (depth > 1) {
    for (const auto& gap : res.gaps) {
      const double level = Mi0 * tau;
      if (!(gap.d > 0.0) || !(gap.endpoint_sum < level)) continue;
      try {
        res.children.push_back(iteration_step(space, g, gap.a, gap.b, level, params, depth - 1));
      } catch (const Error&) {
        // Deeper rounds are exploratory; an unmet precondition ends the branch.
      }
    }
  }
  return res;
}

CrucialMargin crucial_margin(const MetricMeasureSpace& space, const IterationResult& step,
                             const ScalarField& g) {
  CrucialMargin out;
  const auto& dec = step.decomposition;
  out.tau = step.tau;
  out.x = dec.x;
  out.y = dec.y;
  const auto* budget = step.link("gap_budget");
  out.applicable = step.gaps.empty() || (budget && budget->applicable);
  out.lhs = alpha_given_field(space, g, step.params.L, dec.x, dec.y);
  double worst = 0.0;
  for (const auto& gap : step.gaps) worst = std::max(worst, gap.realized_alpha);
  const double Mi0 = std::pow(step.params.M, static_cast<double>(step.selection.i0));
  out.rhs = step.params.S * step.tau + step.params.delta * worst / Mi0;
  out.margin = out.rhs - out.lhs;
  return out;
}

std::vector<CrucialMargin> crucial_inequality_check(const MetricMeasureSpace& space,
                                                    const IterationParams& params,
                                                    const std::vector<ObstacleInstance>& suite) {
  std::vector<CrucialMargin> out;
  for (const auto& inst : suite) {
    const auto step = iteration_step(space, inst.g, inst.x, inst.y, inst.tau, params);
    out.push_back(crucial_margin(space, step, inst.g));
  }
  return out;
}

KZScan kz_empirical_scan(const MetricMeasureSpace& space, double p, double C,
                         std::vector<double> q_grid, const SearchConfig& config, double blowup) {
  require_exponent(p);
  for (double q : q_grid)
    if (!(q > 1.0 && q <= p)) throw Error(ErrorCode::InvalidExponent, "q grid must lie in (1, p]");
  KZScan scan;
  scan.p = p;
  scan.C = C;
  scan.blowup = blowup;
  scan.D = doubling_constant(space, config.r_max);

  const PIEstimate base = pi_constant(space, p, C, config);
  scan.base = base.value;
  scan.pool = base.pool;
  if (scan.base > 0.0) {
    scan.log2_epsilon_bound = kz_log2_epsilon_bound(scan.D, p, scan.base);
    scan.epsilon_bound = to_double(scan.log2_epsilon_bound);
  }
  std::vector<ScalarField> fields;
  for (const auto& w : base.pool) fields.push_back(w.f);

  if (std::find(q_grid.begin(), q_grid.end(), p) == q_grid.end()) q_grid.push_back(p);
  std::sort(q_grid.begin(), q_grid.end(), std::greater<>());
  q_grid.erase(std::unique(q_grid.begin(), q_grid.end()), q_grid.end());

  for (double q : q_grid) {
    ScanRow row;
    row.q = q;
    if (q == p) {
      row.C_PI = base.value;
      for (std::size_t i = 0; i < base.pool.size(); ++i)
        if (base.pool[i].ratio == base.value) {
          row.witness = i;
          break;
        }
    } else {
      const PIEstimate est = pi_constant_over(space, fields, q, C, config.r_max);
      row.C_PI = est.value;
      for (std::size_t i = 0; i < est.pool.size(); ++i)
        if (est.pool[i].ratio == est.value) {
          row.witness = i;
          break;
        }
    }
    row.ratio_to_base = scan.base > 0.0 ? row.C_PI / scan.base : 0.0;
    row.within_blowup = row.C_PI <= blowup * scan.base;
    row.inside_formula_window = q >= p - scan.epsilon_bound;
    scan.rows.push_back(row);
  }

  scan.monotone = true;
  for (std::size_t i = 1; i < scan.rows.size(); ++i)
    if (!leq(scan.rows[i - 1].C_PI, scan.rows[i].C_PI)) scan.monotone = false;
  scan.empirical_window = 0.0;
  for (const auto& row : scan.rows) {
    if (!row.within_blowup) break;
    scan.empirical_window = p - row.q;
  }
  return scan;
}

}  // namespace mms
