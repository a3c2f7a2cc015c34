#include "mms/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mms {

namespace detail {

void require_size(const MetricMeasureSpace& space, const ScalarField& f) {
  if (f.size() != space.size())
    throw Error(ErrorCode::InvalidInput, "field has " + std::to_string(f.size()) +
                                             " entries, space has " + std::to_string(space.size()));
}

void require_nonnegative(const ScalarField& f, const char* what) {
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (!(f[i] >= 0.0))
      throw Error(ErrorCode::NegativeInput,
                  std::string(what) + " must be nonnegative (entry " + std::to_string(i) + ")");
  }
}

}  // namespace detail

namespace {

inline double power(double v, double p) { return p == 1.0 ? v : std::pow(v, p); }

void check_args(const MetricMeasureSpace& space, const ScalarField& f, double p, double s) {
  detail::require_size(space, f);
  detail::require_nonnegative(f, "maximal function input");
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidExponent, "maximal exponent must be >= 1");
  if (!(s > 0.0)) throw Error(ErrorCode::InvalidInput, "maximal scale must be positive");
}

double sup_power(const MetricMeasureSpace& space, const ScalarField& fp, double s, Index x) {
  const auto ord = space.order(x);
  const auto sd = space.sorted_dist(x);
  const auto pm = space.prefix_mass(x);
  const auto& mu = space.measure();
  const Index n = space.size();
  double acc = 0.0;
  double best = 0.0;
  for (Index k = 0; k < n; ++k) {
    if (sd[k] > s) break;
    acc += fp[ord[k]] * mu[ord[k]];
    if (k + 1 == n || sd[k + 1] != sd[k]) best = std::max(best, acc / pm[k]);
  }
  return best;
}

ScalarField powered(const ScalarField& f, double p) {
  if (p == 1.0) return f;
  return f.unaryExpr([p](double v) { return std::pow(v, p); });
}

}  // namespace

double maximal_power_at(const MetricMeasureSpace& space, const ScalarField& f, double p, double s,
                        Index x) {
  check_args(space, f, p, s);
  return sup_power(space, powered(f, p), s, x);
}

double maximal_at(const MetricMeasureSpace& space, const ScalarField& f, double p, double s,
                  Index x) {
  return power(maximal_power_at(space, f, p, s, x), 1.0 / p);
}

ScalarField maximal_power(const MetricMeasureSpace& space, const ScalarField& f, double p,
                          double s) {
  check_args(space, f, p, s);
  const ScalarField fp = powered(f, p);
  ScalarField out(space.size());
  for (Index x = 0; x < space.size(); ++x) out[x] = sup_power(space, fp, s, x);
  return out;
}

ScalarField maximal_function(const MetricMeasureSpace& space, const ScalarField& f, double p,
                             double s) {
  ScalarField out = maximal_power(space, f, p, s);
  if (p != 1.0) out = out.unaryExpr([p](double v) { return std::pow(v, 1.0 / p); });
  return out;
}

ScalarField indicator(Index n, const std::vector<bool>& members) {
  ScalarField out = ScalarField::Zero(n);
  for (Index i = 0; i < n; ++i)
    if (members[i]) out[i] = 1.0;
  return out;
}

double weak_type_margin(const MetricMeasureSpace& space, const ScalarField& f, double p, double s,
                        double lambda, Index x, double r, std::optional<double> doubling) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidInput, "lambda must be positive");
  const double D = doubling ? *doubling : doubling_constant(space);
  const ScalarField mp = maximal_power(space, f, p, s);
  const double level = power(lambda, p);
  const auto& mu = space.measure();

  double lhs = 0.0;
  double mass = 0.0;
  for (Index z = 0; z < space.size(); ++z) {
    const double d = space.dist(x, z);
    if (d <= r && mp[z] > level) lhs += mu[z];
    if (d <= r + s) mass += power(f[z], p) * mu[z];
  }
  const double rhs = D * D * D * mass / level;
  return rhs - lhs;
}

double max_max_margin(const MetricMeasureSpace& space, const ScalarField& f, double p, double s,
                      double r, double lambda, Index x, std::optional<double> doubling) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidInput, "lambda must be positive");
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidInput, "outer radius must be positive");
  const double D = doubling ? *doubling : doubling_constant(space);
  const ScalarField mp = maximal_power(space, f, p, s);
  const double level = power(lambda, p);
  std::vector<bool> in_set(space.size());
  for (Index z = 0; z < space.size(); ++z) in_set[z] = mp[z] > level;
  const double lhs = maximal_power_at(space, indicator(space.size(), in_set), 1.0, r, x);
  const double outer = maximal_power_at(space, f, p, s + r, x);
  const double rhs = D * D * D * D * outer / level;
  return rhs - lhs;
}

}  // namespace mms
