#include "mms/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mms/errors.hpp"

namespace mms {

void validate(const WeightedLine& line) {
  const auto n = line.omega.size();
  if (n < 1) throw Error(ErrorCode::InvalidInput, "weighted line has no cells");
  if (line.positions.size() != n || line.lambda.size() != n)
    throw Error(ErrorCode::InvalidInput, "positions, lambda and omega must have equal length");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(line.omega[i] > 0.0) || !std::isfinite(line.omega[i]))
      throw Error(ErrorCode::NonpositiveWeight, "omega at cell " + std::to_string(i) + " is not positive");
    if (!(line.lambda[i] > 0.0) || !std::isfinite(line.lambda[i]))
      throw Error(ErrorCode::NonpositiveWeight, "lambda at cell " + std::to_string(i) + " is not positive");
    if (i > 0 && !(line.positions[i] > line.positions[i - 1]))
      throw Error(ErrorCode::InvalidInput, "positions must be strictly increasing");
  }
}

namespace {

Eigen::VectorXd prefix(const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size() + 1);
  out[0] = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i + 1] = out[i] + v[i];
  return out;
}

}  // namespace

IntervalValue ap_integral_constant(const WeightedLine& line, double p, ApForm form) {
  validate(line);
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidExponent, "A_p constant needs p > 1");
  const double inner_exp = form == ApForm::Verbatim ? 1.0 - p : 1.0 / (1.0 - p);
  const double outer_exp = form == ApForm::Verbatim ? 1.0 / (p - 1.0) : p - 1.0;
  const Eigen::VectorXd lam = prefix(line.lambda);
  const Eigen::VectorXd w = prefix(line.omega.cwiseProduct(line.lambda));
  const Eigen::VectorXd dual =
      prefix(line.omega.unaryExpr([inner_exp](double v) { return std::pow(v, inner_exp); })
                 .cwiseProduct(line.lambda));
  IntervalValue best{0.0, 0, 0};
  const int n = line.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double len = lam[j + 1] - lam[i];
      const double value =
          (w[j + 1] - w[i]) / len * std::pow((dual[j + 1] - dual[i]) / len, outer_exp);
      if (value > best.value) best = {value, i, j};
    }
  }
  return best;
}

double average_bound_margin(const WeightedLine& line, double p, const Eigen::VectorXd& f,
                            int first, int last, double C) {
  validate(line);
  if (f.size() != line.omega.size()) throw Error(ErrorCode::InvalidInput, "field size mismatch");
  if (first < 0 || last >= line.size() || first > last)
    throw Error(ErrorCode::InvalidInput, "invalid interval");
  double mass = 0.0, power_sum = 0.0, len = 0.0, sum = 0.0;
  for (int i = first; i <= last; ++i) {
    if (!(f[i] >= 0.0)) throw Error(ErrorCode::NegativeInput, "field must be nonnegative");
    const double mu = line.omega[i] * line.lambda[i];
    mass += mu;
    power_sum += std::pow(f[i], p) * mu;
    len += line.lambda[i];
    sum += f[i] * line.lambda[i];
  }
  return C * std::pow(power_sum / mass, 1.0 / p) - sum / len;
}

IntervalValue set_bound_constant(const WeightedLine& line, double p) {
  validate(line);
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidExponent, "set bound needs p >= 1");
  const int n = line.size();
  IntervalValue best{0.0, 0, 0};
  std::vector<int> cells;
  cells.reserve(n);
  for (int i = 0; i < n; ++i) {
    cells.clear();
    double lam_b = 0.0, mu_b = 0.0;
    for (int j = i; j < n; ++j) {
      auto pos = std::upper_bound(cells.begin(), cells.end(), j,
                                  [&](int a, int b) { return line.omega[a] < line.omega[b]; });
      cells.insert(pos, j);
      lam_b += line.lambda[j];
      mu_b += line.omega[j] * line.lambda[j];
      double lam_e = 0.0, mu_e = 0.0;
      for (int c : cells) {
        lam_e += line.lambda[c];
        mu_e += line.omega[c] * line.lambda[c];
        const double value = (lam_e / lam_b) / std::pow(mu_e / mu_b, 1.0 / p);
        if (value > best.value) best = {value, i, j};
      }
    }
  }
  return best;
}

IntervalValue set_bound_brute_force(const WeightedLine& line, double p, int max_cells) {
  validate(line);
  const int n = line.size();
  IntervalValue best{0.0, 0, 0};
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n && j - i + 1 <= max_cells; ++j) {
      const int m = j - i + 1;
      double lam_b = 0.0, mu_b = 0.0;
      for (int c = i; c <= j; ++c) {
        lam_b += line.lambda[c];
        mu_b += line.omega[c] * line.lambda[c];
      }
      for (unsigned mask = 1; mask < (1u << m); ++mask) {
        double lam_e = 0.0, mu_e = 0.0;
        for (int b = 0; b < m; ++b) {
          if (mask & (1u << b)) {
            lam_e += line.lambda[i + b];
            mu_e += line.omega[i + b] * line.lambda[i + b];
          }
        }
        const double value = (lam_e / lam_b) / std::pow(mu_e / mu_b, 1.0 / p);
        if (value > best.value) best = {value, i, j};
      }
    }
  }
  return best;
}

Eigen::VectorXd interval_maximal(const WeightedLine& line, const Eigen::VectorXd& f) {
  validate(line);
  const int n = line.size();
  if (f.size() != n) throw Error(ErrorCode::InvalidInput, "field size mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  std::vector<double> avg(n);
  for (int a = 0; a < n; ++a) {
    double len = 0.0, sum = 0.0;
    for (int b = a; b < n; ++b) {
      len += line.lambda[b];
      sum += f[b] * line.lambda[b];
      avg[b] = sum / len;
    }
    double suffix = -std::numeric_limits<double>::infinity();
    for (int b = n - 1; b >= a; --b) {
      suffix = std::max(suffix, avg[b]);
      out[b] = std::max(out[b], suffix);
    }
  }
  return out;
}

double maximal_bound_ratio(const WeightedLine& line, double p,
                           const std::vector<Eigen::VectorXd>& suite) {
  validate(line);
  const Eigen::VectorXd mu = line.mu();
  double best = 0.0;
  for (const auto& f : suite) {
    if (f.size() != line.omega.size()) throw Error(ErrorCode::InvalidInput, "field size mismatch");
    if ((f.array() < 0.0).any()) throw Error(ErrorCode::NegativeInput, "field must be nonnegative");
    const Eigen::VectorXd mf = interval_maximal(line, f);
    const double den = (f.array().pow(p) * mu.array()).sum();
    if (den == 0.0) continue;
    const double num = (mf.array().pow(p) * mu.array()).sum();
    best = std::max(best, std::pow(num / den, 1.0 / p));
  }
  return best;
}

}  // namespace mms
