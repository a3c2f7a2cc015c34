#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mms/gallery.hpp"
#include "mms/weights.hpp"

namespace mms {
namespace {

WeightedLine uniform_line(int n, const Eigen::VectorXd& omega) {
  WeightedLine line;
  line.positions = Eigen::VectorXd::LinSpaced(n, 0.0, n - 1.0);
  line.lambda = Eigen::VectorXd::Ones(n);
  line.omega = omega;
  return line;
}

// Direct interval scan of the A_p product with p = 2.
double a2_direct(const WeightedLine& line) {
  double best = 0.0;
  for (int i = 0; i < line.size(); ++i)
    for (int j = i; j < line.size(); ++j) {
      double lam = 0.0, w = 0.0, inv = 0.0;
      for (int k = i; k <= j; ++k) {
        lam += line.lambda[k];
        w += line.lambda[k] * line.omega[k];
        inv += line.lambda[k] / line.omega[k];
      }
      best = std::max(best, (w / lam) * (inv / lam));
    }
  return best;
}

TEST(Ap, UnitWeight) {
  const auto line = uniform_line(12, Eigen::VectorXd::Ones(12));
  for (double p : {1.5, 2.0, 3.0}) {
    EXPECT_NEAR(ap_integral_constant(line, p).value, 1.0, 1e-14);
    EXPECT_NEAR(ap_integral_constant(line, p, ApForm::Classical).value, 1.0, 1e-14);
    EXPECT_NEAR(set_bound_constant(line, p).value, 1.0, 1e-14);
  }
}

TEST(Ap, AtLeastOneAndMatchesDirectScan) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd w(15);
    for (int i = 0; i < 15; ++i) w[i] = u(rng);
    auto line = uniform_line(15, w);
    for (int i = 0; i < 15; ++i) line.lambda[i] = u(rng);
    const double v = ap_integral_constant(line, 2.0).value;
    EXPECT_GE(v, 1.0 - 1e-14);
    EXPECT_NEAR(v, a2_direct(line), 1e-12 * v);
    EXPECT_NEAR(ap_integral_constant(line, 2.0, ApForm::Classical).value, v, 1e-12 * v);
  }
}

TEST(SetBound, TwoCells) {
  const auto line = uniform_line(2, Eigen::Vector2d(1.0, 100.0));
  EXPECT_NEAR(set_bound_constant(line, 2.0).value, 0.5 * std::sqrt(101.0), 1e-12);
  EXPECT_NEAR(set_bound_brute_force(line, 2.0).value, 0.5 * std::sqrt(101.0), 1e-12);
}

TEST(SetBound, GreedyMatchesBruteForceOnUniformCells) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.05, 10.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + trial;
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w[i] = u(rng);
    const auto line = uniform_line(n, w);
    for (double p : {1.5, 2.0, 3.0}) {
      const double greedy = set_bound_constant(line, p).value;
      EXPECT_NEAR(greedy, set_bound_brute_force(line, p).value, 1e-12 * greedy);
    }
  }
}

TEST(AverageBound, ConstantAndIndicator) {
  const auto line = make_power_weight_line(21, 0.5);
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(21, 0.4);
  EXPECT_NEAR(average_bound_margin(line, 2.0, c, 3, 12, 2.5), 1.5 * 0.4, 1e-14);
  const double K = set_bound_constant(line, 2.0).value;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(21);
  e.segment(8, 5).setOnes();
  EXPECT_GE(average_bound_margin(line, 2.0, e, 0, 20, K), -1e-12);
}

TEST(Maximal, IntervalMaximalMatchesBruteForce) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto line = make_power_weight_line(17, 1.2);
  Eigen::VectorXd f(17);
  for (int i = 0; i < 17; ++i) f[i] = u(rng);
  const auto m = interval_maximal(line, f);
  for (int i = 0; i < 17; ++i) {
    double best = 0.0;
    for (int a = 0; a <= i; ++a)
      for (int b = i; b < 17; ++b) {
        double lam = 0.0, s = 0.0;
        for (int k = a; k <= b; ++k) {
          lam += line.lambda[k];
          s += line.lambda[k] * f[k];
        }
        best = std::max(best, s / lam);
      }
    EXPECT_NEAR(m[i], best, 1e-14);
    EXPECT_GE(m[i], f[i] - 1e-15);
  }
}

TEST(Maximal, SpikeRatio) {
  const int n = 9;
  const auto line = uniform_line(n, Eigen::VectorXd::Ones(n));
  Eigen::VectorXd spike = Eigen::VectorXd::Zero(n);
  spike[4] = 1.0;
  // Mf(i) = 1/(|i-4|+1), ratio = sqrt(sum Mf^2) for p = 2.
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += 1.0 / ((std::abs(i - 4) + 1.0) * (std::abs(i - 4) + 1.0));
  EXPECT_NEAR(maximal_bound_ratio(line, 2.0, {spike}), std::sqrt(s), 1e-14);
  EXPECT_GE(maximal_bound_ratio(line, 2.0, {spike, Eigen::VectorXd::Ones(n)}), 1.0);
}

TEST(Regime, PowerWeightsAcrossResolutions) {
  const double mild_101 = ap_integral_constant(make_power_weight_line(101, 0.5), 2.0).value;
  const double mild_401 = ap_integral_constant(make_power_weight_line(401, 0.5), 2.0).value;
  EXPECT_LT(std::abs(mild_401 / mild_101 - 1.0), 0.1);
  EXPECT_NEAR(mild_101, a2_direct(make_power_weight_line(101, 0.5)), 1e-10 * mild_101);
  const double steep_101 = ap_integral_constant(make_power_weight_line(101, 1.5), 2.0).value;
  const double steep_401 = ap_integral_constant(make_power_weight_line(401, 1.5), 2.0).value;
  EXPECT_GT(steep_401, 1.5 * steep_101);
}

TEST(Validate, Rejects) {
  auto line = uniform_line(3, Eigen::Vector3d(1, 0, 1));
  EXPECT_THROW(validate(line), Error);
  line.omega = Eigen::Vector3d(1, 1, 1);
  line.positions = Eigen::Vector3d(0, 2, 1);
  EXPECT_THROW(validate(line), Error);
}

}  // namespace
}  // namespace mms
