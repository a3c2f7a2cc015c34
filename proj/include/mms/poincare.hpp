#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mms/connectivity.hpp"
#include "mms/space.hpp"

namespace mms {

/// Lip f(x) = max over graph neighbors y of |f(x) - f(y)| / len(x, y).
ScalarField lip_field(const MetricMeasureSpace& space, const ScalarField& f);

/// Balls used by the Poincare computations. They are taken in the override
/// metric when the space carries one (snowflake diagnostics), otherwise in
/// the path metric.
class BallGeometry {
 public:
  explicit BallGeometry(const MetricMeasureSpace& space);

  Index size() const { return static_cast<Index>(order_.size()); }
  double dist(Index a, Index b) const { return (*dist_)(a, b); }
  std::span<const Index> order(Index c) const { return order_[c]; }
  std::span<const double> sorted_dist(Index c) const { return sorted_dist_[c]; }
  Index count(Index c, double r) const;
  double mass(Index c, double r) const;

  /// Radii at which the Poincare ratio of a ball around c can attain its
  /// supremum: distances from c together with those distances divided by C,
  /// restricted to r < r_max.
  std::vector<double> critical_radii(Index c, double C, std::optional<double> r_max) const;

 private:
  const Eigen::MatrixXd* dist_;
  std::vector<std::vector<Index>> order_;
  std::vector<std::vector<double>> sorted_dist_;
  std::vector<std::vector<double>> prefix_mass_;
};

/// [avg_B |f - f_B|] / [r (avg_{CB} (Lip f)^p)^{1/p}] with B = B(x, r).
/// A zero numerator gives 0; a zero denominator with positive numerator
/// throws DegenerateDenominator.
double pi_ratio(const MetricMeasureSpace& space, const ScalarField& f, Index x, double r, double C,
                double p);

struct PIWitness {
  ScalarField f;
  Index center = 0;
  double radius = 0.0;
  double ratio = 0.0;
  std::string family;
};

/// Best ratio of a fixed f over all balls at critical radii.
PIWitness best_ball(const MetricMeasureSpace& space, const ScalarField& f, double p, double C,
                    std::optional<double> r_max = std::nullopt);

struct PIEstimate {
  double value = 0.0;
  PIWitness witness;
  std::vector<PIWitness> pool;  // every test function tried, with its best ball
};

/// Lower bound on the (1,p)-Poincare constant. Test functions: distance
/// fields dist(., z), distance fields of greedily grown sets, random fields
/// and the current best refined by coordinate ascent on their worst ball,
/// and for p = 2 (when enabled) the top generalized eigenvector of the
/// variance form on B against the edge energy on CB, for the most critical
/// balls. The value is the best ratio over the whole pool and all balls.
PIEstimate pi_constant(const MetricMeasureSpace& space, double p, double C,
                       const SearchConfig& config);

/// Re-evaluates a fixed pool of test functions at exponent p.
PIEstimate pi_constant_over(const MetricMeasureSpace& space, const std::vector<ScalarField>& pool,
                            double p, double C, std::optional<double> r_max = std::nullopt);

/// (radius, best ratio over the pool at that radius) for every critical radius.
std::vector<std::pair<double, double>> pi_scale_profile(const MetricMeasureSpace& space,
                                                        const std::vector<ScalarField>& pool,
                                                        double p, double C);

struct PointwiseWitness {
  ScalarField f;
  ScalarField g;
  Index x = 0;
  Index y = 0;
  double ratio = 0.0;
  std::string family;
};

/// max over pairs of |f(x) - f(y)| / (d(x,y) (M_{p,Cr}g(x) + M_{p,Cr}g(y))).
/// Pairs with zero denominator are skipped when the numerator vanishes and
/// give +infinity otherwise.
PointwiseWitness pointwise_pi_ratio(const MetricMeasureSpace& space, const ScalarField& f,
                                    const ScalarField& g, double p, double C);

/// min over pairs of C_PPI d (M g(x) + M g(y)) - |f(x) - f(y)|. Throws
/// NotUpperGradient when g fails upper_gradient_check beyond rounding.
double pointwise_pi_margin(const MetricMeasureSpace& space, const ScalarField& f,
                           const ScalarField& g, double p, double C, double C_PPI);

struct PathCheck {
  Index x = 0;
  Index y = 0;
  double tau = 0.0;
  double maximal_sum = 0.0;   // M g(x) + M g(y)
  double length_ratio = 0.0;  // Len(gamma) / d(x,y)
  double cost_ratio = 0.0;    // int_gamma g / (d(x,y) * maximal_sum)
  bool length_ok = false;     // length_ratio <= 5 C_PPI
  bool cost_ok = false;       // cost_ratio <= 4 C_PPI
};

struct PIReport {
  double p = 2.0;
  double C = 1.0;
  std::optional<double> r_max;
  std::uint64_t seed = 0;
  double doubling = 1.0;
  double quasiconvexity = 1.0;

  PIEstimate pi;
  double C_PPI = 0.0;
  PointwiseWitness ppi_witness;
  std::vector<PointwiseWitness> ppi_pool;

  bool ap_established = false;  // false when some pair has no path within C d(x,y)
  std::string ap_note;
  double C_A = 0.0;
  AlphaProfile alpha;

  // A_pC => PtPI: C_PPI <= C_A.
  double margin_ptpi_from_ap = 0.0;
  bool ptpi_from_ap_ok = false;
  // PtPI => A_pC: curves of length <= 5 C_PPI d and integral <= 4 C_PPI d (Mg(x)+Mg(y)).
  std::vector<PathCheck> path_checks;
  double margin_length = 0.0;  // min over checks of 5 C_PPI - length_ratio
  double margin_cost = 0.0;    // min over checks of 4 C_PPI - cost_ratio
  bool ap_from_ptpi_ok = false;
};

/// Computes C_PI, C_PPI and C_A on one space and checks the quantitative
/// implications between them. Gradients of the pointwise witnesses are fed to
/// the alpha search, and path-cost functions of the alpha witnesses are fed
/// to the pointwise search, so both constants see each other's extremizers.
/// `tolerance` is relative.
PIReport characterization_consistency(const MetricMeasureSpace& space, double p, double C,
                                      std::vector<double> tau_grid, const SearchConfig& config,
                                      double tolerance = 1e-9);

}  // namespace mms
