#pragma once

#include <Eigen/Dense>

#include <vector>

namespace mms {

/// Cells on a line with base measure lambda (cell widths) and a positive
/// weight omega; the weighted measure is mu = omega * lambda. The only balls
/// are index intervals [i..j].
struct WeightedLine {
  Eigen::VectorXd positions;
  Eigen::VectorXd lambda;
  Eigen::VectorXd omega;

  int size() const { return static_cast<int>(omega.size()); }
  Eigen::VectorXd mu() const { return omega.cwiseProduct(lambda); }
};

/// Validates shapes, increasing positions and positivity.
void validate(const WeightedLine& line);

enum class ApForm {
  Verbatim,   // (avg w) (avg w^{1-p})^{1/(p-1)}
  Classical,  // (avg w) (avg w^{1/(1-p)})^{p-1}
};

struct IntervalValue {
  double value = 0.0;
  int first = 0;
  int last = 0;
};

/// Max over intervals of the integral A_p product, averages taken against lambda.
IntervalValue ap_integral_constant(const WeightedLine& line, double p,
                                   ApForm form = ApForm::Verbatim);

/// C (mu-average of f^p over B)^{1/p} - (lambda-average of f over B) for the
/// interval B = [first..last].
double average_bound_margin(const WeightedLine& line, double p, const Eigen::VectorXd& f,
                            int first, int last, double C);

/// Max over intervals B and subsets E of B of
/// (lambda(E)/lambda(B)) / (mu(E)/mu(B))^{1/p}. For each interval the subsets
/// are grown greedily by ascending omega, which is exact when lambda is
/// uniform on the interval; otherwise the greedy value is a lower bound.
IntervalValue set_bound_constant(const WeightedLine& line, double p);

/// The same supremum by enumerating every subset of every interval with at
/// most `max_cells` cells.
IntervalValue set_bound_brute_force(const WeightedLine& line, double p, int max_cells = 15);

/// Uncentered interval maximal function with respect to lambda:
/// Mf(i) = max over intervals containing i of the lambda-average of f.
Eigen::VectorXd interval_maximal(const WeightedLine& line, const Eigen::VectorXd& f);

/// Max over the suite of ||Mf||_{L^p(mu)} / ||f||_{L^p(mu)} (zero fields skipped).
double maximal_bound_ratio(const WeightedLine& line, double p,
                           const std::vector<Eigen::VectorXd>& suite);

}  // namespace mms
