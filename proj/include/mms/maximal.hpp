#pragma once

#include <optional>

#include "mms/space.hpp"

namespace mms {

/// p-th power of the localized maximal function at one node:
/// sup over r in (0, s] of the average of f^p over the closed ball B(x, r).
/// The supremum is exact: balls only change at the distance levels of x, and
/// the r -> 0 limit is the singleton {x}.
double maximal_power_at(const MetricMeasureSpace& space, const ScalarField& f, double p, double s,
                        Index x);

/// M_{p,s} f(x) = (maximal_power_at)^{1/p}.
double maximal_at(const MetricMeasureSpace& space, const ScalarField& f, double p, double s,
                  Index x);

/// M_{p,s} f on every node. Throws NegativeInput when f has a negative or NaN
/// entry and InvalidInput for p < 1 or s <= 0.
ScalarField maximal_function(const MetricMeasureSpace& space, const ScalarField& f, double p,
                             double s);

/// Same as maximal_function but returns the p-th powers (no root taken).
ScalarField maximal_power(const MetricMeasureSpace& space, const ScalarField& f, double p,
                          double s);

/// Indicator field of a node predicate.
ScalarField indicator(Index n, const std::vector<bool>& members);

/// RHS - LHS of the weak-type estimate
///   mu({M_{p,s} f > lambda} ∩ B(x,r)) <= D^3 ||f 1_{B(x,r+s)}||_p^p / lambda^p.
/// `doubling` defaults to the global doubling constant of the space.
double weak_type_margin(const MetricMeasureSpace& space, const ScalarField& f, double p, double s,
                        double lambda, Index x, double r,
                        std::optional<double> doubling = std::nullopt);

/// D^4 (M_{p,s+r} f(x))^p / lambda^p - M_r 1_E(x) with E = {M_{p,s} f > lambda}.
double max_max_margin(const MetricMeasureSpace& space, const ScalarField& f, double p, double s,
                      double r, double lambda, Index x,
                      std::optional<double> doubling = std::nullopt);

namespace detail {
void require_nonnegative(const ScalarField& f, const char* what);
void require_size(const MetricMeasureSpace& space, const ScalarField& f);
}  // namespace detail

}  // namespace mms
