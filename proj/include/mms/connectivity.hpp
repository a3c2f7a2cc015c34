#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mms/curves.hpp"
#include "mms/space.hpp"

namespace mms {

/// A [0,1]-valued field together with the pair and level it was checked
/// against. `attained` is M_{p,Cr}g(x) + M_{p,Cr}g(y) with r = d(x,y).
struct ObstacleFunction {
  ScalarField values;
  Index x = 0;
  Index y = 0;
  double p = 1.0;
  double C = 1.0;
  double tau = 0.0;
  double attained = 0.0;
};

/// M_{p,Cr}g(x) + M_{p,Cr}g(y) with r = d(x,y).
double endpoint_maximal_sum(const MetricMeasureSpace& space, const ScalarField& g, double p,
                            double C, Index x, Index y);

/// Checks 0 <= g <= 1 and the strict admissibility inequality
/// endpoint_maximal_sum < tau. Throws Inadmissible (with the attained sum)
/// otherwise.
ObstacleFunction make_obstacle(const MetricMeasureSpace& space, ScalarField g, Index x, Index y,
                               double p, double C, double tau);

/// (1/d(x,y)) * min over paths of length <= C d(x,y) of the g-integral.
/// Throws NoFeasiblePath when C is below the detour ratio of the pair.
double alpha_given_g(const MetricMeasureSpace& space, const ObstacleFunction& g);

/// Same as above with an already validated field (no admissibility check).
double alpha_given_field(const MetricMeasureSpace& space, const ScalarField& g, double C, Index x,
                         Index y);

struct SearchConfig {
  std::uint64_t seed = 1;
  int restarts = 4;          // random starts for coordinate ascent
  int ascent_sweeps = 2;     // pattern search passes per step size
  int greedy_steps = 12;     // max growth steps of greedy indicator search
  int pair_sample = 24;      // sampled pairs on spaces with more than 12 nodes
  int all_pairs_below = 12;  // probe every pair at or below this node count
  int oracle_cap = 10;       // exhaustive subset search at or below this size
  double slack = 1e-6;       // admissibility target tau * (1 - slack)
  bool spectral = true;      // p = 2 eigenvector candidates in the PI search
  std::optional<double> r_max;  // scale cap r_0
};

/// Node pairs probed by the alpha search: every pair (x < y) on small spaces,
/// otherwise a seeded sample stratified by distance plus diameter pairs.
/// Pairs with d(x,y) > r_max are dropped.
std::vector<std::pair<Index, Index>> probe_pairs(const MetricMeasureSpace& space,
                                                 const SearchConfig& config);

struct AlphaRow {
  double tau = 0.0;
  double alpha = 0.0;
  bool exact_indicators = false;  // exhaustive subset enumeration was run
  ObstacleFunction witness;
};

struct AlphaProfile {
  double p = 1.0;
  double C = 1.0;
  std::optional<double> r_max;
  std::uint64_t seed = 0;
  std::vector<AlphaRow> rows;
};

/// Lower bound for alpha^p(C, tau) from the obstacle families: indicators of
/// node subsets (exhaustive when the space is within the oracle cap, greedy
/// growth otherwise), ball indicators and tents around nodes of the
/// region reachable within the budget, random fields refined by coordinate
/// ascent, and any `extra` fields supplied by the caller. Every candidate is
/// scaled to the largest admissible multiple (capped so that g <= 1).
AlphaRow alpha_estimate(const MetricMeasureSpace& space, double p, double C, double tau,
                        const SearchConfig& config, const std::vector<ScalarField>& extra = {});

/// alpha_estimate over an ascending tau grid. The witness of each row is
/// carried to the next level, so rows are nondecreasing in tau.
AlphaProfile alpha_profile(const MetricMeasureSpace& space, double p, double C,
                           std::vector<double> tau_grid, const SearchConfig& config,
                           const std::vector<ScalarField>& extra = {});

/// max over rows with tau > 0 of alpha / tau.
double ap_connectivity_constant(const AlphaProfile& profile);
double ap_connectivity_constant(const MetricMeasureSpace& space, double p, double C,
                                const std::vector<double>& tau_grid, const SearchConfig& config);

/// Exact maximum over indicator obstacles c * 1_S (all subsets S of the nodes
/// reachable within the budget, all pairs). Throws TooLarge above `node_cap`.
AlphaRow alpha_indicator_exact(const MetricMeasureSpace& space, double p, double C, double tau,
                               double slack = 1e-6, int node_cap = 10);

struct SublinearityResult {
  double slack = 0.0;           // K * alpha(g/K) - alpha(g), zero by linearity
  double cost = 0.0;            // integral along the optimal path for g
  double scaled_cost = 0.0;     // integral along the optimal path for g/K
  double scaled_attained = 0.0; // endpoint maximal sum of g/K
};

/// Checks that g/K is admissible at level tau and that the optimal cost is
/// linear under the scaling. `g` must be admissible at level K * tau.
SublinearityResult sublinearity_check(const MetricMeasureSpace& space, double tau, double K,
                                      const ObstacleFunction& g);

}  // namespace mms
