#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mms/connectivity.hpp"
#include "mms/curves.hpp"
#include "mms/poincare.hpp"
#include "mms/space.hpp"

namespace mms {

/// log2 of p / (2^{13p+3} C_PI^p D^{3p+4})^{1/(p-1)}, evaluated in long double.
long double kz_log2_epsilon_bound(double D, double p, double C_PI);
/// The same bound as a double (may underflow to 0 for extreme inputs).
double kz_epsilon_bound(double D, double p, double C_PI);

/// log2 of p / (2^{7p+3} C_A^p D^4)^{1/(p-1)}.
long double kz_log2_epsilon_from_CA(double D, double p, double C_A);
double kz_epsilon_from_CA(double D, double p, double C_A);

/// epsilon * 2^{e} * C_PI * D^3 / p for the displayed bound, in the log
/// domain. Tends to 1 for e = 13 as p grows; e = 12 gives the limit 1/2.
double kz_large_p_ratio(double D, double p, double C_PI, int exponent = 13);

struct IterationParams {
  double p = 2.0;
  double q = 2.0;
  double M = 2.0;
  double delta = 0.5;
  std::int64_t k = 1;
  long double log2_k_real = 0.0L;  // log2 of the unrounded k from the parameter choice
  double C = 1.0;                  // A_p budget factor
  double L = 2.0;                  // C / (1 - delta)
  double S = 1.0;                  // C * M^k (the recursion uses S * tau)
  double C_A = 1.0;
  double D = 1.0;
  double window = 0.0;             // log2 of M^{k (p - q) / p}, at most 1 inside the window
};

/// k = ceil((2^{6p+3} C_A^p D^4)^{1/(p-1)} / delta^{p/(p-1)}) (saturating),
/// L = C / (1 - delta), S = C M^k. The window M^{k(p-q)/p} <= 2 is checked
/// with the unrounded k; throws WindowViolated otherwise.
IterationParams default_params(double p, double q, double delta, double M, double C_A, double D,
                               double C);

/// Parameters with an explicit k and no window requirement, for experiments.
IterationParams explicit_params(double p, double q, double delta, double M, std::int64_t k,
                                double C_A, double D, double C);

struct LevelDecomposition {
  Index x = 0;
  Index y = 0;
  double r = 0.0;
  double tau = 0.0;
  ScalarField maximal;                     // M_{q, delta L r} g
  std::vector<std::vector<bool>> F;        // F_1 .. F_m, m = last nonempty level
  std::vector<std::vector<bool>> E;        // E_i = union of F_j, j >= i
  ScalarField h;                           // (1/k) sum M^i 1_{E_i}
  double h_bound = 0.0;                    // 4 (2^{2p+3} D^4 M^{k(p-q)})^{1/p} / k^{(p-1)/p}
  double h_maximal_sum = 0.0;              // M_{p,Cr}h(x) + M_{p,Cr}h(y)
  bool nested = false;
  bool excludes_endpoints = false;
  bool h_pointwise = false;                // h^p <= (2^p / k^p) sum M^{ip} 1_{E_i}

  /// E_i for 1 <= i <= k (empty above the last stored level).
  bool in_E(std::size_t i, Index z) const { return i <= E.size() && E[i - 1][z]; }
};

/// Level sets of M_{q, delta L r} g for an obstacle admissible at (x, y, q, L, tau).
/// Throws Inadmissible otherwise.
LevelDecomposition level_decomposition(const MetricMeasureSpace& space, const ScalarField& g,
                                       Index x, Index y, double tau, const IterationParams& params);

struct LevelSelection {
  std::int64_t i0 = 1;
  std::vector<double> level_integrals;  // M^i int_gamma 1_{E_i}, nonempty levels only
  double selected = 0.0;                // M^{i0} int_gamma 1_{E_{i0}}
  double mean = 0.0;                    // (1/k) sum of the level integrals
  double h_integral = 0.0;              // int_gamma h
  double bound = 0.0;                   // Delta r
};

/// Index minimizing M^i int_gamma 1_{E_i} (smallest on ties). Throws
/// NoPathBound unless int_gamma h < Delta r with Delta = C_A h_bound.
LevelSelection select_level(const MetricMeasureSpace& space, const CurvePath& path,
                            const LevelDecomposition& dec, const IterationParams& params);

struct Gap {
  std::size_t start = 0;     // position of a_j in the path
  std::size_t end = 0;       // position of b_j in the path
  Index a = 0;
  Index b = 0;
  double traversed = 0.0;    // length of gamma between a_j and b_j
  double d = 0.0;            // d(a_j, b_j)
  double endpoint_sum = 0.0; // M_{q, L d_j} g(a_j) + M_{q, L d_j} g(b_j)
  CurvePath replacement;
  double replacement_cost = 0.0;
  double realized_alpha = 0.0;  // replacement_cost / d_j (0 when d_j = 0)
};

struct CertificateLink {
  std::string name;
  bool applicable = true;
  bool holds = true;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct IterationResult {
  IterationParams params;
  double tau = 0.0;
  LevelDecomposition decomposition;
  CurvePath gamma;
  LevelSelection selection;
  std::vector<Gap> gaps;
  CurvePath improved;
  double kept_integral = 0.0;      // int over the part of gamma outside the gaps
  double improved_integral = 0.0;  // int_{gamma'} g
  std::vector<CertificateLink> links;
  std::vector<IterationResult> children;  // deeper replacement rounds, when requested

  bool all_hold() const;
  const CertificateLink* link(const std::string& name) const;
};

/// One gap-replacement round for an obstacle g admissible at (x, y, q, L, tau):
/// route around h within C r, pick the level i0, replace every run of the
/// route inside E_{i0} by an optimal g-route of length <= L d_j, and certify
/// each inequality of the chain. Links whose hypotheses the discrete instance
/// does not meet are marked not applicable instead of being judged. With
/// depth > 1 each gap with an admissible endpoint pair is iterated again.
IterationResult iteration_step(const MetricMeasureSpace& space, const ScalarField& g, Index x,
                               Index y, double tau, const IterationParams& params, int depth = 1);

struct CrucialMargin {
  double tau = 0.0;
  Index x = 0;
  Index y = 0;
  bool applicable = false;
  double lhs = 0.0;  // alpha of g at budget L
  double rhs = 0.0;  // S tau + delta M^{-i0} max_j realized alpha_j
  double margin = 0.0;
};

/// RHS - LHS of the recursion inequality on one iteration result.
CrucialMargin crucial_margin(const MetricMeasureSpace& space, const IterationResult& step,
                             const ScalarField& g);

struct ObstacleInstance {
  ScalarField g;
  Index x = 0;
  Index y = 0;
  double tau = 0.0;
};

/// Runs iteration_step on every instance and returns the margins.
std::vector<CrucialMargin> crucial_inequality_check(const MetricMeasureSpace& space,
                                                    const IterationParams& params,
                                                    const std::vector<ObstacleInstance>& suite);

struct ScanRow {
  double q = 0.0;
  double C_PI = 0.0;
  std::size_t witness = 0;       // index into the pool
  double ratio_to_base = 0.0;    // C_PI(q) / C_PI(p)
  bool within_blowup = false;
  bool inside_formula_window = false;  // q >= p - epsilon bound
};

struct KZScan {
  double p = 2.0;
  double C = 1.0;
  double D = 1.0;
  double base = 0.0;  // C_PI(p)
  double blowup = 10.0;
  long double log2_epsilon_bound = 0.0L;
  double epsilon_bound = 0.0;
  double empirical_window = 0.0;  // p - smallest q such that every row at or above it is within the blow-up
  bool monotone = false;          // C_PI(q) nondecreasing as q decreases
  std::vector<ScanRow> rows;      // sorted by descending q
  std::vector<PIWitness> pool;
};

/// C_PI(q) for every q in the grid, over one shared pool of test functions
/// found at exponent p, so every row is a maximum over the same witnesses.
KZScan kz_empirical_scan(const MetricMeasureSpace& space, double p, double C,
                         std::vector<double> q_grid, const SearchConfig& config,
                         double blowup = 10.0);

}  // namespace mms
