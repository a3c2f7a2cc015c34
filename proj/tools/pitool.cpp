// pitool: command-line front end for the mms library.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mms/connectivity.hpp"
#include "mms/curves.hpp"
#include "mms/gallery.hpp"
#include "mms/io.hpp"
#include "mms/maximal.hpp"
#include "mms/poincare.hpp"
#include "mms/selfimprove.hpp"
#include "mms/space.hpp"

using namespace mms;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitProperty = 3;
constexpr int kExitInfeasible = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoFeasiblePath:
    case ErrorCode::GapInfeasible:
    case ErrorCode::NoPathBound:
    case ErrorCode::WindowViolated:
      return kExitInfeasible;
    case ErrorCode::DegenerateDenominator:
      return kExitProperty;
    default:
      return kExitValidation;
  }
}

struct Common {
  std::string space;
  std::string measure;
  double p = 2.0;
  double C = 1.0;
  std::optional<double> r_max;
  std::uint64_t seed = 1;
  std::string format = "json";
  int oracle_cap = 10;
  std::string out;
};

void add_space(CLI::App* cmd, Common& c) {
  cmd->add_option("--space", c.space, "space file (.json, or .csv edge list)")->required();
  cmd->add_option("--measure", c.measure, "measure CSV for a .csv edge list");
}

void add_search(CLI::App* cmd, Common& c) {
  cmd->add_option("--p", c.p, "exponent")->capture_default_str();
  cmd->add_option("--c", c.C, "ball dilation / path budget factor")->capture_default_str();
  cmd->add_option("--r-max", c.r_max, "scale cap r_0");
  cmd->add_option("--seed", c.seed, "seed for randomized searches")->capture_default_str();
  cmd->add_option("--oracle-cap", c.oracle_cap, "largest region searched exhaustively")
      ->capture_default_str();
}

void add_output(CLI::App* cmd, Common& c, bool csv) {
  if (csv)
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
  cmd->add_option("--out", c.out, "output file (stdout when omitted)");
}

SearchConfig config_of(const Common& c) {
  SearchConfig cfg;
  cfg.seed = c.seed;
  cfg.r_max = c.r_max;
  cfg.oracle_cap = c.oracle_cap;
  return cfg;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    write_atomic(c.out, text);
  }
}

std::vector<double> default_tau_grid() { return {0.05, 0.1, 0.2, 0.4, 0.8}; }

int cmd_analyze(const Common& c, std::vector<double> tau_grid) {
  const auto space = read_space(c.space, c.measure);
  if (tau_grid.empty()) tau_grid = default_tau_grid();
  const PIReport rep = characterization_consistency(space, c.p, c.C, tau_grid, config_of(c));
  emit(c, c.format == "csv" ? report_to_csv(rep) : report_to_json(space, rep).dump(2));
  if (!rep.ap_established) return kExitInfeasible;
  return rep.ptpi_from_ap_ok && rep.ap_from_ptpi_ok ? kExitOk : kExitProperty;
}

int cmd_alpha(const Common& c, std::vector<double> tau_grid) {
  const auto space = read_space(c.space, c.measure);
  if (tau_grid.empty()) tau_grid = default_tau_grid();
  const AlphaProfile prof = alpha_profile(space, c.p, c.C, tau_grid, config_of(c));
  emit(c, c.format == "csv" ? profile_to_csv(space, prof) : profile_to_json(space, prof).dump(2));
  return kExitOk;
}

int cmd_verify_kz(const Common& c, std::vector<double> q_grid, std::optional<double> c_a,
                  double blowup) {
  if (!(c.p > 1.0)) throw Error(ErrorCode::InvalidExponent, "verify-kz needs p > 1");
  const auto space = read_space(c.space, c.measure);
  if (q_grid.empty())
    for (int i = 0; i <= 10; ++i) q_grid.push_back(c.p - (c.p - 1.0) * 0.05 * i);
  const KZScan scan = kz_empirical_scan(space, c.p, c.C, q_grid, config_of(c), blowup);

  const double ratio13 = scan.base > 0 ? kz_large_p_ratio(scan.D, 1e6, scan.base, 13) : 0.0;
  const double ratio12 = scan.base > 0 ? kz_large_p_ratio(scan.D, 1e6, scan.base, 12) : 0.0;
  const std::string note =
      "the asymptotic form with 2^12 disagrees with the displayed bound by a factor 2: "
      "at p = 1e6 eps*2^13*C_PI*D^3/p = " + format_number(ratio13) +
      " while eps*2^12*C_PI*D^3/p = " + format_number(ratio12);
  std::optional<long double> log2_ca;
  if (c_a) log2_ca = kz_log2_epsilon_from_CA(scan.D, c.p, *c_a);

  if (c.format == "csv") {
    std::string text = scan_to_csv(scan);
    text += "# epsilon_bound log2=" + format_number(static_cast<double>(scan.log2_epsilon_bound)) + "\n";
    if (log2_ca) text += "# epsilon_from_CA log2=" + format_number(static_cast<double>(*log2_ca)) + "\n";
    text += "# note: " + note + "\n";
    emit(c, text);
  } else {
    Json j = scan_to_json(scan);
    if (log2_ca) {
      j["C_A"] = *c_a;
      j["log2_epsilon_from_CA"] = static_cast<double>(*log2_ca);
      j["epsilon_from_CA"] = static_cast<double>(std::exp2(*log2_ca));
    }
    j["seed"] = c.seed;
    j["large_p_ratio_2_13"] = ratio13;
    j["large_p_ratio_2_12"] = ratio12;
    j["note"] = note;
    emit(c, j.dump(2));
  }
  bool ok = scan.monotone;
  for (const auto& row : scan.rows)
    if (row.inside_formula_window && !row.within_blowup) ok = false;
  return ok ? kExitOk : kExitProperty;
}

struct IterateArgs {
  std::string obstacle;
  std::string x, y;
  std::optional<double> tau;
  std::optional<double> q;
  std::optional<std::int64_t> k;
  double M = 2.0;
  double delta = 0.5;
  std::optional<double> c_a;
  int depth = 1;
};

int cmd_iterate(const Common& c, const IterateArgs& a) {
  const auto space = read_space(c.space, c.measure);
  const Json doc = Json::parse(read_text(a.obstacle), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::ParseError, "obstacle file is not valid JSON");
  const bool wrapped = doc.contains("values");
  const ScalarField g = field_from_json(space, wrapped ? doc["values"] : doc);
  auto pick = [&](const std::string& flag, const char* key) -> std::string {
    if (!flag.empty()) return flag;
    if (wrapped && doc.contains(key)) {
      const Json& v = doc[key];
      return v.is_string() ? v.get<std::string>() : v.dump();
    }
    throw Error(ErrorCode::InvalidInput, std::string("missing --") + key);
  };
  const Index x = space.index_of(pick(a.x, "x"));
  const Index y = space.index_of(pick(a.y, "y"));
  double tau = 0.0;
  if (a.tau) tau = *a.tau;
  else if (wrapped && doc.contains("tau")) tau = doc["tau"].get<double>();
  else throw Error(ErrorCode::InvalidInput, "missing --tau");

  const double q = a.q.value_or(c.p);
  const double D = doubling_constant(space, c.r_max);
  double C_A = 0.0;
  if (a.c_a) {
    C_A = *a.c_a;
  } else {
    C_A = ap_connectivity_constant(space, c.p, c.C, default_tau_grid(), config_of(c));
    if (!(C_A > 0.0)) C_A = 1.0;
  }
  const IterationParams params =
      a.k ? explicit_params(c.p, q, a.delta, a.M, *a.k, C_A, D, c.C)
          : default_params(c.p, q, a.delta, a.M, C_A, D, c.C);
  const IterationResult step = iteration_step(space, g, x, y, tau, params, a.depth);
  Json j = iteration_to_json(space, step);
  j["seed"] = c.seed;
  const CrucialMargin cm = crucial_margin(space, step, g);
  j["crucial"] = {{"applicable", cm.applicable}, {"lhs", cm.lhs}, {"rhs", cm.rhs}, {"margin", cm.margin}};
  emit(c, j.dump(2));
  const bool ok = step.all_hold() && (!cm.applicable || cm.margin >= 0.0);
  return ok ? kExitOk : kExitProperty;
}

// Brute-force cross-checks of the solvers on small spaces.
int cmd_oracle(const Common& c, const std::string& mode) {
  const auto space = read_space(c.space, c.measure);
  const Index n = space.size();
  if (n > c.oracle_cap)
    throw Error(ErrorCode::TooLarge, std::to_string(n) + " nodes exceed the oracle cap " +
                                         std::to_string(c.oracle_cap));
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "oracle";
  j["mode"] = mode;
  j["seed"] = c.seed;
  long checks = 0, mismatches = 0;
  Json bad = Json::array();

  if (mode == "paths") {
    for (Index x = 0; x < n; ++x)
      for (Index y = x + 1; y < n; ++y)
        for (double factor : {1.0, 1.25, 1.5}) {
          ScalarField g(n);
          for (Index i = 0; i < n; ++i) g[i] = unit(rng);
          const double budget = factor * space.dist(x, y);
          const double solver = curve_integral(min_obstruction_path(space, x, y, g, budget), g);
          const auto all = enumerate_paths_oracle(space, x, y, budget, c.oracle_cap, &g);
          const double brute = curve_integral(all.front(), g);
          ++checks;
          if (solver != brute) {
            ++mismatches;
            bad.push_back({{"x", space.label(x)}, {"y", space.label(y)}, {"budget", budget},
                           {"solver", solver}, {"oracle", brute}});
          }
        }
  } else if (mode == "maximal") {
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      ScalarField f(n);
      for (Index i = 0; i < n; ++i) f[i] = unit(rng);
      const double s = unit(rng) * space.diameter() + 1e-3;
      for (Index x = 0; x < n; ++x) {
        double best = std::pow(f[x], p);
        for (Index z = 0; z < n; ++z) {
          const double r = space.dist(x, z);
          if (r > s) continue;
          double mass = 0.0, sum = 0.0;
          for (Index w = 0; w < n; ++w)
            if (space.dist(x, w) <= r) {
              mass += space.measure()[w];
              sum += space.measure()[w] * std::pow(f[w], p);
            }
          best = std::max(best, sum / mass);
        }
        const double solver = maximal_power_at(space, f, p, s, x);
        ++checks;
        if (std::abs(solver - best) > 1e-12 * std::max(1.0, best)) {
          ++mismatches;
          bad.push_back({{"x", space.label(x)}, {"p", p}, {"s", s}, {"solver", solver}, {"oracle", best}});
        }
      }
    }
  } else if (mode == "doubling") {
    double brute = 1.0;
    for (Index x = 0; x < n; ++x)
      for (Index z = 0; z < n; ++z) {
        for (double r : {space.dist(x, z), space.dist(x, z) / 2.0}) {
          if (!(r > 0.0) || (c.r_max && !(r < *c.r_max))) continue;
          double small = 0.0, big = 0.0;
          for (Index w = 0; w < n; ++w) {
            if (space.dist(x, w) <= r) small += space.measure()[w];
            if (space.dist(x, w) <= 2.0 * r) big += space.measure()[w];
          }
          brute = std::max(brute, big / small);
        }
      }
    const double solver = doubling_constant(space, c.r_max);
    ++checks;
    if (std::abs(solver - brute) > 1e-12 * brute) {
      ++mismatches;
      bad.push_back({{"solver", solver}, {"oracle", brute}});
    }
    j["doubling"] = solver;
  } else {
    throw Error(ErrorCode::InvalidInput, "unknown oracle mode '" + mode + "'");
  }
  j["checks"] = checks;
  j["mismatches"] = mismatches;
  j["details"] = std::move(bad);
  emit(c, j.dump(2));
  return mismatches == 0 ? kExitOk : kExitProperty;
}

struct GenArgs {
  int width = 9, height = 9, n = 9, extra = 3;
  double edge_len = 1.0, measure = 1.0;
  double short_len = 2.0, long_len = 4.0;
  int subdivisions = 1;
  double exponent = 0.5;
  double a = 0.5;
  std::string base;
};

int cmd_gen(const Common& c, const std::string& kind, const GenArgs& g) {
  if (kind == "line" && c.format == "csv") {
    emit(c, weighted_line_to_csv(make_power_weight_line(g.n, g.a)));
    return kExitOk;
  }
  MetricMeasureSpace space;
  if (kind == "grid") space = make_grid(g.width, g.height, g.edge_len, g.measure);
  else if (kind == "path") space = make_path_graph(g.n, g.edge_len, g.measure);
  else if (kind == "complete") space = make_complete(g.n, g.edge_len, g.measure);
  else if (kind == "theta") space = make_theta(g.short_len, g.long_len, g.subdivisions, g.measure);
  else if (kind == "random") space = make_random_connected(g.n, g.extra, c.seed);
  else if (kind == "line") space = line_space(make_power_weight_line(g.n, g.a));
  else if (kind == "snowflake") {
    if (g.base.empty()) throw Error(ErrorCode::InvalidInput, "snowflake needs --base");
    space = snowflake_view(read_space(g.base, c.measure), g.exponent);
  } else {
    throw Error(ErrorCode::InvalidInput, "unknown generator '" + kind + "'");
  }
  if (c.format == "csv") {
    // The measure goes to a sibling file: out.csv -> out.measure.csv.
    if (c.out.empty()) throw Error(ErrorCode::InvalidInput, "csv output needs --out");
    emit(c, space_edges_csv(space));
    std::filesystem::path m(c.out);
    m.replace_extension(".measure.csv");
    write_atomic(m.string(), space_measure_csv(space));
  } else {
    emit(c, space_to_json(space).dump(2));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poincare, maximal function and A_p connectivity workbench"};
  app.require_subcommand(1);
  Common common;

  std::vector<double> tau_grid, q_grid;
  auto* analyze = app.add_subcommand("analyze", "doubling, C_PI, C_PPI, C_A and their consistency");
  add_space(analyze, common);
  add_search(analyze, common);
  analyze->add_option("--tau-grid", tau_grid, "levels tau in [0, 1]")->delimiter(',');
  add_output(analyze, common, true);

  auto* alpha = app.add_subcommand("alpha", "alpha profile over a tau grid");
  add_space(alpha, common);
  add_search(alpha, common);
  alpha->add_option("--tau-grid", tau_grid, "levels tau in [0, 1]")->delimiter(',');
  add_output(alpha, common, true);

  std::optional<double> kz_ca;
  double blowup = 10.0;
  auto* kz = app.add_subcommand("verify-kz", "C_PI(q) over a q grid against the epsilon bound");
  add_space(kz, common);
  add_search(kz, common);
  kz->add_option("--q-grid", q_grid, "exponents q in (1, p]")->delimiter(',');
  kz->add_option("--c-a", kz_ca, "A_p connectivity constant for the second epsilon formula");
  kz->add_option("--blowup", blowup, "allowed factor over C_PI(p)")->capture_default_str();
  add_output(kz, common, true);

  IterateArgs it;
  auto* iterate = app.add_subcommand("iterate", "one gap-replacement round with certificates");
  add_space(iterate, common);
  add_search(iterate, common);
  iterate->add_option("--obstacle", it.obstacle, "obstacle JSON (field map, or {x, y, tau, values})")
      ->required();
  iterate->add_option("--x", it.x, "start node");
  iterate->add_option("--y", it.y, "end node");
  iterate->add_option("--tau", it.tau, "level tau");
  iterate->add_option("--q", it.q, "lower exponent (defaults to p)");
  iterate->add_option("--k", it.k, "number of levels (default from the parameter formula)");
  iterate->add_option("--M", it.M, "level ratio")->capture_default_str();
  iterate->add_option("--delta", it.delta, "gap budget fraction")->capture_default_str();
  iterate->add_option("--c-a", it.c_a, "A_p connectivity constant (estimated when omitted)");
  iterate->add_option("--depth", it.depth, "replacement rounds")->capture_default_str();
  add_output(iterate, common, false);

  std::string mode = "paths";
  auto* oracle = app.add_subcommand("oracle", "solver against brute force on a small space");
  add_space(oracle, common);
  oracle->add_option("--mode", mode, "paths, maximal or doubling")
      ->check(CLI::IsMember({"paths", "maximal", "doubling"}))
      ->capture_default_str();
  oracle->add_option("--seed", common.seed, "seed for random fields")->capture_default_str();
  oracle->add_option("--oracle-cap", common.oracle_cap, "largest space accepted")->capture_default_str();
  oracle->add_option("--r-max", common.r_max, "scale cap for doubling");
  add_output(oracle, common, false);

  std::string kind;
  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "write a gallery space");
  gen->add_option("kind", kind, "grid, line, theta, snowflake, path, complete or random")
      ->required()
      ->check(CLI::IsMember({"grid", "line", "theta", "snowflake", "path", "complete", "random"}));
  gen->add_option("--width", gen_args.width)->capture_default_str();
  gen->add_option("--height", gen_args.height)->capture_default_str();
  gen->add_option("--n", gen_args.n, "node or cell count")->capture_default_str();
  gen->add_option("--extra", gen_args.extra, "extra random edges")->capture_default_str();
  gen->add_option("--edge-len", gen_args.edge_len)->capture_default_str();
  gen->add_option("--node-measure", gen_args.measure)->capture_default_str();
  gen->add_option("--short", gen_args.short_len, "theta short arc")->capture_default_str();
  gen->add_option("--long", gen_args.long_len, "theta long arc")->capture_default_str();
  gen->add_option("--subdivisions", gen_args.subdivisions)->capture_default_str();
  gen->add_option("--exponent", gen_args.exponent, "snowflake exponent")->capture_default_str();
  gen->add_option("--a", gen_args.a, "power weight exponent for line")->capture_default_str();
  gen->add_option("--base", gen_args.base, "base space for snowflake");
  gen->add_option("--measure", common.measure, "measure CSV for a .csv base");
  gen->add_option("--seed", common.seed)->capture_default_str();
  add_output(gen, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*analyze) return cmd_analyze(common, tau_grid);
    if (*alpha) return cmd_alpha(common, tau_grid);
    if (*kz) return cmd_verify_kz(common, q_grid, kz_ca, blowup);
    if (*iterate) return cmd_iterate(common, it);
    if (*oracle) return cmd_oracle(common, mode);
    if (*gen) return cmd_gen(common, kind, gen_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
