#include "mms/io.hpp"

#include <charconv>
#include <cmath>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "mms/maximal.hpp"

namespace mms {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_decimal(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

double number_at(const Json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    double v = 0.0;
    if (parse_decimal(j.get<std::string>(), v)) return v;
    parse_fail("key '" + key + "': '" + j.get<std::string>() + "' is not a decimal number");
  }
  parse_fail("key '" + key + "': expected a number or decimal string");
}

std::string id_at(const Json& j, const std::string& key) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  parse_fail("key '" + key + "': node ids must be strings or integers");
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

/// Rows of a CSV text with their 1-based line numbers; blank lines and
/// '#' comments are skipped, as is a header whose second cell is not numeric.
std::vector<std::pair<std::size_t, std::vector<std::string>>> csv_rows(const std::string& text,
                                                                       std::size_t numeric_col) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::stringstream ss(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto cells = split_csv_line(t);
    double ignored = 0.0;
    if (rows.empty() && cells.size() > numeric_col && !parse_decimal(cells[numeric_col], ignored))
      continue;
    rows.emplace_back(number, std::move(cells));
  }
  return rows;
}

Json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

Json obstacle_to_json(const MetricMeasureSpace& space, const ObstacleFunction& g) {
  Json j;
  j["x"] = space.label(g.x);
  j["y"] = space.label(g.y);
  j["tau"] = g.tau;
  j["attained"] = g.attained;
  j["values"] = field_to_json(space, g.values);
  return j;
}

Json header(const char* kind) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  return j;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

MetricMeasureSpace parse_space_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    parse_fail("line " + std::to_string(line_of(text, e.byte ? e.byte - 1 : 0)) + ": " + e.what());
  }
  if (!j.is_object()) parse_fail("top level must be an object");
  for (const char* key : {"nodes", "edges", "measure"})
    if (!j.contains(key)) parse_fail("missing key '" + std::string(key) + "'");
  const Json& nodes = j["nodes"];
  if (!nodes.is_array() || nodes.empty()) parse_fail("key 'nodes': expected a nonempty array");

  std::vector<std::string> labels;
  std::map<std::string, Index> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string id = id_at(nodes[i], "nodes[" + std::to_string(i) + "]");
    if (!index.emplace(id, static_cast<Index>(labels.size())).second)
      parse_fail("key 'nodes[" + std::to_string(i) + "]': duplicate id '" + id + "'");
    labels.push_back(id);
  }
  auto lookup = [&](const Json& v, const std::string& key) {
    const std::string id = id_at(v, key);
    auto it = index.find(id);
    if (it == index.end()) parse_fail("key '" + key + "': unknown node '" + id + "'");
    return it->second;
  };

  const Json& edges = j["edges"];
  if (!edges.is_array()) parse_fail("key 'edges': expected an array");
  std::vector<Edge> list;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string key = "edges[" + std::to_string(i) + "]";
    const Json& e = edges[i];
    if (!e.is_array() || e.size() != 3) parse_fail("key '" + key + "': expected [u, v, length]");
    list.push_back({lookup(e[0], key + "[0]"), lookup(e[1], key + "[1]"),
                    number_at(e[2], key + "[2]")});
  }

  const Json& measure = j["measure"];
  if (!measure.is_object()) parse_fail("key 'measure': expected an object");
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(labels.size()),
                                                 std::numeric_limits<double>::quiet_NaN());
  for (auto it = measure.begin(); it != measure.end(); ++it) {
    const std::string key = "measure." + it.key();
    auto found = index.find(it.key());
    if (found == index.end()) parse_fail("key '" + key + "': unknown node");
    mu[found->second] = number_at(it.value(), key);
  }
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (std::isnan(mu[static_cast<Eigen::Index>(i)]))
      parse_fail("key 'measure': no weight for node '" + labels[i] + "'");
  MetricMeasureSpace space = build_space(std::move(list), std::move(mu), std::move(labels));
  if (j.contains("metric")) {
    const Json& m = j["metric"];
    const auto n = static_cast<std::size_t>(space.size());
    if (!m.is_array() || m.size() != n) parse_fail("key 'metric': expected an n x n array");
    Eigen::MatrixXd metric(space.size(), space.size());
    for (std::size_t a = 0; a < n; ++a) {
      if (!m[a].is_array() || m[a].size() != n)
        parse_fail("key 'metric[" + std::to_string(a) + "]': expected " + std::to_string(n) + " entries");
      for (std::size_t b = 0; b < n; ++b)
        metric(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            number_at(m[a][b], "metric[" + std::to_string(a) + "][" + std::to_string(b) + "]");
    }
    space = space.with_override_metric(std::move(metric));
  }
  return space;
}

MetricMeasureSpace read_space_json(const std::string& path) {
  return parse_space_json(read_text(path));
}

Json space_to_json(const MetricMeasureSpace& space) {
  Json j;
  j["nodes"] = space.labels();
  Json edges = Json::array();
  for (const auto& e : space.edges())
    edges.push_back({space.label(e.u), space.label(e.v), e.length});
  j["edges"] = std::move(edges);
  Json measure = Json::object();
  for (Index i = 0; i < space.size(); ++i) measure[space.label(i)] = space.measure()[i];
  j["measure"] = std::move(measure);
  if (const auto& m = space.override_metric()) {
    Json rows = Json::array();
    for (Eigen::Index a = 0; a < m->rows(); ++a) {
      Json row = Json::array();
      for (Eigen::Index b = 0; b < m->cols(); ++b) row.push_back((*m)(a, b));
      rows.push_back(std::move(row));
    }
    j["metric"] = std::move(rows);
  }
  return j;
}

MetricMeasureSpace parse_space_csv(const std::string& edges, const std::string& measure) {
  std::vector<std::string> labels;
  std::map<std::string, Index> index;
  std::vector<double> weights;
  for (const auto& [line, cells] : csv_rows(measure, 1)) {
    if (cells.size() != 2) parse_fail("measure line " + std::to_string(line) + ": expected node,weight");
    if (index.count(cells[0]))
      parse_fail("measure line " + std::to_string(line) + ": duplicate node '" + cells[0] + "'");
    double w = 0.0;
    if (!parse_decimal(cells[1], w))
      parse_fail("measure line " + std::to_string(line) + ": bad weight '" + cells[1] + "'");
    index.emplace(cells[0], static_cast<Index>(labels.size()));
    labels.push_back(cells[0]);
    weights.push_back(w);
  }
  if (labels.empty()) parse_fail("measure file lists no nodes");
  std::vector<Edge> list;
  for (const auto& [line, cells] : csv_rows(edges, 2)) {
    const std::string where = "edges line " + std::to_string(line);
    if (cells.size() != 3) parse_fail(where + ": expected u,v,length");
    auto u = index.find(cells[0]);
    auto v = index.find(cells[1]);
    if (u == index.end()) parse_fail(where + ": unknown node '" + cells[0] + "'");
    if (v == index.end()) parse_fail(where + ": unknown node '" + cells[1] + "'");
    double len = 0.0;
    if (!parse_decimal(cells[2], len)) parse_fail(where + ": bad length '" + cells[2] + "'");
    list.push_back({u->second, v->second, len});
  }
  return build_space(std::move(list),
                     Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size())),
                     std::move(labels));
}

MetricMeasureSpace read_space_csv(const std::string& edges_path, const std::string& measure_path) {
  return parse_space_csv(read_text(edges_path), read_text(measure_path));
}

std::string space_edges_csv(const MetricMeasureSpace& space) {
  std::string out = "u,v,length\n";
  for (const auto& e : space.edges())
    out += space.label(e.u) + "," + space.label(e.v) + "," + format_number(e.length) + "\n";
  return out;
}

std::string space_measure_csv(const MetricMeasureSpace& space) {
  std::string out = "node,weight\n";
  for (Index i = 0; i < space.size(); ++i)
    out += space.label(i) + "," + format_number(space.measure()[i]) + "\n";
  return out;
}

MetricMeasureSpace read_space(const std::string& path, const std::string& measure_path) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".csv") {
    if (measure_path.empty()) throw Error(ErrorCode::InvalidInput, "CSV spaces need a measure file");
    return read_space_csv(path, measure_path);
  }
  return read_space_json(path);
}

Json field_to_json(const MetricMeasureSpace& space, const ScalarField& f) {
  detail::require_size(space, f);
  Json j = Json::object();
  for (Index i = 0; i < space.size(); ++i) j[space.label(i)] = number_or_null(f[i]);
  return j;
}

ScalarField field_from_json(const MetricMeasureSpace& space, const Json& j) {
  if (!j.is_object()) parse_fail("field: expected an object mapping node ids to values");
  ScalarField f = ScalarField::Constant(space.size(), std::numeric_limits<double>::quiet_NaN());
  for (auto it = j.begin(); it != j.end(); ++it) {
    Index i = 0;
    try {
      i = space.index_of(it.key());
    } catch (const Error&) {
      parse_fail("field key '" + it.key() + "': unknown node");
    }
    f[i] = number_at(it.value(), it.key());
  }
  for (Index i = 0; i < space.size(); ++i)
    if (std::isnan(f[i])) parse_fail("field: no value for node '" + space.label(i) + "'");
  return f;
}

Json path_to_json(const MetricMeasureSpace& space, const CurvePath& path) {
  Json j = Json::array();
  for (Index v : path.nodes) j.push_back(space.label(v));
  return j;
}

CurvePath path_from_json(const MetricMeasureSpace& space, const Json& j) {
  if (!j.is_array()) parse_fail("path: expected an array of node ids");
  std::vector<Index> nodes;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string id = id_at(j[i], "path[" + std::to_string(i) + "]");
    try {
      nodes.push_back(space.index_of(id));
    } catch (const Error&) {
      parse_fail("key 'path[" + std::to_string(i) + "]': unknown node '" + id + "'");
    }
  }
  return make_path(space, std::move(nodes));
}

Json profile_to_json(const MetricMeasureSpace& space, const AlphaProfile& profile) {
  Json j = header("alpha_profile");
  j["seed"] = profile.seed;
  j["p"] = profile.p;
  j["C"] = profile.C;
  j["r_max"] = profile.r_max ? Json(*profile.r_max) : Json(nullptr);
  j["C_A"] = ap_connectivity_constant(profile);
  Json rows = Json::array();
  for (const auto& row : profile.rows) {
    Json r;
    r["tau"] = row.tau;
    r["alpha"] = row.alpha;
    r["exact_indicators"] = row.exact_indicators;
    r["witness"] = obstacle_to_json(space, row.witness);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

std::string profile_to_csv(const MetricMeasureSpace& space, const AlphaProfile& profile) {
  std::string out = "# schema_version=" + std::to_string(kSchemaVersion) +
                    " seed=" + std::to_string(profile.seed) + " p=" + format_number(profile.p) +
                    " C=" + format_number(profile.C) + "\n";
  out += "tau,alpha,x,y,attained,exact,witness\n";
  for (std::size_t i = 0; i < profile.rows.size(); ++i) {
    const auto& row = profile.rows[i];
    out += format_number(row.tau) + "," + format_number(row.alpha) + "," +
           space.label(row.witness.x) + "," + space.label(row.witness.y) + "," +
           format_number(row.witness.attained) + "," + (row.exact_indicators ? "1" : "0") + "," +
           std::to_string(i) + "\n";
  }
  return out;
}

Json report_to_json(const MetricMeasureSpace& space, const PIReport& report) {
  Json j = header("pi_report");
  j["seed"] = report.seed;
  j["p"] = report.p;
  j["C"] = report.C;
  j["r_max"] = report.r_max ? Json(*report.r_max) : Json(nullptr);
  j["doubling"] = report.doubling;
  j["quasiconvexity"] = report.quasiconvexity;

  Json pi;
  pi["value"] = report.pi.value;
  pi["center"] = space.label(report.pi.witness.center);
  pi["radius"] = report.pi.witness.radius;
  pi["family"] = report.pi.witness.family;
  pi["f"] = field_to_json(space, report.pi.witness.f);
  j["C_PI"] = std::move(pi);

  Json ppi;
  ppi["value"] = number_or_null(report.C_PPI);
  ppi["x"] = space.label(report.ppi_witness.x);
  ppi["y"] = space.label(report.ppi_witness.y);
  ppi["family"] = report.ppi_witness.family;
  if (report.ppi_witness.f.size() == space.size()) {
    ppi["f"] = field_to_json(space, report.ppi_witness.f);
    ppi["g"] = field_to_json(space, report.ppi_witness.g);
  }
  j["C_PPI"] = std::move(ppi);

  Json ap;
  ap["established"] = report.ap_established;
  if (!report.ap_note.empty()) ap["note"] = report.ap_note;
  if (report.ap_established) {
    ap["value"] = report.C_A;
    ap["profile"] = profile_to_json(space, report.alpha);
  }
  j["C_A"] = std::move(ap);

  Json checks;
  checks["ptpi_from_ap"] = {{"margin", report.margin_ptpi_from_ap}, {"ok", report.ptpi_from_ap_ok}};
  Json paths = Json::array();
  for (const auto& c : report.path_checks)
    paths.push_back({{"x", space.label(c.x)},
                     {"y", space.label(c.y)},
                     {"tau", c.tau},
                     {"maximal_sum", c.maximal_sum},
                     {"length_ratio", c.length_ratio},
                     {"cost_ratio", c.cost_ratio},
                     {"length_ok", c.length_ok},
                     {"cost_ok", c.cost_ok}});
  checks["ap_from_ptpi"] = {{"margin_length", number_or_null(report.margin_length)},
                            {"margin_cost", number_or_null(report.margin_cost)},
                            {"ok", report.ap_from_ptpi_ok},
                            {"paths", std::move(paths)}};
  j["checks"] = std::move(checks);
  return j;
}

std::string report_to_csv(const PIReport& report) {
  std::string out = "# schema_version=" + std::to_string(kSchemaVersion) +
                    " seed=" + std::to_string(report.seed) + "\n";
  out += "p,C,doubling,quasiconvexity,C_PI,C_PPI,C_A,ptpi_from_ap_ok,ap_from_ptpi_ok\n";
  out += format_number(report.p) + "," + format_number(report.C) + "," +
         format_number(report.doubling) + "," + format_number(report.quasiconvexity) + "," +
         format_number(report.pi.value) + "," + format_number(report.C_PPI) + "," +
         (report.ap_established ? format_number(report.C_A) : std::string("")) + "," +
         (report.ptpi_from_ap_ok ? "1" : "0") + "," + (report.ap_from_ptpi_ok ? "1" : "0") + "\n";
  return out;
}

Json scan_to_json(const KZScan& scan) {
  Json j = header("kz_scan");
  j["p"] = scan.p;
  j["C"] = scan.C;
  j["doubling"] = scan.D;
  j["C_PI"] = scan.base;
  j["blowup"] = scan.blowup;
  j["log2_epsilon_bound"] = static_cast<double>(scan.log2_epsilon_bound);
  j["epsilon_bound"] = scan.epsilon_bound;
  j["empirical_window"] = scan.empirical_window;
  j["monotone"] = scan.monotone;
  Json rows = Json::array();
  for (const auto& r : scan.rows)
    rows.push_back({{"q", r.q},
                    {"C_PI", r.C_PI},
                    {"witness", r.witness},
                    {"family", r.witness < scan.pool.size() ? scan.pool[r.witness].family : ""},
                    {"ratio_to_base", r.ratio_to_base},
                    {"within_blowup", r.within_blowup},
                    {"inside_formula_window", r.inside_formula_window}});
  j["rows"] = std::move(rows);
  return j;
}

std::string scan_to_csv(const KZScan& scan) {
  std::string out = "# schema_version=" + std::to_string(kSchemaVersion) + " p=" +
                    format_number(scan.p) + " C=" + format_number(scan.C) + "\n";
  out += "q,C_PI,witness,family,ratio_to_base,within_blowup,inside_formula_window\n";
  for (const auto& r : scan.rows)
    out += format_number(r.q) + "," + format_number(r.C_PI) + "," + std::to_string(r.witness) +
           "," + (r.witness < scan.pool.size() ? scan.pool[r.witness].family : "") + "," +
           format_number(r.ratio_to_base) + "," + (r.within_blowup ? "1" : "0") + "," +
           (r.inside_formula_window ? "1" : "0") + "\n";
  return out;
}

Json iteration_to_json(const MetricMeasureSpace& space, const IterationResult& step) {
  Json j = header("iteration_trace");
  const auto& prm = step.params;
  j["params"] = {{"p", prm.p},     {"q", prm.q}, {"M", prm.M},     {"delta", prm.delta},
                 {"k", prm.k},     {"C", prm.C}, {"L", prm.L},     {"S", number_or_null(prm.S)},
                 {"C_A", prm.C_A}, {"D", prm.D}, {"window", prm.window}};
  const auto& dec = step.decomposition;
  j["x"] = space.label(dec.x);
  j["y"] = space.label(dec.y);
  j["r"] = dec.r;
  j["tau"] = step.tau;
  j["maximal"] = field_to_json(space, dec.maximal);
  Json levels = Json::array();
  for (const auto& E : dec.E) {
    Json members = Json::array();
    for (Index z = 0; z < space.size(); ++z)
      if (E[z]) members.push_back(space.label(z));
    levels.push_back(std::move(members));
  }
  j["levels"] = std::move(levels);
  j["h"] = field_to_json(space, dec.h);
  j["h_bound"] = number_or_null(dec.h_bound);
  j["gamma"] = path_to_json(space, step.gamma);
  j["i0"] = step.selection.i0;
  j["level_integrals"] = step.selection.level_integrals;
  Json gaps = Json::array();
  for (const auto& g : step.gaps)
    gaps.push_back({{"a", space.label(g.a)},
                    {"b", space.label(g.b)},
                    {"traversed", g.traversed},
                    {"d", g.d},
                    {"endpoint_sum", g.endpoint_sum},
                    {"replacement", path_to_json(space, g.replacement)},
                    {"replacement_cost", g.replacement_cost},
                    {"realized_alpha", g.realized_alpha}});
  j["gaps"] = std::move(gaps);
  j["improved"] = path_to_json(space, step.improved);
  j["kept_integral"] = step.kept_integral;
  j["improved_integral"] = step.improved_integral;
  Json links = Json::array();
  for (const auto& l : step.links)
    links.push_back({{"name", l.name},
                     {"applicable", l.applicable},
                     {"holds", l.holds},
                     {"lhs", number_or_null(l.lhs)},
                     {"rhs", number_or_null(l.rhs)}});
  j["links"] = std::move(links);
  j["all_hold"] = step.all_hold();
  if (!step.children.empty()) {
    Json children = Json::array();
    for (const auto& c : step.children) children.push_back(iteration_to_json(space, c));
    j["children"] = std::move(children);
  }
  return j;
}

WeightedLine parse_weighted_line_csv(const std::string& text) {
  std::vector<double> pos, lam, om;
  for (const auto& [line, cells] : csv_rows(text, 0)) {
    const std::string where = "line " + std::to_string(line);
    if (cells.size() != 3) parse_fail(where + ": expected position,lambda,omega");
    double v[3];
    for (int c = 0; c < 3; ++c)
      if (!parse_decimal(cells[c], v[c])) parse_fail(where + ": bad number '" + cells[c] + "'");
    pos.push_back(v[0]);
    lam.push_back(v[1]);
    om.push_back(v[2]);
  }
  WeightedLine out;
  const auto n = static_cast<Eigen::Index>(pos.size());
  out.positions = Eigen::Map<Eigen::VectorXd>(pos.data(), n);
  out.lambda = Eigen::Map<Eigen::VectorXd>(lam.data(), n);
  out.omega = Eigen::Map<Eigen::VectorXd>(om.data(), n);
  validate(out);
  return out;
}

std::string weighted_line_to_csv(const WeightedLine& line) {
  std::string out = "position,lambda,omega\n";
  for (int i = 0; i < line.size(); ++i)
    out += format_number(line.positions[i]) + "," + format_number(line.lambda[i]) + "," +
           format_number(line.omega[i]) + "\n";
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::InvalidInput, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorCode::InvalidInput, "cannot rename into '" + path + "': " + ec.message());
  }
}

}  // namespace mms
