#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "mms/connectivity.hpp"
#include "mms/curves.hpp"
#include "mms/poincare.hpp"
#include "mms/selfimprove.hpp"
#include "mms/space.hpp"
#include "mms/weights.hpp"

namespace mms {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

/// Space JSON: {"nodes": [id, ...], "edges": [[u, v, len], ...],
/// "measure": {id: weight}} plus an optional "metric" matrix (override metric).
/// Numbers may be JSON numbers or decimal strings.
/// Throws ParseError naming the line and the offending key.
MetricMeasureSpace parse_space_json(const std::string& text);
MetricMeasureSpace read_space_json(const std::string& path);
Json space_to_json(const MetricMeasureSpace& space);

/// Edge list "u,v,length" (header optional) and measure list "node,weight".
MetricMeasureSpace parse_space_csv(const std::string& edges, const std::string& measure);
MetricMeasureSpace read_space_csv(const std::string& edges_path, const std::string& measure_path);
std::string space_edges_csv(const MetricMeasureSpace& space);
std::string space_measure_csv(const MetricMeasureSpace& space);

/// Reads a space by extension: .json, or .csv with a sibling measure file
/// given explicitly.
MetricMeasureSpace read_space(const std::string& path, const std::string& measure_path = "");

/// Fields are maps node label -> value. Missing nodes are an error.
Json field_to_json(const MetricMeasureSpace& space, const ScalarField& f);
ScalarField field_from_json(const MetricMeasureSpace& space, const Json& j);

/// Paths are arrays of node labels.
Json path_to_json(const MetricMeasureSpace& space, const CurvePath& path);
CurvePath path_from_json(const MetricMeasureSpace& space, const Json& j);

Json profile_to_json(const MetricMeasureSpace& space, const AlphaProfile& profile);
/// Columns: tau, alpha, x, y, attained, exact, witness (index into the JSON rows).
std::string profile_to_csv(const MetricMeasureSpace& space, const AlphaProfile& profile);

Json report_to_json(const MetricMeasureSpace& space, const PIReport& report);
std::string report_to_csv(const PIReport& report);

Json scan_to_json(const KZScan& scan);
std::string scan_to_csv(const KZScan& scan);

Json iteration_to_json(const MetricMeasureSpace& space, const IterationResult& step);

WeightedLine parse_weighted_line_csv(const std::string& text);
std::string weighted_line_to_csv(const WeightedLine& line);

std::string read_text(const std::string& path);
/// Writes to a temporary file next to `path` and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace mms
