#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include <json.hpp>

namespace alphalab {

nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json to_json(const Eigen::MatrixXd& m);

// Report envelope shared by every subcommand:
// { schema_version, command, timestamp, config, result }.
// The timestamp is the only field allowed to differ between identical
// invocations.
nlohmann::json make_report(const std::string& command, nlohmann::json config,
                           nlohmann::json result);

std::string iso8601_utc_now();

// Validates a document against the subset of JSON Schema used by
// schemas/report.schema.json: type, properties, required, items, enum,
// const, anyOf and local $ref into $defs. Returns human-readable
// problems; empty means valid.
std::vector<std::string> validate_schema(const nlohmann::json& schema,
                                         const nlohmann::json& document);

} // namespace alphalab
