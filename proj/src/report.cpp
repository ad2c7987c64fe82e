#include "alphalab/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>

namespace alphalab {

using nlohmann::json;

json to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double x = v(i);
        arr.push_back(std::isfinite(x) ? json(x) : json());
    }
    return arr;
}

json to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json make_report(const std::string& command, json config, json result) {
    json report;
    report["schema_version"] = 1;
    report["command"] = command;
    report["timestamp"] = iso8601_utc_now();
    report["config"] = std::move(config);
    report["result"] = std::move(result);
    return report;
}

namespace {

bool type_matches(const std::string& type, const json& value) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    return false;
}

const json* resolve_ref(const json& root, const std::string& ref) {
    if (ref.rfind("#/", 0) != 0) return nullptr;
    const json* node = &root;
    std::size_t pos = 2;
    while (pos < ref.size()) {
        const std::size_t next = ref.find('/', pos);
        const std::string key = ref.substr(pos, next == std::string::npos ? next : next - pos);
        if (!node->is_object() || !node->contains(key)) return nullptr;
        node = &(*node)[key];
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return node;
}

void validate_node(const json& root, const json& schema, const json& value,
                   const std::string& where, std::vector<std::string>& problems) {
    if (schema.contains("$ref")) {
        const json* target = resolve_ref(root, schema["$ref"].get<std::string>());
        if (!target) {
            problems.push_back(where + ": unresolvable $ref " +
                               schema["$ref"].get<std::string>());
            return;
        }
        validate_node(root, *target, value, where, problems);
        return;
    }

    if (schema.contains("anyOf")) {
        bool matched = false;
        for (const auto& option : schema["anyOf"]) {
            std::vector<std::string> sub;
            validate_node(root, option, value, where, sub);
            if (sub.empty()) {
                matched = true;
                break;
            }
        }
        if (!matched) problems.push_back(where + ": no anyOf branch matched");
    }

    if (schema.contains("const") && value != schema["const"]) {
        problems.push_back(where + ": expected const " + schema["const"].dump() + ", got " +
                           value.dump());
        return;
    }

    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& candidate : schema["enum"])
            if (candidate == value) found = true;
        if (!found) {
            problems.push_back(where + ": value " + value.dump() + " not in enum");
            return;
        }
    }

    if (schema.contains("type")) {
        const auto& t = schema["type"];
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(t.get<std::string>(), value);
        } else if (t.is_array()) {
            for (const auto& alt : t)
                if (type_matches(alt.get<std::string>(), value)) ok = true;
        }
        if (!ok) {
            problems.push_back(where + ": type mismatch, expected " + t.dump() + ", got " +
                               std::string(value.type_name()));
            return;
        }
    }

    if (value.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema["required"])
                if (!value.contains(key.get<std::string>()))
                    problems.push_back(where + ": missing required field '" +
                                       key.get<std::string>() + "'");
        if (schema.contains("properties"))
            for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it)
                if (value.contains(it.key()))
                    validate_node(root, it.value(), value[it.key()], where + "/" + it.key(),
                                  problems);
    }

    if (value.is_array() && schema.contains("items")) {
        for (std::size_t i = 0; i < value.size(); ++i)
            validate_node(root, schema["items"], value[i], where + "[" + std::to_string(i) + "]",
                          problems);
    }
}

} // namespace

std::vector<std::string> validate_schema(const json& schema, const json& document) {
    std::vector<std::string> problems;
    validate_node(schema, schema, document, "$", problems);
    return problems;
}

} // namespace alphalab
