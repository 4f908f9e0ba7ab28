#pragma once

// Validator for the JSON Schema subset used under schemas/: type, const,
// enum, required, properties, additionalProperties (false only), items,
// minItems and minimum.

#include <string>
#include <vector>

#include <json.hpp>

namespace schema {

using nlohmann::json;

inline bool has_type(const json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    return false;
}

inline void check(const json& v, const json& s, const std::string& where, std::vector<std::string>& errors) {
    if (s.contains("type")) {
        bool ok = false;
        if (s["type"].is_array()) {
            for (const auto& t : s["type"]) ok = ok || has_type(v, t.get<std::string>());
        } else {
            ok = has_type(v, s["type"].get<std::string>());
        }
        if (!ok) {
            errors.push_back(where + ": expected type " + s["type"].dump() + ", got " + v.type_name());
            return;
        }
    }
    if (s.contains("const") && v != s["const"]) errors.push_back(where + ": expected " + s["const"].dump());
    if (s.contains("enum")) {
        bool found = false;
        for (const auto& e : s["enum"]) found = found || e == v;
        if (!found) errors.push_back(where + ": " + v.dump() + " not in " + s["enum"].dump());
    }
    if (s.contains("minimum") && v.is_number() && v.get<double>() < s["minimum"].get<double>())
        errors.push_back(where + ": below minimum");
    if (v.is_object()) {
        if (s.contains("required"))
            for (const auto& r : s["required"])
                if (!v.contains(r.get<std::string>())) errors.push_back(where + ": missing " + r.dump());
        if (s.contains("properties")) {
            for (const auto& [key, sub] : s["properties"].items())
                if (v.contains(key)) check(v[key], sub, where + "." + key, errors);
            if (s.contains("additionalProperties") && s["additionalProperties"] == false)
                for (const auto& [key, _] : v.items())
                    if (!s["properties"].contains(key)) errors.push_back(where + ": unexpected key " + key);
        }
    }
    if (v.is_array()) {
        if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
            errors.push_back(where + ": too few items");
        if (s.contains("items"))
            for (std::size_t i = 0; i < v.size(); ++i)
                check(v[i], s["items"], where + "[" + std::to_string(i) + "]", errors);
    }
}

inline std::vector<std::string> validate(const json& value, const json& schema_doc) {
    std::vector<std::string> errors;
    check(value, schema_doc, "$", errors);
    return errors;
}

}  // namespace schema
