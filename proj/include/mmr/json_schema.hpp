#pragma once

// A small draft-07 JSON Schema validator covering the keywords used by the
// vendored grammar schema and the schemas shipped in schema/.

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmr/dataset.hpp"
#include "mmr/error.hpp"
#include "mmr/value.hpp"

namespace mmr {

class SchemaValidator {
 public:
  explicit SchemaValidator(nlohmann::json schema) : root_(std::move(schema)) {}

  static SchemaValidator from_file(const std::string& path) {
    return SchemaValidator(nlohmann::json::parse(read_file(path)));
  }

  // Empty when `doc` conforms; otherwise one message per failing location.
  std::vector<std::string> validate(const nlohmann::json& doc) const {
    std::vector<std::string> errors;
    check(root_, doc, "", errors, 0);
    return errors;
  }

  std::vector<std::string> validate(const Json& doc) const { return validate(nlohmann::json::parse(doc.dump())); }

 private:
  const nlohmann::json& resolve(const std::string& ref) const {
    if (ref.rfind("#", 0) != 0) throw Error("schema-error", "only local $ref is supported: " + ref);
    const std::string pointer = ref.substr(1);
    return root_.at(nlohmann::json::json_pointer(pointer));
  }

  static bool type_matches(const std::string& type, const nlohmann::json& v) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "boolean") return v.is_boolean();
    if (type == "null") return v.is_null();
    if (type == "number") return v.is_number();
    if (type == "integer") {
      if (v.is_number_integer()) return true;
      if (v.is_number_float()) {
        const double d = v.get<double>();
        return std::isfinite(d) && std::floor(d) == d;
      }
      return false;
    }
    return false;
  }

  static bool json_equal(const nlohmann::json& a, const nlohmann::json& b) {
    if (a.is_number() && b.is_number()) return a.get<double>() == b.get<double>();
    return a == b;
  }

  void check(const nlohmann::json& schema, const nlohmann::json& v, const std::string& path,
             std::vector<std::string>& errors, int depth) const {
    if (depth > 200) {
      errors.push_back(path + ": schema recursion too deep");
      return;
    }
    if (schema.is_boolean()) {
      if (!schema.get<bool>()) errors.push_back(path + ": no value allowed");
      return;
    }
    if (!schema.is_object()) return;
    if (auto it = schema.find("$ref"); it != schema.end()) {
      check(resolve(it->get<std::string>()), v, path, errors, depth + 1);
    }
    if (auto it = schema.find("type"); it != schema.end()) {
      bool ok = false;
      if (it->is_string()) {
        ok = type_matches(it->get<std::string>(), v);
      } else {
        for (const auto& t : *it) ok = ok || type_matches(t.get<std::string>(), v);
      }
      if (!ok) {
        errors.push_back(path + ": expected type " + it->dump() + ", got " + v.type_name());
        return;
      }
    }
    if (auto it = schema.find("const"); it != schema.end() && !json_equal(*it, v)) {
      errors.push_back(path + ": expected constant " + it->dump());
    }
    if (auto it = schema.find("enum"); it != schema.end()) {
      bool ok = false;
      for (const auto& e : *it) ok = ok || json_equal(e, v);
      if (!ok) errors.push_back(path + ": value " + v.dump() + " not in enum");
    }
    if (auto it = schema.find("anyOf"); it != schema.end()) {
      bool ok = false;
      for (const auto& branch : *it) {
        std::vector<std::string> sub;
        check(branch, v, path, sub, depth + 1);
        if (sub.empty()) {
          ok = true;
          break;
        }
      }
      if (!ok) errors.push_back(path + ": matches no alternative");
    }
    if (auto it = schema.find("oneOf"); it != schema.end()) {
      int matches = 0;
      for (const auto& branch : *it) {
        std::vector<std::string> sub;
        check(branch, v, path, sub, depth + 1);
        matches += sub.empty() ? 1 : 0;
      }
      if (matches != 1) errors.push_back(path + ": must match exactly one alternative");
    }
    if (auto it = schema.find("allOf"); it != schema.end()) {
      for (const auto& branch : *it) check(branch, v, path, errors, depth + 1);
    }
    if (auto it = schema.find("not"); it != schema.end()) {
      std::vector<std::string> sub;
      check(*it, v, path, sub, depth + 1);
      if (sub.empty()) errors.push_back(path + ": matches a forbidden schema");
    }
    if (v.is_number()) {
      const double d = v.get<double>();
      if (auto it = schema.find("minimum"); it != schema.end() && d < it->get<double>()) {
        errors.push_back(path + ": below minimum " + it->dump());
      }
      if (auto it = schema.find("maximum"); it != schema.end() && d > it->get<double>()) {
        errors.push_back(path + ": above maximum " + it->dump());
      }
    }
    if (v.is_string()) {
      const auto n = v.get<std::string>().size();
      if (auto it = schema.find("minLength"); it != schema.end() && n < it->get<std::size_t>()) {
        errors.push_back(path + ": string too short");
      }
      if (auto it = schema.find("maxLength"); it != schema.end() && n > it->get<std::size_t>()) {
        errors.push_back(path + ": string too long");
      }
    }
    if (v.is_array()) {
      if (auto it = schema.find("minItems"); it != schema.end() && v.size() < it->get<std::size_t>()) {
        errors.push_back(path + ": too few items");
      }
      if (auto it = schema.find("maxItems"); it != schema.end() && v.size() > it->get<std::size_t>()) {
        errors.push_back(path + ": too many items");
      }
      if (auto it = schema.find("items"); it != schema.end()) {
        if (it->is_array()) {
          for (std::size_t i = 0; i < v.size() && i < it->size(); ++i) {
            check((*it)[i], v[i], path + "/" + std::to_string(i), errors, depth + 1);
          }
        } else {
          for (std::size_t i = 0; i < v.size(); ++i) check(*it, v[i], path + "/" + std::to_string(i), errors, depth + 1);
        }
      }
    }
    if (v.is_object()) {
      if (auto it = schema.find("required"); it != schema.end()) {
        for (const auto& r : *it) {
          if (!v.contains(r.get<std::string>())) errors.push_back(path + ": missing property '" + r.get<std::string>() + "'");
        }
      }
      if (auto it = schema.find("minProperties"); it != schema.end() && v.size() < it->get<std::size_t>()) {
        errors.push_back(path + ": too few properties");
      }
      const auto props = schema.find("properties");
      const auto extra = schema.find("additionalProperties");
      for (const auto& [k, child] : v.items()) {
        const std::string cp = path + "/" + k;
        if (props != schema.end() && props->contains(k)) {
          check((*props)[k], child, cp, errors, depth + 1);
        } else if (extra != schema.end()) {
          if (extra->is_boolean() && !extra->get<bool>()) {
            errors.push_back(cp + ": property not allowed");
          } else {
            check(*extra, child, cp, errors, depth + 1);
          }
        }
      }
    }
  }

  nlohmann::json root_;
};

}  // namespace mmr
