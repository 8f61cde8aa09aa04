// SPDX-License-Identifier: Apache-2.0

#include "json_util.hpp"

#include <cmath>
#include <set>
#include <vector>

#include "llmsim/error.hpp"

namespace llmsim::detail {

namespace {

[[noreturn]] void fail(std::string_view path, std::string_view message) {
  throw ConfigError("field '" + std::string(path) + "': " + std::string(message));
}

const char* type_label(const Json& j) {
  return j.type_name();
}

}  // namespace

Json parse_strict(std::string_view text, std::string_view what) {
  std::vector<std::set<std::string>> seen;
  std::string duplicate;
  auto callback = [&](int /*depth*/, nlohmann::json::parse_event_t event,
                      Json& parsed) {
    using Event = nlohmann::json::parse_event_t;
    switch (event) {
      case Event::object_start:
        seen.emplace_back();
        break;
      case Event::object_end:
        seen.pop_back();
        break;
      case Event::key: {
        auto key = parsed.get<std::string>();
        if (!seen.back().insert(key).second && duplicate.empty()) {
          duplicate = key;
        }
        break;
      }
      default:
        break;
    }
    return true;
  };
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end(), callback);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
  if (!duplicate.empty()) {
    throw ConfigError(std::string(what) + ": duplicate key '" + duplicate + "'");
  }
  return doc;
}

std::string join_path(std::string_view base, std::string_view key) {
  if (base.empty()) return std::string(key);
  std::string out(base);
  out += '.';
  out += key;
  return out;
}

void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                std::string_view path) {
  if (!obj.is_object()) fail(path, "expected object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) fail(join_path(path, key), "unknown key");
  }
}

const Json& require(const Json& obj, std::string_view key, std::string_view path) {
  if (!obj.is_object()) fail(path, "expected object");
  auto it = obj.find(std::string(key));
  if (it == obj.end()) fail(join_path(path, key), "missing");
  return *it;
}

const Json& require_object(const Json& obj, std::string_view key,
                           std::string_view path) {
  const Json& v = require(obj, key, path);
  if (!v.is_object()) {
    fail(join_path(path, key), std::string("expected object, got ") + type_label(v));
  }
  return v;
}

const Json& require_array(const Json& obj, std::string_view key,
                          std::string_view path) {
  const Json& v = require(obj, key, path);
  if (!v.is_array()) {
    fail(join_path(path, key), std::string("expected array, got ") + type_label(v));
  }
  return v;
}

namespace {

double as_number(const Json& v, std::string_view path) {
  if (!v.is_number()) fail(path, std::string("expected number, got ") + type_label(v));
  double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "not finite");
  return d;
}

std::int64_t as_int(const Json& v, std::string_view path) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9.0e15) {
      return static_cast<std::int64_t>(d);
    }
  }
  fail(path, std::string("expected integer, got ") + type_label(v));
}

}  // namespace

double get_number(const Json& obj, std::string_view key, std::string_view path) {
  return as_number(require(obj, key, path), join_path(path, key));
}

std::int64_t get_int(const Json& obj, std::string_view key, std::string_view path) {
  return as_int(require(obj, key, path), join_path(path, key));
}

std::string get_string(const Json& obj, std::string_view key,
                       std::string_view path) {
  const Json& v = require(obj, key, path);
  if (!v.is_string()) {
    fail(join_path(path, key), std::string("expected string, got ") + type_label(v));
  }
  return v.get<std::string>();
}

bool get_bool(const Json& obj, std::string_view key, std::string_view path) {
  const Json& v = require(obj, key, path);
  if (!v.is_boolean()) {
    fail(join_path(path, key), std::string("expected boolean, got ") + type_label(v));
  }
  return v.get<bool>();
}

std::optional<double> opt_number(const Json& obj, std::string_view key,
                                 std::string_view path) {
  if (!obj.contains(std::string(key))) return std::nullopt;
  return get_number(obj, key, path);
}

std::optional<std::int64_t> opt_int(const Json& obj, std::string_view key,
                                    std::string_view path) {
  if (!obj.contains(std::string(key))) return std::nullopt;
  return get_int(obj, key, path);
}

std::optional<std::string> opt_string(const Json& obj, std::string_view key,
                                      std::string_view path) {
  if (!obj.contains(std::string(key))) return std::nullopt;
  return get_string(obj, key, path);
}

std::optional<bool> opt_bool(const Json& obj, std::string_view key,
                             std::string_view path) {
  if (!obj.contains(std::string(key))) return std::nullopt;
  return get_bool(obj, key, path);
}

}  // namespace llmsim::detail
