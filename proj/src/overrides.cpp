// SPDX-License-Identifier: Apache-2.0

#include "overrides.hpp"

#include <string>
#include <vector>

#include "codec.hpp"
#include "llmsim/error.hpp"

namespace llmsim::detail {

namespace {

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto dot = path.find('.', start);
    out.emplace_back(path.substr(start, dot == std::string_view::npos ? dot : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  for (const auto& s : out) {
    if (s.empty()) throw ConfigError("override: empty segment in path '" + std::string(path) + "'");
  }
  return out;
}

bool is_index(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

Json* find_element(Json& array, const std::string& segment) {
  if (is_index(segment)) {
    std::size_t i = std::stoul(segment);
    return i < array.size() ? &array[i] : nullptr;
  }
  for (auto& e : array) {
    if (!e.is_object()) continue;
    for (const char* key : {"name", "scenario"}) {
      auto it = e.find(key);
      if (it != e.end() && it->is_string() && it->get<std::string>() == segment) return &e;
    }
  }
  return nullptr;
}

void merge_named(Json& list, const Json& entries, const char* what) {
  if (!entries.is_array()) throw ConfigError(std::string("field '") + what + "': expected array");
  for (const auto& e : entries) {
    if (!e.is_object() || !e.contains("name") || !e["name"].is_string()) {
      throw ConfigError(std::string("field '") + what + "': entries need a string 'name'");
    }
    const std::string name = e["name"].get<std::string>();
    Json* existing = nullptr;
    for (auto& cur : list) {
      if (cur["name"] == name) existing = &cur;
    }
    if (existing) {
      existing->merge_patch(e);
    } else {
      list.push_back(e);
    }
  }
}

Json parse_value(std::string_view text) {
  try {
    return parse_strict(text, "override value");
  } catch (const ConfigError&) {
    return Json(std::string(text));
  }
}

void assign(Json& doc, const std::vector<std::string>& segments, const Json& value,
            const std::string& full_path) {
  Json* cur = &doc;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::string& seg = segments[i];
    const bool last = i + 1 == segments.size();
    if (cur->is_array()) {
      Json* next = find_element(*cur, seg);
      if (!next) {
        throw LookupError("override '" + full_path + "': no element '" + seg + "'");
      }
      if (last) {
        *next = value;
        return;
      }
      cur = next;
    } else if (cur->is_object()) {
      if (last) {
        (*cur)[seg] = value;
        return;
      }
      if (!cur->contains(seg)) (*cur)[seg] = Json::object();
      cur = &(*cur)[seg];
    } else {
      throw ConfigError("override '" + full_path + "': segment '" + seg +
                        "' descends into a scalar");
    }
  }
}

}  // namespace

Json base_document() {
  Json doc = Json::object();
  Json profiles = Json::array();
  const ProfileRegistry builtins = builtin_profiles();
  for (const auto& p : builtins.profiles()) profiles.push_back(profile_to_json(p));
  Json models = Json::array();
  for (const auto& m : builtin_models()) models.push_back(model_to_json(m));
  doc["profiles"] = std::move(profiles);
  doc["models"] = std::move(models);
  doc["scenarios"] = Json::array();
  return doc;
}

void merge_document(Json& doc, const Json& layer) {
  check_keys(layer, {"profiles", "models", "scenarios"}, "");
  if (layer.contains("profiles")) merge_named(doc["profiles"], layer["profiles"], "profiles");
  if (layer.contains("models")) merge_named(doc["models"], layer["models"], "models");
  if (layer.contains("scenarios")) {
    if (!layer["scenarios"].is_array()) throw ConfigError("field 'scenarios': expected array");
    doc["scenarios"] = layer["scenarios"];
  }
}

void apply_override(Json& doc, std::string_view assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "': expected key=value");
  }
  const std::string path(assignment.substr(0, eq));
  const Json value = parse_value(assignment.substr(eq + 1));
  auto segments = split_path(path);
  if (segments.front() == "scenario") {
    Json& list = doc["scenarios"];
    if (!list.is_array() || list.empty()) {
      throw LookupError("override '" + path + "': no scenarios to apply it to");
    }
    segments.erase(segments.begin());
    if (segments.empty()) throw ConfigError("override '" + path + "': missing field");
    for (auto& s : list) assign(s, segments, value, path);
    return;
  }
  assign(doc, segments, value, path);
}

}  // namespace llmsim::detail
