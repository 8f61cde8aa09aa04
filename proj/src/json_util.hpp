// SPDX-License-Identifier: Apache-2.0
//
// Strict JSON helpers shared by the config loaders. Errors carry the dotted
// path of the offending field.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace llmsim::detail {

using Json = nlohmann::ordered_json;

// Parses `text`, rejecting syntax errors and duplicate object keys.
Json parse_strict(std::string_view text, std::string_view what);

std::string join_path(std::string_view base, std::string_view key);

// Rejects keys outside `allowed`.
void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                std::string_view path);

const Json& require(const Json& obj, std::string_view key, std::string_view path);
const Json& require_object(const Json& obj, std::string_view key,
                           std::string_view path);
const Json& require_array(const Json& obj, std::string_view key,
                          std::string_view path);

double get_number(const Json& obj, std::string_view key, std::string_view path);
std::int64_t get_int(const Json& obj, std::string_view key, std::string_view path);
std::string get_string(const Json& obj, std::string_view key,
                       std::string_view path);
bool get_bool(const Json& obj, std::string_view key, std::string_view path);

std::optional<double> opt_number(const Json& obj, std::string_view key,
                                 std::string_view path);
std::optional<std::int64_t> opt_int(const Json& obj, std::string_view key,
                                    std::string_view path);
std::optional<std::string> opt_string(const Json& obj, std::string_view key,
                                      std::string_view path);
std::optional<bool> opt_bool(const Json& obj, std::string_view key,
                             std::string_view path);

}  // namespace llmsim::detail
