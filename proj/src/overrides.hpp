// SPDX-License-Identifier: Apache-2.0
//
// Layered configuration documents: builtins, then user files, then
// command-line `key=value` overrides on dotted paths.

#pragma once

#include <string_view>

#include "json_util.hpp"

namespace llmsim::detail {

// {"profiles": [builtins], "models": [builtins], "scenarios": []}.
Json base_document();

// Merges a document holding any of profiles/models/scenarios into `doc`.
// Profiles and models are matched by name and JSON-merge-patched; a
// scenarios list replaces the current one.
void merge_document(Json& doc, const Json& layer);

// Applies "a.b.c=value". Array segments are indices or the value of an
// element's "name" (profiles, models) or "scenario" field. The prefix
// "scenario." addresses every entry of "scenarios". The value is parsed as
// JSON when possible, else taken as a string.
void apply_override(Json& doc, std::string_view assignment);

}  // namespace llmsim::detail
