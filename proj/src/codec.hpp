// SPDX-License-Identifier: Apache-2.0
//
// JSON codecs for the domain types, shared by the document loaders and the
// scenario/CLI layer.

#pragma once

#include <string>

#include "json_util.hpp"
#include "llmsim/models.hpp"
#include "llmsim/profiles.hpp"
#include "llmsim/scenario.hpp"

namespace llmsim::detail {

Json profile_to_json(const HardwareProfile& p);
HardwareProfile profile_from_json(const Json& obj, const std::string& path);

Json model_to_json(const ModelConfig& m);
ModelConfig model_from_json(const Json& obj, const std::string& path);

Json format_to_json(const DataFormatPolicy& fmt);
DataFormatPolicy format_from_json(const Json& obj, const std::string& path);

Json mapping_to_json(const MappingScheme& m);
MappingScheme mapping_from_json(const Json& obj, const std::string& path);

Json scenario_to_json(const ScenarioSpec& s);
ScenarioSpec scenario_from_json(const Json& obj, const std::string& path);

// {"profiles": [...]?, "models": [...]?, "scenarios": [...]}.
ScenarioDocument scenario_document_from_json(const Json& doc);

}  // namespace llmsim::detail
