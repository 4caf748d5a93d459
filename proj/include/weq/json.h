#pragma once

// nlohmann/json adapters for the serialized data types.

#include <json.hpp>

#include "weq/graph.h"

namespace weq {

void to_json(nlohmann::ordered_json& j, const EquationGraph& g);
void from_json(const nlohmann::json& j, EquationGraph& g);

}  // namespace weq
