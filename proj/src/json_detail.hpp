// Internal JSON helpers shared by the serializing modules. The canonical
// dump is the single code path that turns JSON values into bytes: compact,
// keys sorted (nlohmann's ordered map), shortest round-trip decimals.
#pragma once

#include <string>

#include <json.hpp>

#include "twingraph/graph.hpp"

namespace twingraph::detail {

std::string canonical_dump(const nlohmann::json& j);

nlohmann::json attr_to_json(const AttrValue& v);
nlohmann::json attrs_to_json(const AttrMap& attrs);
nlohmann::json node_to_json(const Node& n);
nlohmann::json edge_to_json(const Edge& e);

std::string format_double(double d);

}  // namespace twingraph::detail
