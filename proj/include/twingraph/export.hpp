// Serialization of the graph model: canonical GraphJSON, DOT, GraphML and
// the simulator-neutral SimSpec.
#pragma once

#include <string>
#include <vector>

#include "twingraph/graph.hpp"

namespace twingraph {

/// Canonical GraphJSON bytes: compact, keys sorted at every level, nodes and
/// edges sorted by tag, shortest round-trip decimals. Byte-deterministic:
/// structurally equal graphs serialize identically.
std::string to_json(const ProcessGraph& g);

/// Directed DOT text; node label "tag\nkind", signal edges dashed, elements
/// emitted in tag order.
std::string to_dot(const ProcessGraph& g);

/// GraphML with node/edge attributes as data keys declared once.
std::string to_graphml(const ProcessGraph& g);

struct SimComponent {
    std::string tag;
    NodeKind kind;
    AttrMap params;
};

struct SimConnection {
    std::string from;
    std::string to;
    std::string stream;
};

/// Simulator-neutral model spec: components plus stream-mediated connections.
struct SimSpec {
    std::string simulator_name;
    std::string fidelity;
    std::vector<SimComponent> components;
    std::vector<SimConnection> connections;
};

/// Requires meta.fidelity and a stream-rewritten graph (every pipe touches
/// exactly one Stream node); NotRewritten otherwise.
Result<SimSpec> to_simspec(const ProcessGraph& g, const std::string& simulator_name);

std::string simspec_to_json(const SimSpec& spec);

}  // namespace twingraph
