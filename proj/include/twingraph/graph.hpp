// The intermediate graph model of a process plant: typed nodes with nozzles,
// process and signal edges, and document metadata. This is the single
// representation every other module consumes and produces.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twingraph/attr.hpp"
#include "twingraph/error.hpp"

namespace twingraph {

enum class KindTag {
    Tank,
    Pump,
    Valve,
    Mixer,
    Splitter,
    HeatExchanger,
    Instrument,
    Controller,
    Source,
    Sink,
    Stream,  // reserved for rewrite-generated stream nodes
    Other,
};

struct NodeKind {
    KindTag tag = KindTag::Other;
    std::string other_name;  // nonempty iff tag == Other

    NodeKind() = default;
    NodeKind(KindTag t) : tag(t) {}
    static NodeKind other(std::string name) {
        NodeKind k;
        k.tag = KindTag::Other;
        k.other_name = std::move(name);
        return k;
    }

    friend bool operator==(const NodeKind& a, const NodeKind& b) {
        return a.tag == b.tag && a.other_name == b.other_name;
    }
    friend bool operator!=(const NodeKind& a, const NodeKind& b) { return !(a == b); }
};

/// Canonical string form, e.g. "pump", "hx", "other:reactor".
std::string kind_to_string(const NodeKind& k);
std::optional<NodeKind> kind_from_string(const std::string& s);
std::optional<KindTag> kind_tag_from_string(const std::string& s);
const char* kind_tag_name(KindTag t);

enum class NozzleDirection { Inlet, Outlet };

struct Nozzle {
    std::string id;  // unique within its node
    NozzleDirection direction = NozzleDirection::Inlet;
    unsigned ordinal = 0;  // unique per (node, direction)

    friend bool operator==(const Nozzle& a, const Nozzle& b) {
        return a.id == b.id && a.direction == b.direction && a.ordinal == b.ordinal;
    }
};

struct Node {
    std::string tag;  // plant-unique identifier, e.g. "P-101"
    NodeKind kind;
    std::optional<Position> position;
    std::vector<Nozzle> nozzles;
    AttrMap attrs;

    const Nozzle* find_nozzle(const std::string& id) const;

    friend bool operator==(const Node& a, const Node& b) {
        return a.tag == b.tag && a.kind == b.kind && a.position == b.position &&
               a.nozzles == b.nozzles && a.attrs == b.attrs;
    }
};

struct Endpoint {
    std::string node_tag;
    std::string nozzle_id;  // empty for signal endpoints

    friend bool operator==(const Endpoint& a, const Endpoint& b) {
        return a.node_tag == b.node_tag && a.nozzle_id == b.nozzle_id;
    }
    friend auto operator<=>(const Endpoint& a, const Endpoint& b) = default;
};

enum class EdgeKind { ProcessFlow, Signal };

const char* edge_kind_name(EdgeKind k);
std::optional<EdgeKind> edge_kind_from_string(const std::string& s);

struct Edge {
    std::string tag;  // unique among edges
    EdgeKind kind = EdgeKind::ProcessFlow;
    Endpoint source;  // ProcessFlow: outlet nozzle; Signal: node only
    Endpoint target;  // ProcessFlow: inlet nozzle; Signal: node only
    AttrMap attrs;

    friend bool operator==(const Edge& a, const Edge& b) {
        return a.tag == b.tag && a.kind == b.kind && a.source == b.source &&
               a.target == b.target && a.attrs == b.attrs;
    }
};

struct AdjacencyEntry {
    std::string edge_tag;
    std::string neighbor_tag;
    bool outgoing = false;  // true when the queried node is the edge source

    friend bool operator==(const AdjacencyEntry& a, const AdjacencyEntry& b) {
        return a.edge_tag == b.edge_tag && a.neighbor_tag == b.neighbor_tag &&
               a.outgoing == b.outgoing;
    }
};

/// Tags accepted anywhere in a graph. Rewrites generate tags containing
/// '@' and '+', which the stricter PIDL surface never produces.
bool valid_tag(const std::string& tag);

/// The stricter grammar for hand-authored tags: [A-Za-z0-9._-], max 64.
bool valid_user_tag(const std::string& tag);

class ProcessGraph {
public:
    ProcessGraph() = default;
    explicit ProcessGraph(std::map<std::string, std::string> meta) : meta_(std::move(meta)) {}

    const std::map<std::string, Node>& nodes() const { return nodes_; }
    const std::map<std::string, Edge>& edges() const { return edges_; }
    const std::map<std::string, std::string>& meta() const { return meta_; }
    std::map<std::string, std::string>& meta() { return meta_; }

    const Node* find_node(const std::string& tag) const;
    const Edge* find_edge(const std::string& tag) const;

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    std::size_t edge_count(EdgeKind kind) const;

    Result<void> add_node(Node n);
    Result<void> add_edge(Edge e);
    /// cascade=true also removes incident edges; cascade=false refuses to dangle.
    Result<void> remove_node(const std::string& tag, bool cascade);
    Result<void> remove_edge(const std::string& tag);

    /// Replaces attributes of an existing node (tag unchanged).
    Result<void> set_node_attr(const std::string& tag, const std::string& key, AttrValue v);
    Result<void> set_edge_attr(const std::string& tag, const std::string& key, AttrValue v);

    /// Incident edges of the requested kind, ordered by edge tag.
    Result<std::vector<AdjacencyEntry>> adjacency(const std::string& tag,
                                                  std::optional<EdgeKind> kind = {}) const;

    /// All edges touching a node, ordered by edge tag. Empty if unknown tag.
    std::vector<const Edge*> edges_at(const std::string& tag,
                                      std::optional<EdgeKind> kind = {}) const;

    /// The ProcessFlow edge occupying a nozzle, if any.
    const Edge* edge_at_nozzle(const std::string& node_tag, const std::string& nozzle_id) const;

    /// Full-scan structural check used by tests: referential integrity,
    /// direction rule, nozzle occupancy, per-node nozzle uniqueness.
    Result<void> check_integrity() const;

    friend bool operator==(const ProcessGraph& a, const ProcessGraph& b) {
        return a.nodes_ == b.nodes_ && a.edges_ == b.edges_ && a.meta_ == b.meta_;
    }
    friend bool operator!=(const ProcessGraph& a, const ProcessGraph& b) { return !(a == b); }

private:
    Result<void> check_edge(const Edge& e) const;

    std::map<std::string, Node> nodes_;
    std::map<std::string, Edge> edges_;
    std::map<std::string, std::string> meta_;
};

/// Kinds a signal edge may touch.
bool signal_endpoint_kind(KindTag t);

}  // namespace twingraph
