#include "twingraph/graph.hpp"

#include <algorithm>
#include <set>

namespace twingraph {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::DuplicateTag: return "duplicate_tag";
        case Errc::InvalidNode: return "invalid_node";
        case Errc::InvalidEdge: return "invalid_edge";
        case Errc::UnknownEndpoint: return "unknown_endpoint";
        case Errc::NozzleOccupied: return "nozzle_occupied";
        case Errc::DirectionViolation: return "direction_violation";
        case Errc::UnknownTag: return "unknown_tag";
        case Errc::WouldDangle: return "would_dangle";
        case Errc::UnspliceableInstrument: return "unspliceable_instrument";
        case Errc::TagCollision: return "tag_collision";
        case Errc::KindMismatch: return "kind_mismatch";
        case Errc::BadProfile: return "bad_profile";
        case Errc::BadRuleSet: return "bad_ruleset";
        case Errc::MissingBoundaryCondition: return "missing_boundary_condition";
        case Errc::Underdetermined: return "underdetermined";
        case Errc::Inconsistent: return "inconsistent";
        case Errc::NegativeFlow: return "negative_flow";
        case Errc::NotRewritten: return "not_rewritten";
        case Errc::Precondition: return "precondition";
        case Errc::Io: return "io";
    }
    return "unknown";
}

std::string Error::to_string() const {
    std::string s = errc_name(code);
    if (!subject.empty()) {
        s += " [" + subject + "]";
    }
    s += ": " + message;
    return s;
}

const char* coord_frame_name(CoordFrame f) {
    return f == CoordFrame::DocumentMM ? "document_mm" : "plant_m";
}

const char* kind_tag_name(KindTag t) {
    switch (t) {
        case KindTag::Tank: return "tank";
        case KindTag::Pump: return "pump";
        case KindTag::Valve: return "valve";
        case KindTag::Mixer: return "mixer";
        case KindTag::Splitter: return "splitter";
        case KindTag::HeatExchanger: return "hx";
        case KindTag::Instrument: return "instrument";
        case KindTag::Controller: return "controller";
        case KindTag::Source: return "source";
        case KindTag::Sink: return "sink";
        case KindTag::Stream: return "stream";
        case KindTag::Other: return "other";
    }
    return "other";
}

std::string kind_to_string(const NodeKind& k) {
    if (k.tag == KindTag::Other) {
        return "other:" + k.other_name;
    }
    return kind_tag_name(k.tag);
}

std::optional<KindTag> kind_tag_from_string(const std::string& s) {
    static const std::map<std::string, KindTag> table = {
        {"tank", KindTag::Tank},
        {"pump", KindTag::Pump},
        {"valve", KindTag::Valve},
        {"mixer", KindTag::Mixer},
        {"splitter", KindTag::Splitter},
        {"hx", KindTag::HeatExchanger},
        {"instrument", KindTag::Instrument},
        {"controller", KindTag::Controller},
        {"source", KindTag::Source},
        {"sink", KindTag::Sink},
        {"stream", KindTag::Stream},
        {"other", KindTag::Other},
    };
    auto it = table.find(s);
    if (it == table.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<NodeKind> kind_from_string(const std::string& s) {
    if (s.rfind("other:", 0) == 0) {
        std::string name = s.substr(6);
        if (name.empty()) {
            return std::nullopt;
        }
        return NodeKind::other(name);
    }
    auto tag = kind_tag_from_string(s);
    if (!tag || *tag == KindTag::Other) {
        // bare "other" without a name is not a valid kind
        return std::nullopt;
    }
    return NodeKind(*tag);
}

const char* edge_kind_name(EdgeKind k) {
    return k == EdgeKind::ProcessFlow ? "process" : "signal";
}

std::optional<EdgeKind> edge_kind_from_string(const std::string& s) {
    if (s == "process") {
        return EdgeKind::ProcessFlow;
    }
    if (s == "signal") {
        return EdgeKind::Signal;
    }
    return std::nullopt;
}

bool signal_endpoint_kind(KindTag t) {
    return t == KindTag::Instrument || t == KindTag::Controller || t == KindTag::Valve ||
           t == KindTag::Pump;
}

namespace {

bool tag_chars_ok(const std::string& tag, bool allow_generated) {
    for (char c : tag) {
        bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                  c == '-' || c == '_' || c == '.';
        if (!ok && allow_generated) {
            ok = c == '@' || c == '+';
        }
        if (!ok) {
            return false;
        }
    }
    return true;
}

}  // namespace

bool valid_tag(const std::string& tag) {
    return !tag.empty() && tag_chars_ok(tag, true);
}

bool valid_user_tag(const std::string& tag) {
    return !tag.empty() && tag.size() <= 64 && tag_chars_ok(tag, false);
}

const Nozzle* Node::find_nozzle(const std::string& id) const {
    for (const auto& z : nozzles) {
        if (z.id == id) {
            return &z;
        }
    }
    return nullptr;
}

const Node* ProcessGraph::find_node(const std::string& tag) const {
    auto it = nodes_.find(tag);
    return it == nodes_.end() ? nullptr : &it->second;
}

const Edge* ProcessGraph::find_edge(const std::string& tag) const {
    auto it = edges_.find(tag);
    return it == edges_.end() ? nullptr : &it->second;
}

std::size_t ProcessGraph::edge_count(EdgeKind kind) const {
    std::size_t n = 0;
    for (const auto& [tag, e] : edges_) {
        if (e.kind == kind) {
            ++n;
        }
    }
    return n;
}

Result<void> ProcessGraph::add_node(Node n) {
    if (!valid_tag(n.tag)) {
        return make_error(Errc::InvalidNode, n.tag, "invalid node tag");
    }
    if (nodes_.count(n.tag)) {
        return make_error(Errc::DuplicateTag, n.tag, "node tag already present");
    }
    if (n.kind.tag == KindTag::Other && n.kind.other_name.empty()) {
        return make_error(Errc::InvalidNode, n.tag, "Other kind requires a nonempty name");
    }
    std::set<std::string> ids;
    std::set<std::pair<int, unsigned>> ordinals;
    for (const auto& z : n.nozzles) {
        if (z.id.empty()) {
            return make_error(Errc::InvalidNode, n.tag, "empty nozzle id");
        }
        if (!ids.insert(z.id).second) {
            return make_error(Errc::InvalidNode, n.tag, "duplicate nozzle id '" + z.id + "'");
        }
        if (!ordinals.insert({static_cast<int>(z.direction), z.ordinal}).second) {
            return make_error(Errc::InvalidNode, n.tag,
                              "duplicate nozzle ordinal for '" + z.id + "'");
        }
    }
    for (const auto& [key, v] : n.attrs) {
        if (!v.finite()) {
            return make_error(Errc::InvalidNode, n.tag, "attribute '" + key + "' is not finite");
        }
    }
    if (n.position && n.position->coords.size() != 2 && n.position->coords.size() != 3) {
        return make_error(Errc::InvalidNode, n.tag, "position must have 2 or 3 coordinates");
    }
    nodes_.emplace(n.tag, std::move(n));
    return {};
}

Result<void> ProcessGraph::check_edge(const Edge& e) const {
    if (!valid_tag(e.tag)) {
        return make_error(Errc::InvalidEdge, e.tag, "invalid edge tag");
    }
    const Node* src = find_node(e.source.node_tag);
    if (!src) {
        return make_error(Errc::UnknownEndpoint, e.tag,
                          "unknown source node '" + e.source.node_tag + "'");
    }
    const Node* dst = find_node(e.target.node_tag);
    if (!dst) {
        return make_error(Errc::UnknownEndpoint, e.tag,
                          "unknown target node '" + e.target.node_tag + "'");
    }
    for (const auto& [key, v] : e.attrs) {
        if (!v.finite()) {
            return make_error(Errc::InvalidEdge, e.tag, "attribute '" + key + "' is not finite");
        }
    }
    if (e.kind == EdgeKind::Signal) {
        if (!e.source.nozzle_id.empty() || !e.target.nozzle_id.empty()) {
            return make_error(Errc::InvalidEdge, e.tag, "signal edges connect nodes, not nozzles");
        }
        if (!signal_endpoint_kind(src->kind.tag) || !signal_endpoint_kind(dst->kind.tag)) {
            return make_error(Errc::InvalidEdge, e.tag,
                              "signal edges may only touch instrument, controller, valve or pump "
                              "nodes");
        }
        return {};
    }
    const Nozzle* zs = src->find_nozzle(e.source.nozzle_id);
    if (!zs) {
        return make_error(Errc::UnknownEndpoint, e.tag,
                          "node '" + src->tag + "' has no nozzle '" + e.source.nozzle_id + "'");
    }
    const Nozzle* zt = dst->find_nozzle(e.target.nozzle_id);
    if (!zt) {
        return make_error(Errc::UnknownEndpoint, e.tag,
                          "node '" + dst->tag + "' has no nozzle '" + e.target.nozzle_id + "'");
    }
    if (zs->direction != NozzleDirection::Outlet || zt->direction != NozzleDirection::Inlet) {
        return make_error(Errc::DirectionViolation, e.tag,
                          "process edges run outlet -> inlet");
    }
    if (const Edge* occ = edge_at_nozzle(src->tag, zs->id)) {
        return make_error(Errc::NozzleOccupied, e.tag,
                          "nozzle " + src->tag + "." + zs->id + " already carries edge '" +
                              occ->tag + "'");
    }
    if (const Edge* occ = edge_at_nozzle(dst->tag, zt->id)) {
        return make_error(Errc::NozzleOccupied, e.tag,
                          "nozzle " + dst->tag + "." + zt->id + " already carries edge '" +
                              occ->tag + "'");
    }
    return {};
}

Result<void> ProcessGraph::add_edge(Edge e) {
    if (edges_.count(e.tag)) {
        return make_error(Errc::DuplicateTag, e.tag, "edge tag already present");
    }
    if (auto r = check_edge(e); !r.ok()) {
        return r.error();
    }
    edges_.emplace(e.tag, std::move(e));
    return {};
}

Result<void> ProcessGraph::remove_node(const std::string& tag, bool cascade) {
    auto it = nodes_.find(tag);
    if (it == nodes_.end()) {
        return make_error(Errc::UnknownTag, tag, "no such node");
    }
    std::vector<std::string> incident;
    for (const auto& [etag, e] : edges_) {
        if (e.source.node_tag == tag || e.target.node_tag == tag) {
            incident.push_back(etag);
        }
    }
    if (!incident.empty() && !cascade) {
        return make_error(Errc::WouldDangle, tag,
                          "node has " + std::to_string(incident.size()) + " incident edge(s)");
    }
    for (const auto& etag : incident) {
        edges_.erase(etag);
    }
    nodes_.erase(it);
    return {};
}

Result<void> ProcessGraph::remove_edge(const std::string& tag) {
    if (!edges_.erase(tag)) {
        return make_error(Errc::UnknownTag, tag, "no such edge");
    }
    return {};
}

Result<void> ProcessGraph::set_node_attr(const std::string& tag, const std::string& key,
                                         AttrValue v) {
    auto it = nodes_.find(tag);
    if (it == nodes_.end()) {
        return make_error(Errc::UnknownTag, tag, "no such node");
    }
    if (!v.finite()) {
        return make_error(Errc::InvalidNode, tag, "attribute '" + key + "' is not finite");
    }
    it->second.attrs[key] = std::move(v);
    return {};
}

Result<void> ProcessGraph::set_edge_attr(const std::string& tag, const std::string& key,
                                         AttrValue v) {
    auto it = edges_.find(tag);
    if (it == edges_.end()) {
        return make_error(Errc::UnknownTag, tag, "no such edge");
    }
    if (!v.finite()) {
        return make_error(Errc::InvalidEdge, tag, "attribute '" + key + "' is not finite");
    }
    it->second.attrs[key] = std::move(v);
    return {};
}

Result<std::vector<AdjacencyEntry>> ProcessGraph::adjacency(const std::string& tag,
                                                            std::optional<EdgeKind> kind) const {
    if (!nodes_.count(tag)) {
        return Result<std::vector<AdjacencyEntry>>(
            make_error(Errc::UnknownTag, tag, "no such node"));
    }
    std::vector<AdjacencyEntry> out;
    for (const auto& [etag, e] : edges_) {  // map order = edge tag lexicographic
        if (kind && e.kind != *kind) {
            continue;
        }
        if (e.source.node_tag == tag) {
            out.push_back({etag, e.target.node_tag, true});
        } else if (e.target.node_tag == tag) {
            out.push_back({etag, e.source.node_tag, false});
        }
    }
    return out;
}

std::vector<const Edge*> ProcessGraph::edges_at(const std::string& tag,
                                                std::optional<EdgeKind> kind) const {
    std::vector<const Edge*> out;
    for (const auto& [etag, e] : edges_) {
        if (kind && e.kind != *kind) {
            continue;
        }
        if (e.source.node_tag == tag || e.target.node_tag == tag) {
            out.push_back(&e);
        }
    }
    return out;
}

const Edge* ProcessGraph::edge_at_nozzle(const std::string& node_tag,
                                         const std::string& nozzle_id) const {
    for (const auto& [etag, e] : edges_) {
        if (e.kind != EdgeKind::ProcessFlow) {
            continue;
        }
        if ((e.source.node_tag == node_tag && e.source.nozzle_id == nozzle_id) ||
            (e.target.node_tag == node_tag && e.target.nozzle_id == nozzle_id)) {
            return &e;
        }
    }
    return nullptr;
}

Result<void> ProcessGraph::check_integrity() const {
    for (const auto& [tag, n] : nodes_) {
        if (tag != n.tag) {
            return make_error(Errc::InvalidNode, tag, "node key does not match node tag");
        }
        std::set<std::string> ids;
        for (const auto& z : n.nozzles) {
            if (!ids.insert(z.id).second) {
                return make_error(Errc::InvalidNode, tag, "duplicate nozzle id '" + z.id + "'");
            }
        }
    }
    std::map<std::pair<std::string, std::string>, int> occupancy;
    for (const auto& [tag, e] : edges_) {
        if (tag != e.tag) {
            return make_error(Errc::InvalidEdge, tag, "edge key does not match edge tag");
        }
        const Node* src = find_node(e.source.node_tag);
        const Node* dst = find_node(e.target.node_tag);
        if (!src || !dst) {
            return make_error(Errc::UnknownEndpoint, tag, "dangling endpoint");
        }
        if (e.kind == EdgeKind::ProcessFlow) {
            const Nozzle* zs = src->find_nozzle(e.source.nozzle_id);
            const Nozzle* zt = dst->find_nozzle(e.target.nozzle_id);
            if (!zs || !zt) {
                return make_error(Errc::UnknownEndpoint, tag, "dangling nozzle reference");
            }
            if (zs->direction != NozzleDirection::Outlet ||
                zt->direction != NozzleDirection::Inlet) {
                return make_error(Errc::DirectionViolation, tag, "edge direction violated");
            }
            if (++occupancy[{e.source.node_tag, e.source.nozzle_id}] > 1 ||
                ++occupancy[{e.target.node_tag, e.target.nozzle_id}] > 1) {
                return make_error(Errc::NozzleOccupied, tag, "nozzle carries multiple edges");
            }
        }
    }
    return {};
}

}  // namespace twingraph
