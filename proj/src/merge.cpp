#include <cmath>
#include <tuple>

#include "json_detail.hpp"
#include "twingraph/transform.hpp"

namespace twingraph {

std::string conflicts_to_json(const std::vector<Conflict>& conflicts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : conflicts) {
        nlohmann::json j;
        j["tag"] = c.tag;
        j["key"] = c.key;
        j["value_a"] = detail::attr_to_json(c.value_a);
        j["value_b"] = detail::attr_to_json(c.value_b);
        arr.push_back(std::move(j));
    }
    return detail::canonical_dump(arr);
}

namespace {

bool agrees(const AttrValue& a, const AttrValue& b, double tol) {
    if (a.is_number() && b.is_number()) {
        double x = a.number();
        double y = b.number();
        return std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y));
    }
    return a == b;
}

// Folds b's attributes into out (which starts as a's); collects conflicts
// under the Report policy.
void merge_attrs(AttrMap& out, const AttrMap& b, const std::string& tag, const MergePolicy& pol,
                 std::vector<Conflict>& conflicts) {
    for (const auto& [key, vb] : b) {
        auto it = out.find(key);
        if (it == out.end()) {
            out.emplace(key, vb);
            continue;
        }
        if (agrees(it->second, vb, pol.numeric_tolerance)) {
            continue;  // a's value stands
        }
        switch (pol.on_conflict) {
            case ConflictPolicy::PreferA:
                break;
            case ConflictPolicy::PreferB:
                it->second = vb;
                break;
            case ConflictPolicy::Report:
                conflicts.push_back({tag, key, it->second, vb});
                break;
        }
    }
}

unsigned next_ordinal(const Node& n, NozzleDirection dir) {
    unsigned next = 0;
    for (const auto& z : n.nozzles) {
        if (z.direction == dir) {
            next = std::max(next, z.ordinal + 1);
        }
    }
    return next;
}

}  // namespace

Result<MergeResult> merge(const ProcessGraph& a, const ProcessGraph& b, const MergePolicy& pol) {
    if (pol.numeric_tolerance < 0) {
        return Result<MergeResult>(
            make_error(Errc::Precondition, "", "merge tolerance must be nonnegative"));
    }
    ProcessGraph out = a;
    std::vector<Conflict> conflicts;

    // Nodes: match by exact tag, kinds must agree.
    for (const auto& [tag, bn] : b.nodes()) {
        const Node* an = out.find_node(tag);
        if (!an) {
            if (auto r = out.add_node(bn); !r.ok()) {
                return Result<MergeResult>(r.error());
            }
            continue;
        }
        if (an->kind != bn.kind) {
            return Result<MergeResult>(make_error(
                Errc::KindMismatch, tag,
                "node '" + tag + "' is " + kind_to_string(an->kind) + " in one source and " +
                    kind_to_string(bn.kind) + " in the other"));
        }
        Node merged = *an;
        merge_attrs(merged.attrs, bn.attrs, tag, pol, conflicts);
        if (!merged.position && bn.position) {
            merged.position = bn.position;
        }
        for (const auto& z : bn.nozzles) {
            if (!merged.find_nozzle(z.id)) {
                merged.nozzles.push_back({z.id, z.direction, next_ordinal(merged, z.direction)});
            }
        }
        auto rm = out.remove_node(tag, false);
        if (rm.ok()) {
            if (auto r = out.add_node(std::move(merged)); !r.ok()) {
                return Result<MergeResult>(r.error());
            }
        } else {
            // node carries edges: update attributes in place, rebuild only
            // when b added nozzles or a position
            for (const auto& [key, v] : merged.attrs) {
                if (auto r = out.set_node_attr(tag, key, v); !r.ok()) {
                    return Result<MergeResult>(r.error());
                }
            }
            // nozzles/position only differ when b added information
            if (merged.nozzles.size() != an->nozzles.size() ||
                merged.position != an->position) {
                // rebuild: detach edges, swap node, reattach
                std::vector<Edge> incident;
                for (const Edge* e : out.edges_at(tag)) {
                    incident.push_back(*e);
                }
                if (auto r = out.remove_node(tag, true); !r.ok()) {
                    return Result<MergeResult>(r.error());
                }
                if (auto r = out.add_node(std::move(merged)); !r.ok()) {
                    return Result<MergeResult>(r.error());
                }
                for (auto& e : incident) {
                    if (auto r = out.add_edge(std::move(e)); !r.ok()) {
                        return Result<MergeResult>(r.error());
                    }
                }
            }
        }
    }

    // Edges: match by (source endpoint, target endpoint, kind); a's tag wins.
    std::map<std::tuple<Endpoint, Endpoint, EdgeKind>, std::string> by_connection;
    for (const auto& [tag, e] : out.edges()) {
        by_connection[{e.source, e.target, e.kind}] = tag;
    }
    for (const auto& [tag, be] : b.edges()) {
        auto it = by_connection.find({be.source, be.target, be.kind});
        if (it == by_connection.end()) {
            if (out.find_edge(tag)) {
                return Result<MergeResult>(make_error(
                    Errc::DuplicateTag, tag,
                    "edge tag '" + tag + "' names different connections in the two sources"));
            }
            if (auto r = out.add_edge(be); !r.ok()) {
                return Result<MergeResult>(r.error());
            }
            by_connection[{be.source, be.target, be.kind}] = tag;
            continue;
        }
        const std::string& matched = it->second;
        AttrMap merged = out.find_edge(matched)->attrs;
        merge_attrs(merged, be.attrs, matched, pol, conflicts);
        for (const auto& [key, v] : merged) {
            if (auto r = out.set_edge_attr(matched, key, v); !r.ok()) {
                return Result<MergeResult>(r.error());
            }
        }
    }

    // Meta: a's entries win, b fills the gaps.
    for (const auto& [key, v] : b.meta()) {
        out.meta().emplace(key, v);
    }

    return MergeResult{std::move(out), std::move(conflicts)};
}

}  // namespace twingraph
