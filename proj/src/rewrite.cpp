#include <set>

#include "json_detail.hpp"
#include "twingraph/transform.hpp"

namespace twingraph {

const char* rewrite_action_name(RewriteAction a) {
    switch (a) {
        case RewriteAction::AddedNode: return "added_node";
        case RewriteAction::AddedEdge: return "added_edge";
        case RewriteAction::RemovedEdge: return "removed_edge";
        case RewriteAction::SetAttr: return "set_attr";
    }
    return "unknown";
}

std::string rewrite_log_to_json(const RewriteLog& log) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : log.entries) {
        nlohmann::json j;
        j["rule"] = e.rule_id;
        j["action"] = rewrite_action_name(e.action);
        j["subject"] = e.subject;
        j["detail"] = e.detail;
        entries.push_back(std::move(j));
    }
    nlohmann::json root;
    root["entries"] = std::move(entries);
    return detail::canonical_dump(root);
}

namespace {

struct Rewriter {
    ProcessGraph graph;
    RewriteLog log;

    Result<void> add_node(const std::string& rule_id, Node n) {
        std::string payload = detail::canonical_dump(detail::node_to_json(n));
        std::string tag = n.tag;
        if (auto r = graph.add_node(std::move(n)); !r.ok()) {
            return r.error();
        }
        log.entries.push_back({rule_id, RewriteAction::AddedNode, tag, std::move(payload)});
        return {};
    }

    Result<void> add_edge(const std::string& rule_id, Edge e) {
        std::string payload = detail::canonical_dump(detail::edge_to_json(e));
        std::string tag = e.tag;
        if (auto r = graph.add_edge(std::move(e)); !r.ok()) {
            return r.error();
        }
        log.entries.push_back({rule_id, RewriteAction::AddedEdge, tag, std::move(payload)});
        return {};
    }

    Result<void> remove_edge(const std::string& rule_id, const std::string& tag) {
        if (auto r = graph.remove_edge(tag); !r.ok()) {
            return r.error();
        }
        log.entries.push_back({rule_id, RewriteAction::RemovedEdge, tag, ""});
        return {};
    }

    Result<void> set_attr(const std::string& rule_id, bool on_node, const std::string& tag,
                          const std::string& key, const AttrValue& v) {
        nlohmann::json j;
        j["element"] = on_node ? "node" : "edge";
        j["key"] = key;
        j["value"] = detail::attr_to_json(v);
        auto r = on_node ? graph.set_node_attr(tag, key, v) : graph.set_edge_attr(tag, key, v);
        if (!r.ok()) {
            return r.error();
        }
        log.entries.push_back({rule_id, RewriteAction::SetAttr, tag, detail::canonical_dump(j)});
        return {};
    }
};

Result<void> collision(const Rewriter& rw, const std::string& tag, bool node) {
    if (node ? rw.graph.find_node(tag) != nullptr : rw.graph.find_edge(tag) != nullptr) {
        return make_error(Errc::TagCollision, tag,
                          std::string("generated ") + (node ? "node" : "edge") + " tag '" + tag +
                              "' already present");
    }
    return {};
}

Result<void> insert_stream_nodes(Rewriter& rw, const Rule& rule) {
    std::vector<std::string> pipes;
    for (const auto& [tag, e] : rw.graph.edges()) {
        if (e.kind == EdgeKind::ProcessFlow) {
            pipes.push_back(tag);
        }
    }
    for (const auto& tag : pipes) {
        Edge original = *rw.graph.find_edge(tag);
        std::string stream_tag = "S@" + tag;
        std::string a_tag = tag + ".a";
        std::string b_tag = tag + ".b";
        if (auto r = collision(rw, stream_tag, true); !r.ok()) {
            return r;
        }
        for (const auto& etag : {a_tag, b_tag}) {
            if (auto r = collision(rw, etag, false); !r.ok()) {
                return r;
            }
        }
        Node stream;
        stream.tag = stream_tag;
        stream.kind = NodeKind(KindTag::Stream);
        stream.nozzles = {{"in1", NozzleDirection::Inlet, 0},
                          {"out1", NozzleDirection::Outlet, 0}};
        stream.attrs = original.attrs;
        if (auto r = rw.add_node(rule.id, std::move(stream)); !r.ok()) {
            return r;
        }
        if (auto r = rw.remove_edge(rule.id, tag); !r.ok()) {
            return r;
        }
        Edge a{a_tag, EdgeKind::ProcessFlow, original.source, {stream_tag, "in1"},
               original.attrs};
        Edge b{b_tag, EdgeKind::ProcessFlow, {stream_tag, "out1"}, original.target,
               original.attrs};
        if (auto r = rw.add_edge(rule.id, std::move(a)); !r.ok()) {
            return r;
        }
        if (auto r = rw.add_edge(rule.id, std::move(b)); !r.ok()) {
            return r;
        }
    }
    return {};
}

Result<void> reify_nozzles(Rewriter& rw, const Rule& rule) {
    std::vector<std::string> pipes;
    for (const auto& [tag, e] : rw.graph.edges()) {
        if (e.kind == EdgeKind::ProcessFlow) {
            pipes.push_back(tag);
        }
    }
    std::vector<std::string> element_tags;
    for (const auto& [tag, n] : rw.graph.nodes()) {
        element_tags.push_back(tag);
    }

    std::map<std::string, Edge> originals;
    for (const auto& tag : pipes) {
        originals.emplace(tag, *rw.graph.find_edge(tag));
    }
    for (const auto& tag : pipes) {
        if (auto r = rw.remove_edge(rule.id, tag); !r.ok()) {
            return r;
        }
    }

    for (const auto& tag : element_tags) {
        const Node node = *rw.graph.find_node(tag);
        for (const auto& z : node.nozzles) {
            std::string reified_tag = tag + "." + z.id;
            std::string link_tag = reified_tag + ".link";
            if (auto r = collision(rw, reified_tag, true); !r.ok()) {
                return r;
            }
            if (auto r = collision(rw, link_tag, false); !r.ok()) {
                return r;
            }
            Node reified;
            reified.tag = reified_tag;
            reified.kind = NodeKind::other("nozzle");
            reified.nozzles = {{"in1", NozzleDirection::Inlet, 0},
                               {"out1", NozzleDirection::Outlet, 0}};
            if (auto r = rw.add_node(rule.id, std::move(reified)); !r.ok()) {
                return r;
            }
            Edge link;
            link.tag = link_tag;
            link.kind = EdgeKind::ProcessFlow;
            if (z.direction == NozzleDirection::Outlet) {
                link.source = {tag, z.id};
                link.target = {reified_tag, "in1"};
            } else {
                link.source = {reified_tag, "out1"};
                link.target = {tag, z.id};
            }
            if (auto r = rw.add_edge(rule.id, std::move(link)); !r.ok()) {
                return r;
            }
        }
    }

    for (const auto& [tag, original] : originals) {
        Edge rerouted = original;
        rerouted.source = {original.source.node_tag + "." + original.source.nozzle_id, "out1"};
        rerouted.target = {original.target.node_tag + "." + original.target.nozzle_id, "in1"};
        if (auto r = rw.add_edge(rule.id, std::move(rerouted)); !r.ok()) {
            return r;
        }
    }
    return {};
}

Result<void> require_attr_default(Rewriter& rw, const Rule& rule) {
    auto edge_kind = edge_kind_from_string(rule.target);
    if (edge_kind) {
        std::vector<std::string> tags;
        for (const auto& [tag, e] : rw.graph.edges()) {
            if (e.kind == *edge_kind && !e.attrs.count(rule.key)) {
                tags.push_back(tag);
            }
        }
        for (const auto& tag : tags) {
            if (auto r = rw.set_attr(rule.id, false, tag, rule.key, rule.value); !r.ok()) {
                return r;
            }
        }
        return {};
    }
    auto kind_tag = kind_tag_from_string(rule.target);
    if (!kind_tag) {
        return make_error(Errc::BadRuleSet, rule.id,
                          "unknown rule target '" + rule.target + "'");
    }
    std::vector<std::string> tags;
    for (const auto& [tag, n] : rw.graph.nodes()) {
        if (n.kind.tag == *kind_tag && !n.attrs.count(rule.key)) {
            tags.push_back(tag);
        }
    }
    for (const auto& tag : tags) {
        if (auto r = rw.set_attr(rule.id, true, tag, rule.key, rule.value); !r.ok()) {
            return r;
        }
    }
    return {};
}

}  // namespace

Result<RewriteResult> apply_ruleset(const ProcessGraph& g, const RuleSet& rs) {
    if (rs.simulator_name.empty()) {
        return Result<RewriteResult>(
            make_error(Errc::BadRuleSet, "", "rule set needs a simulator name"));
    }
    std::set<std::string> ids;
    for (const auto& rule : rs.rules) {
        if (rule.id.empty() || !ids.insert(rule.id).second) {
            return Result<RewriteResult>(
                make_error(Errc::BadRuleSet, rule.id, "rule ids must be unique and nonempty"));
        }
    }
    Rewriter rw{g, {}};
    for (const auto& rule : rs.rules) {
        Result<void> r = [&]() -> Result<void> {
            switch (rule.kind) {
                case RuleKind::InsertStreamNodes: return insert_stream_nodes(rw, rule);
                case RuleKind::ReifyNozzles: return reify_nozzles(rw, rule);
                case RuleKind::RequireAttrDefault: return require_attr_default(rw, rule);
            }
            return make_error(Errc::BadRuleSet, rule.id, "unknown rule kind");
        }();
        if (!r.ok()) {
            return Result<RewriteResult>(r.error());
        }
    }
    return RewriteResult{std::move(rw.graph), std::move(rw.log)};
}

namespace {

Result<Node> node_from_payload(const std::string& payload) {
    nlohmann::json j = nlohmann::json::parse(payload, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        return Result<Node>(make_error(Errc::Precondition, "", "unreadable node payload"));
    }
    Node n;
    n.tag = j.value("tag", "");
    auto kind = kind_from_string(j.value("kind", ""));
    if (!kind) {
        return Result<Node>(make_error(Errc::Precondition, n.tag, "unreadable node kind"));
    }
    n.kind = *kind;
    if (j.contains("position")) {
        Position pos;
        pos.frame = j["position"].value("frame", "") == "plant_m" ? CoordFrame::PlantM
                                                                  : CoordFrame::DocumentMM;
        for (const auto& c : j["position"]["coords"]) {
            pos.coords.push_back(c.get<double>());
        }
        n.position = std::move(pos);
    }
    for (const auto& jz : j["nozzles"]) {
        Nozzle z;
        z.id = jz.value("id", "");
        z.direction = jz.value("direction", "") == "outlet" ? NozzleDirection::Outlet
                                                            : NozzleDirection::Inlet;
        z.ordinal = jz.value("ordinal", 0u);
        n.nozzles.push_back(std::move(z));
    }
    for (auto it = j["attrs"].begin(); it != j["attrs"].end(); ++it) {
        const auto& v = it.value();
        n.attrs[it.key()] = v.is_boolean() ? AttrValue(v.get<bool>())
                            : v.is_number() ? AttrValue(v.get<double>())
                                            : AttrValue(v.get<std::string>());
    }
    return n;
}

Result<Edge> edge_from_payload(const std::string& payload) {
    nlohmann::json j = nlohmann::json::parse(payload, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        return Result<Edge>(make_error(Errc::Precondition, "", "unreadable edge payload"));
    }
    Edge e;
    e.tag = j.value("tag", "");
    auto kind = edge_kind_from_string(j.value("kind", ""));
    if (!kind) {
        return Result<Edge>(make_error(Errc::Precondition, e.tag, "unreadable edge kind"));
    }
    e.kind = *kind;
    e.source = {j["source"].value("node", ""), j["source"].value("nozzle", "")};
    e.target = {j["target"].value("node", ""), j["target"].value("nozzle", "")};
    for (auto it = j["attrs"].begin(); it != j["attrs"].end(); ++it) {
        const auto& v = it.value();
        e.attrs[it.key()] = v.is_boolean() ? AttrValue(v.get<bool>())
                            : v.is_number() ? AttrValue(v.get<double>())
                                            : AttrValue(v.get<std::string>());
    }
    return e;
}

}  // namespace

Result<ProcessGraph> replay_log(const ProcessGraph& g, const RewriteLog& log) {
    ProcessGraph out = g;
    for (const auto& entry : log.entries) {
        switch (entry.action) {
            case RewriteAction::AddedNode: {
                auto n = node_from_payload(entry.detail);
                if (!n.ok()) {
                    return Result<ProcessGraph>(n.error());
                }
                if (auto r = out.add_node(std::move(n).value()); !r.ok()) {
                    return Result<ProcessGraph>(r.error());
                }
                break;
            }
            case RewriteAction::AddedEdge: {
                auto e = edge_from_payload(entry.detail);
                if (!e.ok()) {
                    return Result<ProcessGraph>(e.error());
                }
                if (auto r = out.add_edge(std::move(e).value()); !r.ok()) {
                    return Result<ProcessGraph>(r.error());
                }
                break;
            }
            case RewriteAction::RemovedEdge: {
                if (auto r = out.remove_edge(entry.subject); !r.ok()) {
                    return Result<ProcessGraph>(r.error());
                }
                break;
            }
            case RewriteAction::SetAttr: {
                nlohmann::json j = nlohmann::json::parse(entry.detail, nullptr, false);
                if (j.is_discarded() || !j.is_object()) {
                    return Result<ProcessGraph>(
                        make_error(Errc::Precondition, entry.subject, "unreadable attr payload"));
                }
                const auto& v = j["value"];
                AttrValue value = v.is_boolean() ? AttrValue(v.get<bool>())
                                  : v.is_number() ? AttrValue(v.get<double>())
                                                  : AttrValue(v.get<std::string>());
                std::string key = j.value("key", "");
                auto r = j.value("element", "") == "node"
                             ? out.set_node_attr(entry.subject, key, value)
                             : out.set_edge_attr(entry.subject, key, value);
                if (!r.ok()) {
                    return Result<ProcessGraph>(r.error());
                }
                break;
            }
        }
    }
    return out;
}

}  // namespace twingraph
