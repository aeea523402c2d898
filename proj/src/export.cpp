#include "twingraph/export.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "json_detail.hpp"

namespace twingraph {

namespace detail {

std::string format_double(double d) {
    if (d == 0.0) {
        d = 0.0;  // normalize -0
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    (void)ec;
    return std::string(buf, ptr);
}

namespace {

void escape_json_string(const std::string& s, std::string& out) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

void dump_value(const nlohmann::json& j, std::string& out) {
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) {
                    out += ',';
                }
                first = false;
                escape_json_string(it.key(), out);
                out += ':';
                dump_value(it.value(), out);
            }
            out += '}';
            break;
        }
        case nlohmann::json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) {
                    out += ',';
                }
                first = false;
                dump_value(v, out);
            }
            out += ']';
            break;
        }
        case nlohmann::json::value_t::string:
            escape_json_string(j.get<std::string>(), out);
            break;
        case nlohmann::json::value_t::boolean:
            out += j.get<bool>() ? "true" : "false";
            break;
        case nlohmann::json::value_t::number_integer:
            out += std::to_string(j.get<long long>());
            break;
        case nlohmann::json::value_t::number_unsigned:
            out += std::to_string(j.get<unsigned long long>());
            break;
        case nlohmann::json::value_t::number_float:
            out += format_double(j.get<double>());
            break;
        default:
            out += "null";
    }
}

}  // namespace

std::string canonical_dump(const nlohmann::json& j) {
    std::string out;
    dump_value(j, out);
    return out;
}

nlohmann::json attr_to_json(const AttrValue& v) {
    if (v.is_number()) {
        return v.number();
    }
    if (v.is_bool()) {
        return v.boolean();
    }
    return v.text();
}

nlohmann::json attrs_to_json(const AttrMap& attrs) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, v] : attrs) {
        j[key] = attr_to_json(v);
    }
    return j;
}

nlohmann::json node_to_json(const Node& n) {
    nlohmann::json j;
    j["tag"] = n.tag;
    j["kind"] = kind_to_string(n.kind);
    if (n.position) {
        nlohmann::json p;
        p["frame"] = coord_frame_name(n.position->frame);
        p["coords"] = n.position->coords;
        j["position"] = std::move(p);
    }
    nlohmann::json zs = nlohmann::json::array();
    for (const auto& z : n.nozzles) {
        nlohmann::json jz;
        jz["id"] = z.id;
        jz["direction"] = z.direction == NozzleDirection::Inlet ? "inlet" : "outlet";
        jz["ordinal"] = z.ordinal;
        zs.push_back(std::move(jz));
    }
    j["nozzles"] = std::move(zs);
    j["attrs"] = attrs_to_json(n.attrs);
    return j;
}

nlohmann::json edge_to_json(const Edge& e) {
    auto endpoint = [](const Endpoint& ep) {
        nlohmann::json j;
        j["node"] = ep.node_tag;
        if (!ep.nozzle_id.empty()) {
            j["nozzle"] = ep.nozzle_id;
        }
        return j;
    };
    nlohmann::json j;
    j["tag"] = e.tag;
    j["kind"] = edge_kind_name(e.kind);
    j["source"] = endpoint(e.source);
    j["target"] = endpoint(e.target);
    j["attrs"] = attrs_to_json(e.attrs);
    return j;
}

}  // namespace detail

std::string to_json(const ProcessGraph& g) {
    nlohmann::json root;
    root["format_version"] = "1";
    nlohmann::json meta = nlohmann::json::object();
    for (const auto& [k, v] : g.meta()) {
        meta[k] = v;
    }
    root["meta"] = std::move(meta);
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& [tag, n] : g.nodes()) {
        nodes.push_back(detail::node_to_json(n));
    }
    root["nodes"] = std::move(nodes);
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [tag, e] : g.edges()) {
        edges.push_back(detail::edge_to_json(e));
    }
    root["edges"] = std::move(edges);
    return detail::canonical_dump(root);
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string attr_to_text(const AttrValue& v) {
    if (v.is_number()) {
        return detail::format_double(v.number());
    }
    if (v.is_bool()) {
        return v.boolean() ? "true" : "false";
    }
    return v.text();
}

}  // namespace

std::string to_dot(const ProcessGraph& g) {
    std::string out = "digraph plant {\n";
    for (const auto& [tag, n] : g.nodes()) {
        out += "  \"" + dot_escape(tag) + "\" [label=\"" + dot_escape(tag) + "\\n" +
               dot_escape(kind_to_string(n.kind)) + "\"];\n";
    }
    for (const auto& [tag, e] : g.edges()) {
        out += "  \"" + dot_escape(e.source.node_tag) + "\" -> \"" +
               dot_escape(e.target.node_tag) + "\" [label=\"" + dot_escape(tag) + "\"";
        if (e.kind == EdgeKind::Signal) {
            out += ", style=dashed";
        }
        out += "];\n";
    }
    out += "}\n";
    return out;
}

std::string to_graphml(const ProcessGraph& g) {
    // Key declarations: fixed keys first, then attribute keys in sorted
    // order, typed double/boolean/string by what the values actually are.
    struct KeyDecl {
        std::string domain;  // "node" or "edge"
        std::string name;
        std::string type;
    };
    auto attr_type = [](const std::set<std::string>& types) {
        if (types.size() == 1) {
            return *types.begin();
        }
        return std::string("string");
    };
    std::map<std::string, std::set<std::string>> node_attr_types;
    std::map<std::string, std::set<std::string>> edge_attr_types;
    bool any_position = false;
    bool any_nozzle = false;
    auto node_builtin = [](const std::string& key) {
        return key == "kind" || key == "position";
    };
    auto edge_builtin = [](const std::string& key) {
        return key == "kind" || key == "source_nozzle" || key == "target_nozzle";
    };
    for (const auto& [tag, n] : g.nodes()) {
        if (n.position) {
            any_position = true;
        }
        for (const auto& [key, v] : n.attrs) {
            if (node_builtin(key)) {
                any_position |= key == "position";  // emitted under the built-in key
                continue;
            }
            node_attr_types[key].insert(v.is_number() ? "double"
                                        : v.is_bool() ? "boolean"
                                                      : "string");
        }
    }
    for (const auto& [tag, e] : g.edges()) {
        if (!e.source.nozzle_id.empty() || !e.target.nozzle_id.empty()) {
            any_nozzle = true;
        }
        for (const auto& [key, v] : e.attrs) {
            if (edge_builtin(key)) {
                any_nozzle |= key != "kind";
                continue;
            }
            edge_attr_types[key].insert(v.is_number() ? "double"
                                        : v.is_bool() ? "boolean"
                                                      : "string");
        }
    }

    std::vector<KeyDecl> decls;
    decls.push_back({"node", "kind", "string"});
    if (any_position) {
        decls.push_back({"node", "position", "string"});
    }
    for (const auto& [key, types] : node_attr_types) {
        decls.push_back({"node", key, attr_type(types)});
    }
    decls.push_back({"edge", "kind", "string"});
    if (any_nozzle) {
        decls.push_back({"edge", "source_nozzle", "string"});
        decls.push_back({"edge", "target_nozzle", "string"});
    }
    for (const auto& [key, types] : edge_attr_types) {
        decls.push_back({"edge", key, attr_type(types)});
    }

    std::map<std::pair<std::string, std::string>, std::string> key_id;
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
    for (std::size_t i = 0; i < decls.size(); ++i) {
        std::string id = "d" + std::to_string(i);
        key_id[{decls[i].domain, decls[i].name}] = id;
        out += "  <key id=\"" + id + "\" for=\"" + decls[i].domain + "\" attr.name=\"" +
               xml_escape(decls[i].name) + "\" attr.type=\"" + decls[i].type + "\"/>\n";
    }
    out += "  <graph id=\"G\" edgedefault=\"directed\">\n";
    auto data = [&](const std::string& domain, const std::string& name, const std::string& text) {
        return "      <data key=\"" + key_id.at({domain, name}) + "\">" + xml_escape(text) +
               "</data>\n";
    };
    for (const auto& [tag, n] : g.nodes()) {
        out += "    <node id=\"" + xml_escape(tag) + "\">\n";
        out += data("node", "kind", kind_to_string(n.kind));
        if (n.position) {
            std::string text = coord_frame_name(n.position->frame);
            for (double c : n.position->coords) {
                text += "," + detail::format_double(c);
            }
            out += data("node", "position", text);
        }
        for (const auto& [key, v] : n.attrs) {
            out += data("node", key, attr_to_text(v));
        }
        out += "    </node>\n";
    }
    for (const auto& [tag, e] : g.edges()) {
        out += "    <edge id=\"" + xml_escape(tag) + "\" source=\"" +
               xml_escape(e.source.node_tag) + "\" target=\"" + xml_escape(e.target.node_tag) +
               "\">\n";
        out += data("edge", "kind", edge_kind_name(e.kind));
        if (!e.source.nozzle_id.empty()) {
            out += data("edge", "source_nozzle", e.source.nozzle_id);
        }
        if (!e.target.nozzle_id.empty()) {
            out += data("edge", "target_nozzle", e.target.nozzle_id);
        }
        for (const auto& [key, v] : e.attrs) {
            out += data("edge", key, attr_to_text(v));
        }
        out += "    </edge>\n";
    }
    out += "  </graph>\n</graphml>\n";
    return out;
}

Result<SimSpec> to_simspec(const ProcessGraph& g, const std::string& simulator_name) {
    auto fidelity = g.meta().find("fidelity");
    if (fidelity == g.meta().end()) {
        return Result<SimSpec>(make_error(
            Errc::Precondition, "", "graph has no meta.fidelity; run the fidelity filter first"));
    }
    // Every pipe must be mediated by exactly one Stream endpoint.
    auto is_stream = [&](const std::string& tag) {
        const Node* n = g.find_node(tag);
        return n && n->kind.tag == KindTag::Stream;
    };
    for (const auto& [tag, e] : g.edges()) {
        if (e.kind != EdgeKind::ProcessFlow) {
            continue;
        }
        int streams = (is_stream(e.source.node_tag) ? 1 : 0) +
                      (is_stream(e.target.node_tag) ? 1 : 0);
        if (streams != 1) {
            return Result<SimSpec>(make_error(
                Errc::NotRewritten, tag,
                streams == 0 ? "pipe '" + tag + "' has no stream mediation; apply the "
                               "stream-insertion rule first"
                             : "pipe '" + tag + "' connects two stream nodes"));
        }
    }

    SimSpec spec;
    spec.simulator_name = simulator_name;
    spec.fidelity = fidelity->second;
    for (const auto& [tag, n] : g.nodes()) {
        if (n.kind.tag == KindTag::Stream) {
            const Edge* inbound = nullptr;
            const Edge* outbound = nullptr;
            int degree = 0;
            for (const Edge* e : g.edges_at(tag, EdgeKind::ProcessFlow)) {
                ++degree;
                if (e->target.node_tag == tag) {
                    inbound = e;
                } else {
                    outbound = e;
                }
            }
            if (degree != 2 || !inbound || !outbound) {
                return Result<SimSpec>(make_error(
                    Errc::NotRewritten, tag,
                    "stream node '" + tag + "' does not mediate exactly one pipe pair"));
            }
            spec.connections.push_back({inbound->source.node_tag, outbound->target.node_tag, tag});
        } else {
            spec.components.push_back({tag, n.kind, n.attrs});
        }
    }
    return spec;
}

std::string simspec_to_json(const SimSpec& spec) {
    nlohmann::json root;
    root["simulator_name"] = spec.simulator_name;
    root["fidelity"] = spec.fidelity;
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : spec.components) {
        nlohmann::json j;
        j["tag"] = c.tag;
        j["kind"] = kind_to_string(c.kind);
        j["params"] = detail::attrs_to_json(c.params);
        comps.push_back(std::move(j));
    }
    root["components"] = std::move(comps);
    nlohmann::json conns = nlohmann::json::array();
    for (const auto& c : spec.connections) {
        nlohmann::json j;
        j["from"] = c.from;
        j["to"] = c.to;
        j["stream"] = c.stream;
        conns.push_back(std::move(j));
    }
    root["connections"] = std::move(conns);
    return detail::canonical_dump(root);
}

}  // namespace twingraph
