#include <cmath>

#include <json.hpp>

#include "twingraph/ingest.hpp"

namespace twingraph {

namespace {

using nlohmann::json;

struct SchemaCheck {
    std::vector<SchemaError> errors;

    void add(std::string path, std::string message) {
        errors.push_back({std::move(path), std::move(message)});
    }

    bool require_keys(const json& obj, const std::string& path,
                      const std::vector<std::string>& required,
                      const std::vector<std::string>& optional) {
        bool ok = true;
        for (const auto& key : required) {
            if (!obj.contains(key)) {
                add(path + "/" + key, "missing required key");
                ok = false;
            }
        }
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            const std::string& key = it.key();
            bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                         std::find(optional.begin(), optional.end(), key) != optional.end();
            if (!known) {
                add(path + "/" + key, "unknown key");
                ok = false;
            }
        }
        return ok;
    }
};

std::optional<AttrValue> attr_from_json(const json& v) {
    if (v.is_number()) {
        double d = v.get<double>();
        if (!std::isfinite(d)) {
            return std::nullopt;
        }
        return AttrValue(d);
    }
    if (v.is_boolean()) {
        return AttrValue(v.get<bool>());
    }
    if (v.is_string()) {
        return AttrValue(v.get<std::string>());
    }
    return std::nullopt;
}

bool read_attrs(const json& obj, const std::string& path, AttrMap& attrs, SchemaCheck& sc) {
    if (!obj.is_object()) {
        sc.add(path, "attrs must be an object");
        return false;
    }
    bool ok = true;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        auto v = attr_from_json(it.value());
        if (!v) {
            sc.add(path + "/" + it.key(), "attribute must be a finite number, string or boolean");
            ok = false;
            continue;
        }
        attrs.emplace(it.key(), std::move(*v));
    }
    return ok;
}

std::optional<Endpoint> read_endpoint(const json& v, const std::string& path, bool is_process,
                                      SchemaCheck& sc) {
    if (!v.is_object()) {
        sc.add(path, "endpoint must be an object");
        return std::nullopt;
    }
    json copy = v;
    if (!sc.require_keys(copy, path, {"node"}, {"nozzle"})) {
        return std::nullopt;
    }
    if (!copy["node"].is_string()) {
        sc.add(path + "/node", "node tag must be a string");
        return std::nullopt;
    }
    Endpoint ep;
    ep.node_tag = copy["node"].get<std::string>();
    if (copy.contains("nozzle")) {
        if (!copy["nozzle"].is_string()) {
            sc.add(path + "/nozzle", "nozzle id must be a string");
            return std::nullopt;
        }
        ep.nozzle_id = copy["nozzle"].get<std::string>();
    }
    if (is_process && ep.nozzle_id.empty()) {
        sc.add(path, "process endpoints need a nozzle");
        return std::nullopt;
    }
    return ep;
}

}  // namespace

Result<ProcessGraph, std::vector<SchemaError>> parse_graph_json(const SourceDoc& doc) {
    SchemaCheck sc;
    json root = json::parse(doc.content, nullptr, false);
    if (root.is_discarded()) {
        sc.add("", "not valid JSON");
        return sc.errors;
    }
    if (!root.is_object()) {
        sc.add("", "top level must be an object");
        return sc.errors;
    }
    if (!sc.require_keys(root, "", {"format_version", "meta", "nodes", "edges"}, {})) {
        return sc.errors;
    }
    if (!root["format_version"].is_string() || root["format_version"].get<std::string>() != "1") {
        sc.add("/format_version", "unsupported format version (expected \"1\")");
        return sc.errors;
    }

    std::map<std::string, std::string> meta;
    if (!root["meta"].is_object()) {
        sc.add("/meta", "meta must be an object of strings");
    } else {
        for (auto it = root["meta"].begin(); it != root["meta"].end(); ++it) {
            if (!it.value().is_string()) {
                sc.add("/meta/" + it.key(), "meta values must be strings");
            } else {
                meta[it.key()] = it.value().get<std::string>();
            }
        }
    }
    ProcessGraph graph{std::move(meta)};

    if (!root["nodes"].is_array()) {
        sc.add("/nodes", "nodes must be an array");
        return sc.errors;
    }
    if (!root["edges"].is_array()) {
        sc.add("/edges", "edges must be an array");
        return sc.errors;
    }

    std::size_t idx = 0;
    for (const json& jn : root["nodes"]) {
        std::string path = "/nodes/" + std::to_string(idx++);
        if (!jn.is_object()) {
            sc.add(path, "node must be an object");
            continue;
        }
        if (!sc.require_keys(jn, path, {"tag", "kind", "nozzles", "attrs"}, {"position"})) {
            continue;
        }
        if (!jn["tag"].is_string() || !jn["kind"].is_string()) {
            sc.add(path, "tag and kind must be strings");
            continue;
        }
        Node n;
        n.tag = jn["tag"].get<std::string>();
        auto kind = kind_from_string(jn["kind"].get<std::string>());
        if (!kind) {
            sc.add(path + "/kind", "unknown kind '" + jn["kind"].get<std::string>() + "'");
            continue;
        }
        n.kind = *kind;
        if (jn.contains("position")) {
            const json& jp = jn["position"];
            if (!jp.is_object() || !sc.require_keys(jp, path + "/position", {"frame", "coords"},
                                                    {})) {
                continue;
            }
            Position pos;
            std::string frame = jp["frame"].is_string() ? jp["frame"].get<std::string>() : "";
            if (frame == "document_mm") {
                pos.frame = CoordFrame::DocumentMM;
            } else if (frame == "plant_m") {
                pos.frame = CoordFrame::PlantM;
            } else {
                sc.add(path + "/position/frame", "frame must be document_mm or plant_m");
                continue;
            }
            if (!jp["coords"].is_array() ||
                (jp["coords"].size() != 2 && jp["coords"].size() != 3)) {
                sc.add(path + "/position/coords", "coords must hold 2 or 3 numbers");
                continue;
            }
            bool ok = true;
            for (const json& c : jp["coords"]) {
                if (!c.is_number() || !std::isfinite(c.get<double>())) {
                    sc.add(path + "/position/coords", "coords must hold finite numbers");
                    ok = false;
                    break;
                }
                pos.coords.push_back(c.get<double>());
            }
            if (!ok) {
                continue;
            }
            n.position = std::move(pos);
        }
        if (!jn["nozzles"].is_array()) {
            sc.add(path + "/nozzles", "nozzles must be an array");
            continue;
        }
        bool ok = true;
        std::size_t zi = 0;
        for (const json& jz : jn["nozzles"]) {
            std::string zpath = path + "/nozzles/" + std::to_string(zi++);
            if (!jz.is_object() ||
                !sc.require_keys(jz, zpath, {"id", "direction", "ordinal"}, {})) {
                ok = false;
                break;
            }
            Nozzle z;
            if (!jz["id"].is_string() || jz["id"].get<std::string>().empty()) {
                sc.add(zpath + "/id", "nozzle id must be a nonempty string");
                ok = false;
                break;
            }
            z.id = jz["id"].get<std::string>();
            std::string dir = jz["direction"].is_string() ? jz["direction"].get<std::string>()
                                                          : "";
            if (dir == "inlet") {
                z.direction = NozzleDirection::Inlet;
            } else if (dir == "outlet") {
                z.direction = NozzleDirection::Outlet;
            } else {
                sc.add(zpath + "/direction", "direction must be inlet or outlet");
                ok = false;
                break;
            }
            if (!jz["ordinal"].is_number_unsigned()) {
                sc.add(zpath + "/ordinal", "ordinal must be a nonnegative integer");
                ok = false;
                break;
            }
            z.ordinal = jz["ordinal"].get<unsigned>();
            n.nozzles.push_back(std::move(z));
        }
        if (!ok || !read_attrs(jn["attrs"], path + "/attrs", n.attrs, sc)) {
            continue;
        }
        if (auto r = graph.add_node(std::move(n)); !r.ok()) {
            sc.add(path, r.error().message);
        }
    }

    idx = 0;
    for (const json& je : root["edges"]) {
        std::string path = "/edges/" + std::to_string(idx++);
        if (!je.is_object()) {
            sc.add(path, "edge must be an object");
            continue;
        }
        if (!sc.require_keys(je, path, {"tag", "kind", "source", "target", "attrs"}, {})) {
            continue;
        }
        if (!je["tag"].is_string() || !je["kind"].is_string()) {
            sc.add(path, "tag and kind must be strings");
            continue;
        }
        Edge e;
        e.tag = je["tag"].get<std::string>();
        auto kind = edge_kind_from_string(je["kind"].get<std::string>());
        if (!kind) {
            sc.add(path + "/kind", "edge kind must be process or signal");
            continue;
        }
        e.kind = *kind;
        bool is_process = e.kind == EdgeKind::ProcessFlow;
        auto src = read_endpoint(je["source"], path + "/source", is_process, sc);
        auto dst = read_endpoint(je["target"], path + "/target", is_process, sc);
        if (!src || !dst) {
            continue;
        }
        e.source = std::move(*src);
        e.target = std::move(*dst);
        if (!read_attrs(je["attrs"], path + "/attrs", e.attrs, sc)) {
            continue;
        }
        if (auto r = graph.add_edge(std::move(e)); !r.ok()) {
            // referential failure: name the edge tag in the path
            sc.add(path, "edge '" + r.error().subject + "': " + r.error().message);
        }
    }

    if (!sc.errors.empty()) {
        return sc.errors;
    }
    return graph;
}

}  // namespace twingraph
