#include "twingraph/validate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "json_detail.hpp"

namespace twingraph {

const char* severity_name(Severity s) {
    switch (s) {
        case Severity::Error: return "error";
        case Severity::Warning: return "warning";
        case Severity::Info: return "info";
    }
    return "info";
}

std::size_t ValidationReport::count(Severity s) const {
    return std::count_if(findings.begin(), findings.end(),
                         [&](const Finding& f) { return f.severity == s; });
}

std::size_t ValidationReport::count(const std::string& check_id) const {
    return std::count_if(findings.begin(), findings.end(),
                         [&](const Finding& f) { return f.check_id == check_id; });
}

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) {
            out += sep;
        }
        out += items[i];
    }
    return out;
}

bool canonical_numeric_key(const std::string& key) {
    return key == "volume" || key == "max_flow" || key == "flow" || key == "diameter" ||
           key == "length" || key.rfind("split.", 0) == 0;
}

// Weakly connected components over all edges; returns sorted member lists.
std::vector<std::vector<std::string>> components(const ProcessGraph& g) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& [tag, e] : g.edges()) {
        adj[e.source.node_tag].push_back(e.target.node_tag);
        adj[e.target.node_tag].push_back(e.source.node_tag);
    }
    std::set<std::string> seen;
    std::vector<std::vector<std::string>> out;
    for (const auto& [tag, n] : g.nodes()) {
        if (seen.count(tag)) {
            continue;
        }
        std::vector<std::string> members;
        std::vector<std::string> stack{tag};
        seen.insert(tag);
        while (!stack.empty()) {
            std::string cur = stack.back();
            stack.pop_back();
            members.push_back(cur);
            for (const auto& next : adj[cur]) {
                if (seen.insert(next).second) {
                    stack.push_back(next);
                }
            }
        }
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;
}

void check_connectivity(const ProcessGraph& g, std::vector<Finding>& findings) {
    for (const auto& comp : components(g)) {
        bool has_source = false;
        bool has_sink = false;
        bool has_checked_node = false;
        for (const auto& tag : comp) {
            KindTag kind = g.find_node(tag)->kind.tag;
            has_source |= kind == KindTag::Source;
            has_sink |= kind == KindTag::Sink;
            has_checked_node |= kind != KindTag::Controller;
        }
        if (has_source && has_sink) {
            continue;
        }
        if (!has_checked_node) {
            continue;  // controllers on their own are allowed
        }
        std::string lacking = !has_source && !has_sink ? "a source and a sink"
                              : !has_source            ? "a source"
                                                       : "a sink";
        findings.push_back({"C1", Severity::Error, comp.front(),
                            "component {" + join(comp, ", ") + "} lacks " + lacking});
    }
}

struct PortRule {
    unsigned min_in, max_in, min_out, max_out;
};

void check_ports(const ProcessGraph& g, std::vector<Finding>& findings) {
    constexpr unsigned many = 1000000;
    for (const auto& [tag, n] : g.nodes()) {
        if (n.kind.tag == KindTag::Other) {
            findings.push_back({"C2", Severity::Info, tag,
                                "kind '" + kind_to_string(n.kind) +
                                    "' is exempt from port cardinality checks"});
            continue;
        }
        PortRule rule{};
        switch (n.kind.tag) {
            case KindTag::Source: rule = {0, 0, 1, 1}; break;
            case KindTag::Sink: rule = {1, 1, 0, 0}; break;
            case KindTag::Pump:
            case KindTag::Valve:
            case KindTag::Instrument:
            case KindTag::Stream: rule = {1, 1, 1, 1}; break;
            case KindTag::Tank:
            case KindTag::HeatExchanger: rule = {1, many, 1, many}; break;
            case KindTag::Mixer: rule = {2, many, 1, 1}; break;
            case KindTag::Splitter: rule = {1, 1, 2, many}; break;
            case KindTag::Controller: rule = {0, 0, 0, 0}; break;
            case KindTag::Other: break;
        }
        unsigned ins = 0;
        unsigned outs = 0;
        for (const auto& z : n.nozzles) {
            (z.direction == NozzleDirection::Inlet ? ins : outs) += 1;
        }
        if (ins < rule.min_in || ins > rule.max_in || outs < rule.min_out ||
            outs > rule.max_out) {
            auto bound = [&](unsigned lo, unsigned hi) {
                if (lo == hi) {
                    return std::to_string(lo);
                }
                return ">=" + std::to_string(lo);
            };
            findings.push_back(
                {"C2", Severity::Error, tag,
                 kind_to_string(n.kind) + " expects " + bound(rule.min_in, rule.max_in) +
                     " inlet(s) and " + bound(rule.min_out, rule.max_out) + " outlet(s), has " +
                     std::to_string(ins) + "/" + std::to_string(outs)});
        }
        std::vector<std::string> unconnected;
        for (const auto& z : n.nozzles) {
            if (!g.edge_at_nozzle(tag, z.id)) {
                unconnected.push_back(z.id);
            }
        }
        if (!unconnected.empty()) {
            findings.push_back({"C2", Severity::Warning, tag,
                                "declared nozzles without a pipe: " + join(unconnected, ", ")});
        }
    }
}

void check_dangling(const ProcessGraph& g, std::vector<Finding>& findings) {
    for (const auto& [tag, n] : g.nodes()) {
        if (g.edges_at(tag).empty()) {
            findings.push_back({"C3", Severity::Warning, tag, "node has no connections"});
        }
        if (n.kind.tag == KindTag::Other) {
            continue;  // exempt, as in C2
        }
        for (const auto& z : n.nozzles) {
            if (!g.edge_at_nozzle(tag, z.id)) {
                findings.push_back(
                    {"C3", Severity::Warning, tag, "nozzle '" + z.id + "' is unconnected"});
            }
        }
    }
}

void check_attrs(const ProcessGraph& g, const FidelityProfile& p,
                 std::vector<Finding>& findings) {
    for (const auto& [tag, n] : g.nodes()) {
        auto req = p.required_attrs.find(n.kind.tag);
        if (req == p.required_attrs.end()) {
            continue;
        }
        for (const auto& key : req->second) {
            auto it = n.attrs.find(key);
            if (it == n.attrs.end()) {
                findings.push_back({"C4", Severity::Error, tag,
                                    "missing required attribute '" + key + "'"});
                continue;
            }
            if (it->second.is_number()) {
                if (it->second.number() <= 0) {
                    findings.push_back({"C4", Severity::Error, tag,
                                        "attribute '" + key + "' must be positive (is " +
                                            detail::format_double(it->second.number()) + ")"});
                }
            } else if (canonical_numeric_key(key)) {
                findings.push_back({"C4", Severity::Error, tag,
                                    "attribute '" + key + "' must be a number"});
            }
        }
    }
}

void check_splitters(const ProcessGraph& g, std::vector<Finding>& findings) {
    for (const auto& [tag, n] : g.nodes()) {
        if (n.kind.tag != KindTag::Splitter) {
            continue;
        }
        std::set<std::string> outlets;
        for (const auto& z : n.nozzles) {
            if (z.direction == NozzleDirection::Outlet) {
                outlets.insert(z.id);
            }
        }
        bool complete = true;
        double sum = 0;
        for (const auto& id : outlets) {
            auto it = n.attrs.find("split." + id);
            if (it == n.attrs.end()) {
                findings.push_back({"C5", Severity::Error, tag,
                                    "missing split fraction for outlet '" + id + "'"});
                complete = false;
            } else if (!it->second.is_number()) {
                findings.push_back({"C5", Severity::Error, tag,
                                    "split fraction for outlet '" + id + "' must be a number"});
                complete = false;
            } else {
                sum += it->second.number();
            }
        }
        for (const auto& [key, v] : n.attrs) {
            if (key.rfind("split.", 0) == 0 && !outlets.count(key.substr(6))) {
                findings.push_back({"C5", Severity::Error, tag,
                                    "split fraction names unknown outlet '" + key.substr(6) +
                                        "'"});
                complete = false;
            }
        }
        if (complete && std::abs(sum - 1.0) > 1e-9) {
            findings.push_back({"C5", Severity::Error, tag,
                                "split fractions sum to " + detail::format_double(sum) +
                                    ", expected 1"});
        }
    }
}

// Tarjan strongly connected components over one edge kind.
std::vector<std::vector<std::string>> cyclic_components(const ProcessGraph& g, EdgeKind kind) {
    std::map<std::string, std::vector<std::string>> adj;
    std::set<std::pair<std::string, std::string>> self_loops;
    for (const auto& [tag, e] : g.edges()) {
        if (e.kind != kind) {
            continue;
        }
        adj[e.source.node_tag].push_back(e.target.node_tag);
        if (e.source.node_tag == e.target.node_tag) {
            self_loops.insert({e.source.node_tag, tag});
        }
    }
    std::map<std::string, int> index, low;
    std::set<std::string> on_stack;
    std::vector<std::string> stack;
    std::vector<std::vector<std::string>> sccs;
    int counter = 0;

    std::function<void(const std::string&)> strongconnect = [&](const std::string& v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack.insert(v);
        for (const auto& w : adj[v]) {
            if (!index.count(w)) {
                strongconnect(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack.count(w)) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::string> scc;
            for (;;) {
                std::string w = stack.back();
                stack.pop_back();
                on_stack.erase(w);
                scc.push_back(w);
                if (w == v) {
                    break;
                }
            }
            bool cyclic = scc.size() > 1;
            if (!cyclic) {
                for (const auto& [node, edge] : self_loops) {
                    cyclic |= node == scc.front();
                }
            }
            if (cyclic) {
                std::sort(scc.begin(), scc.end());
                sccs.push_back(std::move(scc));
            }
        }
    };
    for (const auto& [tag, n] : g.nodes()) {
        if (!index.count(tag)) {
            strongconnect(tag);
        }
    }
    return sccs;
}

void check_cycles(const ProcessGraph& g, std::vector<Finding>& findings) {
    for (const auto& scc : cyclic_components(g, EdgeKind::ProcessFlow)) {
        findings.push_back({"C6", Severity::Info, scc.front(),
                            "recycle loop: " + join(scc, ", ")});
    }
    for (const auto& scc : cyclic_components(g, EdgeKind::Signal)) {
        findings.push_back({"C6", Severity::Info, scc.front(),
                            "control loop: " + join(scc, ", ")});
    }
}

}  // namespace

ValidationReport validate(const ProcessGraph& g, const FidelityProfile& p) {
    ValidationReport report;
    check_connectivity(g, report.findings);
    check_ports(g, report.findings);
    check_dangling(g, report.findings);
    check_attrs(g, p, report.findings);
    check_splitters(g, report.findings);
    check_cycles(g, report.findings);
    std::sort(report.findings.begin(), report.findings.end(),
              [](const Finding& a, const Finding& b) {
                  return std::tie(a.check_id, a.subject, a.message) <
                         std::tie(b.check_id, b.subject, b.message);
              });
    report.passed = report.count(Severity::Error) == 0;
    return report;
}

std::string report_to_json(const ValidationReport& report) {
    nlohmann::json findings = nlohmann::json::array();
    for (const auto& f : report.findings) {
        nlohmann::json j;
        j["check_id"] = f.check_id;
        j["severity"] = severity_name(f.severity);
        j["subject"] = f.subject;
        j["message"] = f.message;
        findings.push_back(std::move(j));
    }
    nlohmann::json root;
    root["passed"] = report.passed;
    root["findings"] = std::move(findings);
    return detail::canonical_dump(root);
}

}  // namespace twingraph
