// Shared fixtures, oracles and generators for the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "twingraph/export.hpp"
#include "twingraph/ingest.hpp"
#include "twingraph/transform.hpp"

namespace fixtures {

using namespace twingraph;

inline Node element(std::string tag, NodeKind kind, AttrMap attrs = {}) {
    Node n;
    n.tag = std::move(tag);
    n.kind = kind;
    n.nozzles = default_nozzles(n.kind);
    n.attrs = std::move(attrs);
    return n;
}

inline Edge pipe(std::string tag, std::string from_node, std::string from_nozzle,
                 std::string to_node, std::string to_nozzle, AttrMap attrs = {}) {
    Edge e;
    e.tag = std::move(tag);
    e.kind = EdgeKind::ProcessFlow;
    e.source = {std::move(from_node), std::move(from_nozzle)};
    e.target = {std::move(to_node), std::move(to_nozzle)};
    e.attrs = std::move(attrs);
    return e;
}

inline Edge signal(std::string tag, std::string from_node, std::string to_node) {
    Edge e;
    e.tag = std::move(tag);
    e.kind = EdgeKind::Signal;
    e.source = {std::move(from_node), ""};
    e.target = {std::move(to_node), ""};
    return e;
}

inline void must(const Result<void>& r) {
    if (!r.ok()) {
        throw std::runtime_error("fixture setup failed: " + r.error().to_string());
    }
}

/// source -> pump -> splitter -> two sinks; all attributes present.
inline ProcessGraph clean_plant() {
    ProcessGraph g{{{"source", "fixture"}}};
    must(g.add_node(element("S1", KindTag::Source, {{"flow", 10.0}})));
    must(g.add_node(element("P1", KindTag::Pump, {{"max_flow", 12.0}})));
    must(g.add_node(element("SP1", KindTag::Splitter,
                            {{"split.out1", 0.25}, {"split.out2", 0.75}})));
    must(g.add_node(element("K1", KindTag::Sink)));
    must(g.add_node(element("K2", KindTag::Sink)));
    must(g.add_edge(pipe("e1", "S1", "out1", "P1", "in1",
                         {{"material", "water"}, {"diameter", 0.08}})));
    must(g.add_edge(pipe("e2", "P1", "out1", "SP1", "in1",
                         {{"material", "water"}, {"diameter", 0.08}})));
    must(g.add_edge(pipe("e3", "SP1", "out1", "K1", "in1",
                         {{"material", "water"}, {"diameter", 0.05}})));
    must(g.add_edge(pipe("e4", "SP1", "out2", "K2", "in1",
                         {{"material", "water"}, {"diameter", 0.05}})));
    return g;
}

inline const char* clean_plant_pidl() {
    return "# demo plant: feed, pump, splitter, two product sinks\n"
           "node S1 type=source flow=10\n"
           "node P1 type=pump max_flow=12\n"
           "node SP1 type=splitter split.out1=0.25 split.out2=0.75\n"
           "node K1 type=sink\n"
           "node K2 type=sink\n"
           "pipe e1: S1.out1 -> P1.in1 material=water diameter=0.08\n"
           "pipe e2: P1.out1 -> SP1.in1 material=water diameter=0.08\n"
           "pipe e3: SP1.out1 -> K1.in1 material=water diameter=0.05\n"
           "pipe e4: SP1.out2 -> K2.in1 material=water diameter=0.05\n";
}

/// source -> flow meter (in-line) -> pump -> valve -> sink, with a control
/// loop FT1 -> C1 -> V1 on signal edges.
inline ProcessGraph instrumented_plant() {
    ProcessGraph g{{{"source", "fixture"}}};
    must(g.add_node(element("S1", KindTag::Source, {{"flow", 10.0}})));
    must(g.add_node(element("FT1", KindTag::Instrument)));
    must(g.add_node(element("P1", KindTag::Pump, {{"max_flow", 12.0}})));
    must(g.add_node(element("C1", KindTag::Controller)));
    must(g.add_node(element("V1", KindTag::Valve)));
    must(g.add_node(element("K1", KindTag::Sink)));
    must(g.add_edge(pipe("p1", "S1", "out1", "FT1", "in1",
                         {{"diameter", 0.08}, {"length", 2.0}})));
    must(g.add_edge(pipe("p2", "FT1", "out1", "P1", "in1", {{"length", 3.5}})));
    must(g.add_edge(pipe("p3", "P1", "out1", "V1", "in1", {{"diameter", 0.08}})));
    must(g.add_edge(pipe("p4", "V1", "out1", "K1", "in1", {{"diameter", 0.08}})));
    must(g.add_edge(signal("s1", "FT1", "C1")));
    must(g.add_edge(signal("s2", "C1", "V1")));
    return g;
}

/// source -> mixer -> pump -> tank -> splitter, with 20% recycled to the
/// mixer and 80% to the product sink. Pump max_flow 12 < through-flow 12.5.
inline ProcessGraph recycle_plant() {
    ProcessGraph g{{{"source", "fixture"}}};
    must(g.add_node(element("S1", KindTag::Source, {{"flow", 10.0}})));
    must(g.add_node(element("M1", KindTag::Mixer)));
    must(g.add_node(element("P1", KindTag::Pump, {{"max_flow", 12.0}})));
    must(g.add_node(element("R1", KindTag::Tank, {{"volume", 5.0}})));
    must(g.add_node(element("SP1", KindTag::Splitter,
                            {{"split.out1", 0.2}, {"split.out2", 0.8}})));
    must(g.add_node(element("K1", KindTag::Sink)));
    must(g.add_edge(pipe("e1", "S1", "out1", "M1", "in1")));
    must(g.add_edge(pipe("e2", "M1", "out1", "P1", "in1")));
    must(g.add_edge(pipe("e3", "P1", "out1", "R1", "in1")));
    must(g.add_edge(pipe("e4", "R1", "out1", "SP1", "in1")));
    must(g.add_edge(pipe("e5", "SP1", "out1", "M1", "in2")));
    must(g.add_edge(pipe("e6", "SP1", "out2", "K1", "in1")));
    return g;
}

/// 2D-style source: equipment data (volumes, capacities), no geometry.
inline ProcessGraph merge_plant_2d() {
    ProcessGraph g{{{"source", "pid-rev3"}}};
    must(g.add_node(element("S1", KindTag::Source, {{"flow", 10.0}})));
    must(g.add_node(element("P1", KindTag::Pump, {{"max_flow", 12.0}})));
    must(g.add_node(element("T1", KindTag::Tank, {{"volume", 2.5}})));
    must(g.add_node(element("K1", KindTag::Sink)));
    must(g.add_edge(pipe("e1", "S1", "out1", "P1", "in1", {{"material", "water"}})));
    must(g.add_edge(pipe("e2", "P1", "out1", "T1", "in1", {{"material", "water"}})));
    must(g.add_edge(pipe("e3", "T1", "out1", "K1", "in1", {{"material", "water"}})));
    return g;
}

/// 3D-style source: geometry (positions, diameters, lengths) plus the tank
/// volume estimated from the scan; edge tags differ from the 2D document.
inline ProcessGraph merge_plant_3d(double t1_volume = 2.5) {
    ProcessGraph g{{{"source", "scan-07"}}};
    auto at = [](double x, double y, double z) {
        Position p;
        p.frame = CoordFrame::PlantM;
        p.coords = {x, y, z};
        return p;
    };
    Node s1 = element("S1", KindTag::Source);
    s1.position = at(0.0, 0.0, 0.0);
    Node p1 = element("P1", KindTag::Pump);
    p1.position = at(4.2, 0.0, 0.0);
    Node t1 = element("T1", KindTag::Tank, {{"volume", t1_volume}});
    t1.position = at(6.3, 0.0, 1.5);
    Node k1 = element("K1", KindTag::Sink);
    k1.position = at(9.6, 0.0, 1.5);
    must(g.add_node(std::move(s1)));
    must(g.add_node(std::move(p1)));
    must(g.add_node(std::move(t1)));
    must(g.add_node(std::move(k1)));
    must(g.add_edge(pipe("x1", "S1", "out1", "P1", "in1",
                         {{"diameter", 0.08}, {"length", 4.2}})));
    must(g.add_edge(pipe("x2", "P1", "out1", "T1", "in1",
                         {{"diameter", 0.08}, {"length", 2.6}})));
    must(g.add_edge(pipe("x3", "T1", "out1", "K1", "in1",
                         {{"diameter", 0.05}, {"length", 3.3}})));
    return g;
}

inline RuleSet stream_rules() {
    RuleSet rs;
    rs.simulator_name = "generic";
    rs.rules.push_back({"streams", RuleKind::InsertStreamNodes, "", "", AttrValue()});
    return rs;
}

/// Propagation oracle: pushes source flows through the network until the
/// values stop changing. Handles sources, splitters and single-outlet
/// pass-through nodes; anything else returns nullopt.
inline std::optional<std::map<std::string, double>> oracle_flows(const ProcessGraph& g,
                                                                 int max_iters = 10000,
                                                                 double tol = 1e-10) {
    std::map<std::string, double> flows;
    for (const auto& [tag, e] : g.edges()) {
        if (e.kind == EdgeKind::ProcessFlow) {
            flows[tag] = 0.0;
        }
    }
    for (int iter = 0; iter < max_iters; ++iter) {
        double change = 0.0;
        for (const auto& [tag, n] : g.nodes()) {
            std::vector<const Edge*> in, out;
            for (const Edge* e : g.edges_at(tag, EdgeKind::ProcessFlow)) {
                (e->target.node_tag == tag ? in : out).push_back(e);
            }
            auto set_flow = [&](const std::string& edge, double value) {
                change = std::max(change, std::abs(flows[edge] - value));
                flows[edge] = value;
            };
            switch (n.kind.tag) {
                case KindTag::Source: {
                    auto it = n.attrs.find("flow");
                    if (it == n.attrs.end() || !it->second.is_number() || out.size() != 1) {
                        return std::nullopt;
                    }
                    set_flow(out.front()->tag, it->second.number());
                    break;
                }
                case KindTag::Sink:
                    break;
                case KindTag::Splitter: {
                    if (in.size() != 1) {
                        return std::nullopt;
                    }
                    double feed = flows[in.front()->tag];
                    for (const Edge* o : out) {
                        auto frac = n.attrs.find("split." + o->source.nozzle_id);
                        if (frac == n.attrs.end() || !frac->second.is_number()) {
                            return std::nullopt;
                        }
                        set_flow(o->tag, frac->second.number() * feed);
                    }
                    break;
                }
                default: {
                    if (out.empty() && in.empty()) {
                        break;
                    }
                    if (out.size() != 1) {
                        return std::nullopt;
                    }
                    double total = 0.0;
                    for (const Edge* i : in) {
                        total += flows[i->tag];
                    }
                    set_flow(out.front()->tag, total);
                    break;
                }
            }
        }
        if (change < tol) {
            return flows;
        }
    }
    return std::nullopt;
}

/// Directed reachability over process edges, one BFS per node.
inline std::set<std::pair<std::string, std::string>> process_reachability(
    const ProcessGraph& g) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& [tag, e] : g.edges()) {
        if (e.kind == EdgeKind::ProcessFlow) {
            adj[e.source.node_tag].push_back(e.target.node_tag);
        }
    }
    std::set<std::pair<std::string, std::string>> reach;
    for (const auto& [start, n] : g.nodes()) {
        std::set<std::string> seen{start};
        std::vector<std::string> stack{start};
        while (!stack.empty()) {
            std::string cur = stack.back();
            stack.pop_back();
            for (const auto& next : adj[cur]) {
                if (seen.insert(next).second) {
                    reach.insert({start, next});
                    stack.push_back(next);
                }
            }
        }
    }
    return reach;
}

// --- random graphs for the property suites ------------------------------

inline double random_magnitude(std::mt19937& rng) {
    std::uniform_real_distribution<double> expo(-12.0, 12.0);
    std::uniform_real_distribution<double> mantissa(1.0, 10.0);
    return mantissa(rng) * std::pow(10.0, std::floor(expo(rng)));
}

inline ProcessGraph random_graph(std::mt19937& rng, std::size_t max_nodes = 50) {
    std::uniform_int_distribution<std::size_t> node_count(1, max_nodes);
    std::uniform_int_distribution<int> pct(0, 99);
    const KindTag kinds[] = {KindTag::Tank,       KindTag::Pump,     KindTag::Valve,
                             KindTag::Mixer,      KindTag::Splitter, KindTag::HeatExchanger,
                             KindTag::Instrument, KindTag::Controller, KindTag::Source,
                             KindTag::Sink,       KindTag::Stream,   KindTag::Other};

    ProcessGraph g;
    int metas = static_cast<int>(rng() % 3);
    for (int i = 0; i < metas; ++i) {
        g.meta()["meta" + std::to_string(i)] = "value" + std::to_string(rng() % 100);
    }

    std::size_t n = node_count(rng);
    for (std::size_t i = 0; i < n; ++i) {
        Node node;
        node.tag = "N" + std::to_string(i);
        KindTag tag = kinds[rng() % 12];
        node.kind = tag == KindTag::Other
                        ? NodeKind::other("unit" + std::to_string(rng() % 5))
                        : NodeKind(tag);
        unsigned ins = rng() % 4;
        unsigned outs = rng() % 4;
        for (unsigned k = 0; k < ins; ++k) {
            node.nozzles.push_back({"in" + std::to_string(k + 1), NozzleDirection::Inlet, k});
        }
        for (unsigned k = 0; k < outs; ++k) {
            node.nozzles.push_back({"out" + std::to_string(k + 1), NozzleDirection::Outlet, k});
        }
        if (pct(rng) < 50) {
            node.attrs["volume"] = random_magnitude(rng);
        }
        if (pct(rng) < 30) {
            node.attrs["max_flow"] = random_magnitude(rng);
        }
        if (pct(rng) < 25) {
            node.attrs["material"] = std::string(pct(rng) < 50 ? "water" : "steam");
        }
        if (pct(rng) < 20) {
            node.attrs["insulated"] = pct(rng) < 50;
        }
        if (pct(rng) < 30) {
            Position p;
            p.frame = pct(rng) < 50 ? CoordFrame::DocumentMM : CoordFrame::PlantM;
            int dims = pct(rng) < 50 ? 2 : 3;
            for (int d = 0; d < dims; ++d) {
                p.coords.push_back(random_magnitude(rng) - random_magnitude(rng));
            }
            node.position = std::move(p);
        }
        must(g.add_node(std::move(node)));
    }

    struct Port {
        std::string node, nozzle;
    };
    std::vector<Port> outlets, inlets;
    for (const auto& [tag, node] : g.nodes()) {
        for (const auto& z : node.nozzles) {
            (z.direction == NozzleDirection::Outlet ? outlets : inlets).push_back({tag, z.id});
        }
    }
    std::shuffle(outlets.begin(), outlets.end(), rng);
    std::shuffle(inlets.begin(), inlets.end(), rng);
    std::size_t pairs = std::min(outlets.size(), inlets.size());
    int edge_no = 0;
    for (std::size_t i = 0; i < pairs; ++i) {
        if (pct(rng) >= 70) {
            continue;
        }
        Edge e = pipe("e" + std::to_string(edge_no++), outlets[i].node, outlets[i].nozzle,
                      inlets[i].node, inlets[i].nozzle);
        if (pct(rng) < 50) {
            e.attrs["diameter"] = random_magnitude(rng);
        }
        must(g.add_edge(std::move(e)));
    }

    std::vector<std::string> signal_nodes;
    for (const auto& [tag, node] : g.nodes()) {
        if (signal_endpoint_kind(node.kind.tag)) {
            signal_nodes.push_back(tag);
        }
    }
    if (!signal_nodes.empty()) {
        int count = static_cast<int>(rng() % 4);
        for (int i = 0; i < count; ++i) {
            const auto& a = signal_nodes[rng() % signal_nodes.size()];
            const auto& b = signal_nodes[rng() % signal_nodes.size()];
            must(g.add_edge(signal("sig" + std::to_string(i), a, b)));
        }
    }
    return g;
}

/// Rebuilds a graph inserting nodes and edges in random order; the result
/// must be structurally identical.
inline ProcessGraph rebuild_shuffled(const ProcessGraph& g, std::mt19937& rng) {
    ProcessGraph out{g.meta()};
    std::vector<const Node*> nodes;
    for (const auto& [tag, n] : g.nodes()) {
        nodes.push_back(&n);
    }
    std::vector<const Edge*> edges;
    for (const auto& [tag, e] : g.edges()) {
        edges.push_back(&e);
    }
    std::shuffle(nodes.begin(), nodes.end(), rng);
    std::shuffle(edges.begin(), edges.end(), rng);
    for (const Node* n : nodes) {
        must(out.add_node(*n));
    }
    for (const Edge* e : edges) {
        must(out.add_edge(*e));
    }
    return out;
}

}  // namespace fixtures
