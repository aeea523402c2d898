#include <algorithm>

#include "twingraph/transform.hpp"

namespace twingraph {

const char* fidelity_name(Fidelity f) {
    return f == Fidelity::SteadyState ? "steady_state" : "dynamic";
}

namespace {

const std::set<KindTag>& all_kind_tags() {
    static const std::set<KindTag> all = {
        KindTag::Tank,       KindTag::Pump,       KindTag::Valve,  KindTag::Mixer,
        KindTag::Splitter,   KindTag::HeatExchanger, KindTag::Instrument,
        KindTag::Controller, KindTag::Source,     KindTag::Sink,   KindTag::Stream,
        KindTag::Other,
    };
    return all;
}

}  // namespace

FidelityProfile FidelityProfile::steady_state() {
    FidelityProfile p;
    p.name = Fidelity::SteadyState;
    p.retained_node_kinds = all_kind_tags();
    p.retained_node_kinds.erase(KindTag::Instrument);
    p.retained_node_kinds.erase(KindTag::Controller);
    p.retained_edge_kinds = {EdgeKind::ProcessFlow};
    p.required_attrs[KindTag::Source] = {"flow"};
    p.required_attrs[KindTag::Pump] = {"max_flow"};
    return p;
}

FidelityProfile FidelityProfile::dynamic() {
    FidelityProfile p;
    p.name = Fidelity::Dynamic;
    p.retained_node_kinds = all_kind_tags();
    p.retained_edge_kinds = {EdgeKind::ProcessFlow, EdgeKind::Signal};
    p.required_attrs[KindTag::Source] = {"flow"};
    p.required_attrs[KindTag::Pump] = {"max_flow"};
    p.required_attrs[KindTag::Tank] = {"volume"};
    p.required_attrs[KindTag::Valve] = {"diameter"};
    return p;
}

Result<void> FidelityProfile::check() const {
    if (name == Fidelity::SteadyState) {
        if (retains(KindTag::Instrument) || retains(KindTag::Controller) ||
            retains(EdgeKind::Signal)) {
            return make_error(Errc::BadProfile, "",
                              "a steady-state profile must drop instrument and controller nodes "
                              "and signal edges");
        }
    } else {
        if (retained_node_kinds != all_kind_tags() ||
            retained_edge_kinds != std::set<EdgeKind>{EdgeKind::ProcessFlow, EdgeKind::Signal}) {
            return make_error(Errc::BadProfile, "", "a dynamic profile must retain everything");
        }
    }
    for (const auto& [kind, keys] : required_attrs) {
        if (!retains(kind)) {
            return make_error(Errc::BadProfile, "",
                              std::string("required_attrs names the dropped kind '") +
                                  kind_tag_name(kind) + "'");
        }
    }
    return {};
}

namespace {

// Merges pipe attributes across a splice: upstream values win, lengths add.
AttrMap splice_attrs(const AttrMap& upstream, const AttrMap& downstream) {
    AttrMap merged = downstream;
    for (const auto& [key, v] : upstream) {
        merged[key] = v;
    }
    auto u = upstream.find("length");
    auto d = downstream.find("length");
    if (u != upstream.end() && d != downstream.end() && u->second.is_number() &&
        d->second.is_number()) {
        merged["length"] = AttrValue(u->second.number() + d->second.number());
    }
    return merged;
}

}  // namespace

Result<ProcessGraph> filter_fidelity(const ProcessGraph& g, const FidelityProfile& p) {
    if (auto r = p.check(); !r.ok()) {
        return r.error();
    }
    ProcessGraph out = g;

    // Drop nodes of non-retained kinds one at a time so chained in-line
    // instruments splice correctly.
    for (;;) {
        const Node* victim = nullptr;
        for (const auto& [tag, n] : out.nodes()) {
            if (!p.retains(n.kind.tag)) {
                victim = &n;
                break;
            }
        }
        if (!victim) {
            break;
        }
        std::string tag = victim->tag;
        auto process = out.edges_at(tag, EdgeKind::ProcessFlow);
        if (process.empty()) {
            auto r = out.remove_node(tag, true);
            if (!r.ok()) {
                return r.error();
            }
            continue;
        }
        const Edge* inbound = nullptr;
        const Edge* outbound = nullptr;
        bool inline_shape = victim->kind.tag == KindTag::Instrument && process.size() == 2;
        if (inline_shape) {
            for (const Edge* e : process) {
                if (e->target.node_tag == tag && e->source.node_tag != tag) {
                    inbound = e;
                } else if (e->source.node_tag == tag && e->target.node_tag != tag) {
                    outbound = e;
                }
            }
            inline_shape = inbound != nullptr && outbound != nullptr;
        }
        if (!inline_shape) {
            return make_error(Errc::UnspliceableInstrument, tag,
                              "dropped node '" + tag + "' carries " +
                                  std::to_string(process.size()) +
                                  " process edge(s) and is not an in-line instrument");
        }
        Edge spliced;
        spliced.tag = inbound->tag + "+" + outbound->tag;
        spliced.kind = EdgeKind::ProcessFlow;
        spliced.source = inbound->source;
        spliced.target = outbound->target;
        spliced.attrs = splice_attrs(inbound->attrs, outbound->attrs);
        if (out.find_edge(spliced.tag)) {
            return make_error(Errc::TagCollision, spliced.tag,
                              "spliced pipe tag already present");
        }
        if (auto r = out.remove_node(tag, true); !r.ok()) {
            return r.error();
        }
        if (auto r = out.add_edge(std::move(spliced)); !r.ok()) {
            return r.error();
        }
    }

    // Drop edge kinds the profile excludes.
    std::vector<std::string> drop;
    for (const auto& [tag, e] : out.edges()) {
        if (!p.retains(e.kind)) {
            drop.push_back(tag);
        }
    }
    for (const auto& tag : drop) {
        auto r = out.remove_edge(tag);
        if (!r.ok()) {
            return r.error();
        }
    }

    out.meta()["fidelity"] = fidelity_name(p.name);
    return out;
}

}  // namespace twingraph
