// Graph manipulation passes: fidelity filtering, simulator-compliance
// rewriting with an auditable log, and multi-source model merging.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "twingraph/graph.hpp"

namespace twingraph {

enum class Fidelity { SteadyState, Dynamic };

const char* fidelity_name(Fidelity f);

/// Which node/edge kinds a fidelity level keeps and which attributes it
/// requires per kind. SteadyState must drop Instrument, Controller and
/// Signal edges; Dynamic must retain everything.
struct FidelityProfile {
    Fidelity name = Fidelity::SteadyState;
    std::set<KindTag> retained_node_kinds;
    std::set<EdgeKind> retained_edge_kinds;
    std::map<KindTag, std::set<std::string>> required_attrs;

    bool retains(KindTag t) const { return retained_node_kinds.count(t) > 0; }
    bool retains(EdgeKind k) const { return retained_edge_kinds.count(k) > 0; }

    Result<void> check() const;

    static FidelityProfile steady_state();
    static FidelityProfile dynamic();
};

Result<FidelityProfile> profile_from_json(const std::string& content);
/// Accepts the preset names "steady"/"steady_state" and "dynamic".
Result<FidelityProfile> profile_by_name(const std::string& name);

enum class RuleKind { InsertStreamNodes, ReifyNozzles, RequireAttrDefault };

struct Rule {
    std::string id;
    RuleKind kind = RuleKind::InsertStreamNodes;
    // RequireAttrDefault: which elements ("tank", ..., "process", "signal"),
    // which key, and the default value.
    std::string target;
    std::string key;
    AttrValue value;
};

struct RuleSet {
    std::string simulator_name;
    std::vector<Rule> rules;
};

Result<RuleSet> ruleset_from_json(const std::string& content);

enum class RewriteAction { AddedNode, AddedEdge, RemovedEdge, SetAttr };

const char* rewrite_action_name(RewriteAction a);

struct RewriteEntry {
    std::string rule_id;
    RewriteAction action = RewriteAction::AddedNode;
    std::string subject;  // node or edge tag
    std::string detail;   // canonical JSON payload, sufficient to replay
};

struct RewriteLog {
    std::vector<RewriteEntry> entries;
};

std::string rewrite_log_to_json(const RewriteLog& log);

enum class ConflictPolicy { PreferA, PreferB, Report };

struct MergePolicy {
    double numeric_tolerance = 1e-6;  // relative
    ConflictPolicy on_conflict = ConflictPolicy::Report;
};

Result<MergePolicy> merge_policy_from_json(const std::string& content);

struct Conflict {
    std::string tag;  // node or edge tag
    std::string key;
    AttrValue value_a;
    AttrValue value_b;
};

std::string conflicts_to_json(const std::vector<Conflict>& conflicts);

/// Drops node/edge kinds the profile excludes. An in-line instrument (one
/// process inlet, one process outlet) is spliced out: its two pipes become
/// one pipe tagged "<up>+<down>" carrying the upstream diameter and the
/// summed length. Sets meta.fidelity.
Result<ProcessGraph> filter_fidelity(const ProcessGraph& g, const FidelityProfile& p);

struct RewriteResult {
    ProcessGraph graph;
    RewriteLog log;
};

/// Applies the rules in order; deterministic (tag-lexicographic iteration),
/// every action logged.
Result<RewriteResult> apply_ruleset(const ProcessGraph& g, const RuleSet& rs);

/// Re-applies a rewrite log to a graph; reproduces apply_ruleset output.
Result<ProcessGraph> replay_log(const ProcessGraph& g, const RewriteLog& log);

struct MergeResult {
    ProcessGraph graph;
    std::vector<Conflict> conflicts;
};

/// Unifies two models of the same plant. Nodes match by exact tag (kinds
/// must agree), edges by (source endpoint, target endpoint, kind) with a's
/// tags winning; attributes are unioned and numeric disagreements beyond the
/// relative tolerance are resolved per policy (Report keeps a's value and
/// records the conflict).
Result<MergeResult> merge(const ProcessGraph& a, const ProcessGraph& b, const MergePolicy& pol);

}  // namespace twingraph
