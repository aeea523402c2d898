// JSON loaders for fidelity profiles, rule sets and merge policies.
#include <cmath>

#include "json_detail.hpp"
#include "twingraph/transform.hpp"

namespace twingraph {

namespace {

using nlohmann::json;

Result<json> parse_object(const std::string& content, const char* what) {
    json j = json::parse(content, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        return Result<json>(
            make_error(Errc::Io, "", std::string(what) + " must be a JSON object"));
    }
    return j;
}

Result<void> reject_unknown(const json& obj, const std::vector<std::string>& known,
                            Errc code, const char* what) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            return make_error(code, it.key(),
                              std::string("unknown key '") + it.key() + "' in " + what);
        }
    }
    return {};
}

Result<AttrValue> attr_from(const json& v, const std::string& where) {
    if (v.is_number()) {
        double d = v.get<double>();
        if (!std::isfinite(d)) {
            return Result<AttrValue>(make_error(Errc::BadRuleSet, where, "value must be finite"));
        }
        return AttrValue(d);
    }
    if (v.is_boolean()) {
        return AttrValue(v.get<bool>());
    }
    if (v.is_string()) {
        return AttrValue(v.get<std::string>());
    }
    return Result<AttrValue>(
        make_error(Errc::BadRuleSet, where, "value must be a number, string or boolean"));
}

}  // namespace

Result<FidelityProfile> profile_by_name(const std::string& name) {
    if (name == "steady" || name == "steady_state") {
        return FidelityProfile::steady_state();
    }
    if (name == "dynamic") {
        return FidelityProfile::dynamic();
    }
    return Result<FidelityProfile>(
        make_error(Errc::BadProfile, name, "unknown profile '" + name + "'"));
}

Result<FidelityProfile> profile_from_json(const std::string& content) {
    auto parsed = parse_object(content, "a fidelity profile");
    if (!parsed.ok()) {
        return Result<FidelityProfile>(parsed.error());
    }
    const json& j = *parsed;
    if (auto r = reject_unknown(
            j, {"name", "retained_node_kinds", "retained_edge_kinds", "required_attrs"},
            Errc::BadProfile, "fidelity profile");
        !r.ok()) {
        return Result<FidelityProfile>(r.error());
    }
    FidelityProfile p;
    std::string name = j.value("name", "");
    if (name == "steady_state") {
        p.name = Fidelity::SteadyState;
    } else if (name == "dynamic") {
        p.name = Fidelity::Dynamic;
    } else {
        return Result<FidelityProfile>(
            make_error(Errc::BadProfile, name, "profile name must be steady_state or dynamic"));
    }
    if (!j.contains("retained_node_kinds") || !j["retained_node_kinds"].is_array() ||
        !j.contains("retained_edge_kinds") || !j["retained_edge_kinds"].is_array()) {
        return Result<FidelityProfile>(
            make_error(Errc::BadProfile, "", "profile needs retained kind arrays"));
    }
    for (const json& k : j["retained_node_kinds"]) {
        auto tag = k.is_string() ? kind_tag_from_string(k.get<std::string>()) : std::nullopt;
        if (!tag) {
            return Result<FidelityProfile>(
                make_error(Errc::BadProfile, k.dump(), "unknown node kind"));
        }
        p.retained_node_kinds.insert(*tag);
    }
    for (const json& k : j["retained_edge_kinds"]) {
        auto kind = k.is_string() ? edge_kind_from_string(k.get<std::string>()) : std::nullopt;
        if (!kind) {
            return Result<FidelityProfile>(
                make_error(Errc::BadProfile, k.dump(), "unknown edge kind"));
        }
        p.retained_edge_kinds.insert(*kind);
    }
    if (j.contains("required_attrs")) {
        if (!j["required_attrs"].is_object()) {
            return Result<FidelityProfile>(
                make_error(Errc::BadProfile, "", "required_attrs must be an object"));
        }
        for (auto it = j["required_attrs"].begin(); it != j["required_attrs"].end(); ++it) {
            auto tag = kind_tag_from_string(it.key());
            if (!tag || !it.value().is_array()) {
                return Result<FidelityProfile>(make_error(
                    Errc::BadProfile, it.key(), "required_attrs maps kinds to key arrays"));
            }
            for (const json& key : it.value()) {
                if (!key.is_string()) {
                    return Result<FidelityProfile>(make_error(
                        Errc::BadProfile, it.key(), "required attribute keys must be strings"));
                }
                p.required_attrs[*tag].insert(key.get<std::string>());
            }
        }
    }
    if (auto r = p.check(); !r.ok()) {
        return Result<FidelityProfile>(r.error());
    }
    return p;
}

Result<RuleSet> ruleset_from_json(const std::string& content) {
    auto parsed = parse_object(content, "a rule set");
    if (!parsed.ok()) {
        return Result<RuleSet>(parsed.error());
    }
    const json& j = *parsed;
    if (auto r = reject_unknown(j, {"simulator_name", "rules"}, Errc::BadRuleSet, "rule set");
        !r.ok()) {
        return Result<RuleSet>(r.error());
    }
    RuleSet rs;
    rs.simulator_name = j.value("simulator_name", "");
    if (rs.simulator_name.empty()) {
        return Result<RuleSet>(
            make_error(Errc::BadRuleSet, "", "rule set needs a nonempty simulator_name"));
    }
    if (!j.contains("rules") || !j["rules"].is_array()) {
        return Result<RuleSet>(make_error(Errc::BadRuleSet, "", "rules must be an array"));
    }
    for (const json& jr : j["rules"]) {
        if (!jr.is_object()) {
            return Result<RuleSet>(make_error(Errc::BadRuleSet, "", "rule must be an object"));
        }
        if (auto r = reject_unknown(jr, {"id", "kind", "params"}, Errc::BadRuleSet, "rule");
            !r.ok()) {
            return Result<RuleSet>(r.error());
        }
        Rule rule;
        rule.id = jr.value("id", "");
        std::string kind = jr.value("kind", "");
        json params = jr.value("params", json::object());
        if (!params.is_object()) {
            return Result<RuleSet>(
                make_error(Errc::BadRuleSet, rule.id, "params must be an object"));
        }
        if (kind == "insert_stream_nodes") {
            rule.kind = RuleKind::InsertStreamNodes;
            if (!params.empty()) {
                return Result<RuleSet>(
                    make_error(Errc::BadRuleSet, rule.id, "insert_stream_nodes takes no params"));
            }
        } else if (kind == "reify_nozzles") {
            rule.kind = RuleKind::ReifyNozzles;
            if (!params.empty()) {
                return Result<RuleSet>(
                    make_error(Errc::BadRuleSet, rule.id, "reify_nozzles takes no params"));
            }
        } else if (kind == "require_attr_default") {
            rule.kind = RuleKind::RequireAttrDefault;
            if (auto r = reject_unknown(params, {"target", "key", "value"}, Errc::BadRuleSet,
                                        "require_attr_default params");
                !r.ok()) {
                return Result<RuleSet>(r.error());
            }
            rule.target = params.value("target", "");
            rule.key = params.value("key", "");
            if (rule.target.empty() || rule.key.empty() || !params.contains("value")) {
                return Result<RuleSet>(make_error(
                    Errc::BadRuleSet, rule.id,
                    "require_attr_default needs target, key and value params"));
            }
            bool known_target = edge_kind_from_string(rule.target).has_value() ||
                                kind_tag_from_string(rule.target).has_value();
            if (!known_target) {
                return Result<RuleSet>(make_error(Errc::BadRuleSet, rule.id,
                                                  "unknown target '" + rule.target + "'"));
            }
            auto value = attr_from(params["value"], rule.id);
            if (!value.ok()) {
                return Result<RuleSet>(value.error());
            }
            rule.value = *value;
        } else {
            return Result<RuleSet>(
                make_error(Errc::BadRuleSet, rule.id, "unknown rule kind '" + kind + "'"));
        }
        rs.rules.push_back(std::move(rule));
    }
    return rs;
}

Result<MergePolicy> merge_policy_from_json(const std::string& content) {
    auto parsed = parse_object(content, "a merge policy");
    if (!parsed.ok()) {
        return Result<MergePolicy>(parsed.error());
    }
    const json& j = *parsed;
    if (auto r = reject_unknown(j, {"numeric_tolerance", "on_conflict"}, Errc::Io,
                                "merge policy");
        !r.ok()) {
        return Result<MergePolicy>(r.error());
    }
    MergePolicy pol;
    if (j.contains("numeric_tolerance")) {
        if (!j["numeric_tolerance"].is_number() || j["numeric_tolerance"].get<double>() < 0) {
            return Result<MergePolicy>(
                make_error(Errc::Io, "", "numeric_tolerance must be a nonnegative number"));
        }
        pol.numeric_tolerance = j["numeric_tolerance"].get<double>();
    }
    if (j.contains("on_conflict")) {
        std::string c = j["on_conflict"].is_string() ? j["on_conflict"].get<std::string>() : "";
        if (c == "prefer_a") {
            pol.on_conflict = ConflictPolicy::PreferA;
        } else if (c == "prefer_b") {
            pol.on_conflict = ConflictPolicy::PreferB;
        } else if (c == "report") {
            pol.on_conflict = ConflictPolicy::Report;
        } else {
            return Result<MergePolicy>(make_error(
                Errc::Io, "", "on_conflict must be prefer_a, prefer_b or report"));
        }
    }
    return pol;
}

}  // namespace twingraph
