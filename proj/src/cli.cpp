#include "twingraph/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "twingraph/balance.hpp"
#include "twingraph/export.hpp"
#include "twingraph/ingest.hpp"
#include "twingraph/transform.hpp"
#include "twingraph/validate.hpp"

namespace twingraph::cli {

namespace {

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "twingraph: cannot read '" << path << "'\n";
        return std::nullopt;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "twingraph: cannot write '" << path << "'\n";
        return false;
    }
    out << content;
    return out.good();
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(),
                                                  suffix) == 0;
}

std::optional<ProcessGraph> load_graph(const std::string& path) {
    auto content = read_file(path);
    if (!content) {
        return std::nullopt;
    }
    if (has_suffix(path, ".pidl")) {
        auto parsed = parse_pidl({path, SourceFormat::Pidl, *content});
        if (!parsed.ok()) {
            for (const auto& e : parsed.error()) {
                std::cerr << path << ":" << e.line << ":" << e.column << ": " << e.message
                          << "\n";
            }
            return std::nullopt;
        }
        return std::move(parsed).value();
    }
    auto parsed = parse_graph_json({path, SourceFormat::GraphJson, *content});
    if (!parsed.ok()) {
        for (const auto& e : parsed.error()) {
            std::cerr << path << ": " << (e.path.empty() ? "/" : e.path) << ": " << e.message
                      << "\n";
        }
        return std::nullopt;
    }
    return std::move(parsed).value();
}

int complain(const Error& e) {
    std::cerr << "twingraph: " << e.to_string() << "\n";
    return 1;
}

int cmd_ingest(const std::string& input, const std::string& output) {
    auto g = load_graph(input);
    if (!g) {
        return 1;
    }
    return write_file(output, to_json(*g)) ? 0 : 1;
}

int run_validation(const ProcessGraph& g, const std::string& profile_name) {
    auto profile = profile_by_name(profile_name);
    if (!profile.ok()) {
        return complain(profile.error());
    }
    ValidationReport report = validate(g, *profile);
    std::cerr << report_to_json(report) << "\n";
    return report.passed ? 0 : 2;
}

int cmd_validate(const std::string& input, const std::string& profile_name) {
    auto g = load_graph(input);
    if (!g) {
        return 1;
    }
    return run_validation(*g, profile_name);
}

int cmd_filter(const std::string& input, const std::string& profile_name,
               const std::string& output) {
    auto g = load_graph(input);
    if (!g) {
        return 1;
    }
    auto profile = profile_by_name(profile_name);
    if (!profile.ok()) {
        return complain(profile.error());
    }
    auto filtered = filter_fidelity(*g, *profile);
    if (!filtered.ok()) {
        return complain(filtered.error());
    }
    return write_file(output, to_json(*filtered)) ? 0 : 1;
}

int cmd_rewrite(const std::string& input, const std::string& rules_path,
                const std::string& output, const std::string& log_path) {
    auto g = load_graph(input);
    if (!g) {
        return 1;
    }
    auto rules_text = read_file(rules_path);
    if (!rules_text) {
        return 1;
    }
    auto rules = ruleset_from_json(*rules_text);
    if (!rules.ok()) {
        return complain(rules.error());
    }
    auto rewritten = apply_ruleset(*g, *rules);
    if (!rewritten.ok()) {
        return complain(rewritten.error());
    }
    if (!write_file(output, to_json(rewritten->graph))) {
        return 1;
    }
    if (!log_path.empty() && !write_file(log_path, rewrite_log_to_json(rewritten->log))) {
        return 1;
    }
    return 0;
}

int cmd_merge(const std::string& input_a, const std::string& input_b,
              const std::string& policy_path, const std::string& output,
              const std::string& conflicts_path) {
    auto a = load_graph(input_a);
    auto b = load_graph(input_b);
    if (!a || !b) {
        return 1;
    }
    MergePolicy policy;
    if (!policy_path.empty()) {
        auto text = read_file(policy_path);
        if (!text) {
            return 1;
        }
        auto parsed = merge_policy_from_json(*text);
        if (!parsed.ok()) {
            return complain(parsed.error());
        }
        policy = *parsed;
    }
    auto merged = merge(*a, *b, policy);
    if (!merged.ok()) {
        return complain(merged.error());
    }
    if (!write_file(output, to_json(merged->graph))) {
        return 1;
    }
    if (!conflicts_path.empty() &&
        !write_file(conflicts_path, conflicts_to_json(merged->conflicts))) {
        return 1;
    }
    return 0;
}

int solve_to_file(const ProcessGraph& g, const std::string& output) {
    auto solution = solve_steady_state(g);
    if (!solution.ok()) {
        std::cerr << "twingraph: " << solution.error().to_string() << "\n";
        return 3;
    }
    return write_file(output, solution_to_json(*solution)) ? 0 : 1;
}

int cmd_solve(const std::string& input, const std::string& output) {
    auto g = load_graph(input);
    if (!g) {
        return 1;
    }
    return solve_to_file(*g, output);
}

int export_to_file(const ProcessGraph& g, const std::string& format,
                   const std::string& simulator, const std::string& output) {
    std::string bytes;
    if (format == "dot") {
        bytes = to_dot(g);
    } else if (format == "graphml") {
        bytes = to_graphml(g);
    } else if (format == "simspec") {
        std::string name = simulator;
        if (name.empty()) {
            auto it = g.meta().find("simulator");
            name = it != g.meta().end() ? it->second : "generic";
        }
        auto spec = to_simspec(g, name);
        if (!spec.ok()) {
            return complain(spec.error());
        }
        bytes = simspec_to_json(*spec);
    } else {
        std::cerr << "twingraph: unknown export format '" << format << "'\n";
        return 1;
    }
    return write_file(output, bytes) ? 0 : 1;
}

int cmd_export(const std::string& input, const std::string& format, const std::string& output) {
    auto g = load_graph(input);
    if (!g) {
        return 1;
    }
    return export_to_file(*g, format, "", output);
}

// --- pipeline ---------------------------------------------------------

struct PipelineStep {
    std::string name;
    nlohmann::json params;
};

struct PipelineConfig {
    std::vector<std::string> inputs;
    std::string output;
    std::vector<PipelineStep> steps;
};

const std::map<std::string, std::vector<std::string>>& step_params() {
    static const std::map<std::string, std::vector<std::string>> allowed = {
        {"ingest", {}},
        {"filter", {"profile", "out"}},
        {"validate", {"profile"}},
        {"rewrite", {"rules", "log", "out"}},
        {"merge", {"policy", "conflicts", "out"}},
        {"solve", {"out"}},
        {"export", {"format", "simulator", "out"}},
    };
    return allowed;
}

std::optional<PipelineConfig> load_pipeline_config(const std::string& path) {
    auto text = read_file(path);
    if (!text) {
        return std::nullopt;
    }
    auto fail = [&](const std::string& msg) -> std::optional<PipelineConfig> {
        std::cerr << path << ": " << msg << "\n";
        return std::nullopt;
    };
    nlohmann::json j = nlohmann::json::parse(*text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        return fail("pipeline config must be a JSON object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() != "inputs" && it.key() != "output" && it.key() != "steps") {
            return fail("unknown key '" + it.key() + "'");
        }
    }
    PipelineConfig config;
    if (!j.contains("inputs") || !j["inputs"].is_array() || j["inputs"].empty()) {
        return fail("inputs must be a nonempty array of paths");
    }
    for (const auto& in : j["inputs"]) {
        if (!in.is_string()) {
            return fail("inputs must be strings");
        }
        config.inputs.push_back(in.get<std::string>());
    }
    if (!j.contains("output") || !j["output"].is_string()) {
        return fail("output must be a path");
    }
    config.output = j["output"].get<std::string>();
    if (!j.contains("steps") || !j["steps"].is_array() || j["steps"].empty()) {
        return fail("steps must be a nonempty array");
    }
    for (const auto& js : j["steps"]) {
        if (!js.is_object() || !js.contains("step") || !js["step"].is_string()) {
            return fail("each step needs a step name");
        }
        PipelineStep step;
        step.name = js["step"].get<std::string>();
        step.params = js.value("params", nlohmann::json::object());
        auto allowed = step_params().find(step.name);
        if (allowed == step_params().end()) {
            return fail("unknown step '" + step.name + "'");
        }
        for (auto it = step.params.begin(); it != step.params.end(); ++it) {
            const auto& keys = allowed->second;
            if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
                return fail("step '" + step.name + "' does not take param '" + it.key() + "'");
            }
        }
        for (auto it = js.begin(); it != js.end(); ++it) {
            if (it.key() != "step" && it.key() != "params") {
                return fail("unknown step key '" + it.key() + "'");
            }
        }
        config.steps.push_back(std::move(step));
    }
    if (config.steps.front().name != "ingest") {
        for (const auto& in : config.inputs) {
            if (!has_suffix(in, ".twin.json")) {
                return fail("without a leading ingest step every input must be a .twin.json");
            }
        }
    }
    for (std::size_t i = 1; i < config.steps.size(); ++i) {
        if (config.steps[i].name == "ingest") {
            return fail("ingest may only be the first step");
        }
    }
    for (std::size_t i = 0; i + 1 < config.steps.size(); ++i) {
        const auto& step = config.steps[i];
        if ((step.name == "solve" || step.name == "export") && !step.params.contains("out")) {
            return fail("mid-pipeline '" + step.name + "' needs an out param");
        }
    }
    return config;
}

int cmd_pipeline(const std::string& config_path) {
    auto config = load_pipeline_config(config_path);
    if (!config) {
        return 1;
    }
    std::vector<ProcessGraph> graphs;
    if (config->steps.front().name != "ingest") {
        for (const auto& in : config->inputs) {
            auto g = load_graph(in);
            if (!g) {
                return 1;
            }
            graphs.push_back(std::move(*g));
        }
    }

    auto current = [&]() -> ProcessGraph& { return graphs.front(); };
    auto single = [&](const std::string& step) -> bool {
        if (graphs.size() != 1) {
            std::cerr << "twingraph: step '" << step << "' needs a single current graph ("
                      << graphs.size() << " present); merge the inputs first\n";
            return false;
        }
        return true;
    };

    for (std::size_t i = 0; i < config->steps.size(); ++i) {
        const PipelineStep& step = config->steps[i];
        bool last = i + 1 == config->steps.size();
        std::string artifact;  // bytes the step produces

        if (step.name == "ingest") {
            for (const auto& in : config->inputs) {
                auto g = load_graph(in);
                if (!g) {
                    return 1;
                }
                graphs.push_back(std::move(*g));
            }
            if (last && !single(step.name)) {
                return 1;
            }
            artifact = to_json(graphs.front());
        } else if (step.name == "filter") {
            if (!single(step.name)) {
                return 1;
            }
            auto profile = profile_by_name(step.params.value("profile", ""));
            if (!profile.ok()) {
                return complain(profile.error());
            }
            auto filtered = filter_fidelity(current(), *profile);
            if (!filtered.ok()) {
                return complain(filtered.error());
            }
            current() = std::move(*filtered);
            artifact = to_json(current());
        } else if (step.name == "validate") {
            if (!single(step.name)) {
                return 1;
            }
            int rc = run_validation(current(), step.params.value("profile", "steady"));
            if (rc != 0) {
                return rc;
            }
            artifact = to_json(current());
        } else if (step.name == "rewrite") {
            if (!single(step.name)) {
                return 1;
            }
            auto rules_text = read_file(step.params.value("rules", ""));
            if (!rules_text) {
                return 1;
            }
            auto rules = ruleset_from_json(*rules_text);
            if (!rules.ok()) {
                return complain(rules.error());
            }
            auto rewritten = apply_ruleset(current(), *rules);
            if (!rewritten.ok()) {
                return complain(rewritten.error());
            }
            current() = std::move(rewritten->graph);
            if (step.params.contains("log") &&
                !write_file(step.params["log"].get<std::string>(),
                            rewrite_log_to_json(rewritten->log))) {
                return 1;
            }
            artifact = to_json(current());
        } else if (step.name == "merge") {
            if (graphs.size() < 2) {
                std::cerr << "twingraph: merge step needs two graphs\n";
                return 1;
            }
            MergePolicy policy;
            if (step.params.contains("policy")) {
                auto text = read_file(step.params["policy"].get<std::string>());
                if (!text) {
                    return 1;
                }
                auto parsed = merge_policy_from_json(*text);
                if (!parsed.ok()) {
                    return complain(parsed.error());
                }
                policy = *parsed;
            }
            auto merged = merge(graphs[0], graphs[1], policy);
            if (!merged.ok()) {
                return complain(merged.error());
            }
            if (step.params.contains("conflicts") &&
                !write_file(step.params["conflicts"].get<std::string>(),
                            conflicts_to_json(merged->conflicts))) {
                return 1;
            }
            graphs.erase(graphs.begin(), graphs.begin() + 2);
            graphs.insert(graphs.begin(), std::move(merged->graph));
            artifact = to_json(graphs.front());
        } else if (step.name == "solve") {
            if (!single(step.name)) {
                return 1;
            }
            auto solution = solve_steady_state(current());
            if (!solution.ok()) {
                std::cerr << "twingraph: " << solution.error().to_string() << "\n";
                return 3;
            }
            artifact = solution_to_json(*solution);
        } else if (step.name == "export") {
            if (!single(step.name)) {
                return 1;
            }
            const ProcessGraph& g = current();
            std::string format = step.params.value("format", "");
            if (format == "dot") {
                artifact = to_dot(g);
            } else if (format == "graphml") {
                artifact = to_graphml(g);
            } else if (format == "simspec") {
                std::string name = step.params.value("simulator", "");
                if (name.empty()) {
                    auto it = g.meta().find("simulator");
                    name = it != g.meta().end() ? it->second : "generic";
                }
                auto spec = to_simspec(g, name);
                if (!spec.ok()) {
                    return complain(spec.error());
                }
                artifact = simspec_to_json(*spec);
            } else {
                std::cerr << "twingraph: unknown export format '" << format << "'\n";
                return 1;
            }
        }

        if (step.params.contains("out") &&
            !write_file(step.params["out"].get<std::string>(), artifact)) {
            return 1;
        }
        if (last && !write_file(config->output, artifact)) {
            return 1;
        }
    }
    return 0;
}

}  // namespace

int run(std::vector<std::string> args) {
    CLI::App app{"P&ID-to-simulation-model toolchain", "twingraph"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    int rc = 0;

    struct {
        std::string input, input_b, output, profile = "steady", rules, log, policy, conflicts,
                    format, config;
    } opt;

    auto* ingest = app.add_subcommand("ingest", "Parse a P&ID description into GraphJSON");
    ingest->add_option("input", opt.input, "input file (.pidl or .twin.json)")->required();
    ingest->add_option("-o,--output", opt.output, "output .twin.json")->required();
    ingest->callback([&] { rc = cmd_ingest(opt.input, opt.output); });

    auto* validate_cmd = app.add_subcommand("validate", "Run consistency checks");
    validate_cmd->add_option("input", opt.input, "graph file")->required();
    validate_cmd->add_option("--profile", opt.profile, "steady|dynamic (default steady)")
        ->check(CLI::IsMember({"steady", "dynamic"}));
    validate_cmd->callback([&] { rc = cmd_validate(opt.input, opt.profile); });

    auto* filter = app.add_subcommand("filter", "Filter the graph to a fidelity level");
    filter->add_option("input", opt.input, "graph file")->required();
    filter->add_option("--profile", opt.profile, "steady|dynamic")
        ->required()
        ->check(CLI::IsMember({"steady", "dynamic"}));
    filter->add_option("-o,--output", opt.output, "output .twin.json")->required();
    filter->callback([&] { rc = cmd_filter(opt.input, opt.profile, opt.output); });

    auto* rewrite = app.add_subcommand("rewrite", "Apply simulator-compliance rules");
    rewrite->add_option("input", opt.input, "graph file")->required();
    rewrite->add_option("--rules", opt.rules, "rule set JSON")->required();
    rewrite->add_option("-o,--output", opt.output, "output .twin.json")->required();
    rewrite->add_option("--log", opt.log, "write the rewrite log here");
    rewrite->callback([&] { rc = cmd_rewrite(opt.input, opt.rules, opt.output, opt.log); });

    auto* merge_cmd = app.add_subcommand("merge", "Unify two models of the same plant");
    merge_cmd->add_option("a", opt.input, "first graph (wins conflicts)")->required();
    merge_cmd->add_option("b", opt.input_b, "second graph")->required();
    merge_cmd->add_option("--policy", opt.policy, "merge policy JSON");
    merge_cmd->add_option("-o,--output", opt.output, "output .twin.json")->required();
    merge_cmd->add_option("--conflicts", opt.conflicts, "write detected conflicts here");
    merge_cmd->callback(
        [&] { rc = cmd_merge(opt.input, opt.input_b, opt.policy, opt.output, opt.conflicts); });

    auto* solve = app.add_subcommand("solve", "Solve the steady-state mass balance");
    solve->add_option("input", opt.input, "graph file")->required();
    solve->add_option("-o,--output", opt.output, "output solution JSON")->required();
    solve->callback([&] { rc = cmd_solve(opt.input, opt.output); });

    auto* export_cmd = app.add_subcommand("export", "Export the graph for other tools");
    export_cmd->add_option("input", opt.input, "graph file")->required();
    export_cmd->add_option("--format", opt.format, "dot|graphml|simspec")
        ->required()
        ->check(CLI::IsMember({"dot", "graphml", "simspec"}));
    export_cmd->add_option("-o,--output", opt.output, "output file")->required();
    export_cmd->callback([&] { rc = cmd_export(opt.input, opt.format, opt.output); });

    auto* pipeline = app.add_subcommand("pipeline", "Run a configured chain of steps");
    pipeline->add_option("config", opt.config, "pipeline config JSON")->required();
    pipeline->callback([&] { rc = cmd_pipeline(opt.config); });

    for (auto* sub : app.get_subcommands({})) {
        sub->set_version_flag("--version", kVersion);
    }

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return rc;
}

}  // namespace twingraph::cli
