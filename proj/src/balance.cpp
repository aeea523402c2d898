#include "twingraph/balance.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json_detail.hpp"

namespace twingraph {

const char* equation_kind_name(EquationKind k) {
    switch (k) {
        case EquationKind::SourceSpec: return "source_spec";
        case EquationKind::SplitterRatio: return "splitter_ratio";
        case EquationKind::Conservation: return "conservation";
    }
    return "conservation";
}

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) {
            out += ", ";
        }
        out += items[i];
    }
    return out;
}

// in/out process edges per node, tag order.
struct NodeFlows {
    std::vector<const Edge*> in;
    std::vector<const Edge*> out;
};

std::map<std::string, NodeFlows> collect_flows(const ProcessGraph& g) {
    std::map<std::string, NodeFlows> flows;
    for (const auto& [tag, e] : g.edges()) {
        if (e.kind != EdgeKind::ProcessFlow) {
            continue;
        }
        flows[e.source.node_tag].out.push_back(&e);
        flows[e.target.node_tag].in.push_back(&e);
    }
    return flows;
}

}  // namespace

Result<LinearSystem> build_equations(const ProcessGraph& g) {
    LinearSystem sys;
    auto flows = collect_flows(g);
    for (const auto& [tag, e] : g.edges()) {
        if (e.kind == EdgeKind::ProcessFlow) {
            sys.unknowns.push_back(tag);
        }
    }

    // Every connected piece of pipework needs at least one source flow spec.
    {
        std::map<std::string, std::vector<std::string>> adj;
        for (const auto& [tag, e] : g.edges()) {
            if (e.kind != EdgeKind::ProcessFlow) {
                continue;
            }
            adj[e.source.node_tag].push_back(e.target.node_tag);
            adj[e.target.node_tag].push_back(e.source.node_tag);
        }
        std::set<std::string> seen;
        for (const auto& [start, neighbors] : adj) {
            if (seen.count(start)) {
                continue;
            }
            std::vector<std::string> members;
            std::vector<std::string> stack{start};
            seen.insert(start);
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
            bool specified = false;
            for (const auto& tag : members) {
                const Node* n = g.find_node(tag);
                if (n && n->kind.tag == KindTag::Source) {
                    auto it = n->attrs.find("flow");
                    specified |= it != n->attrs.end() && it->second.is_number();
                }
            }
            if (!specified) {
                std::sort(members.begin(), members.end());
                return Result<LinearSystem>(make_error(
                    Errc::MissingBoundaryCondition, members.front(),
                    "component {" + join(members) + "} has no source flow specification"));
            }
        }
    }

    for (const auto& [tag, n] : g.nodes()) {
        auto it = flows.find(tag);
        if (it == flows.end()) {
            continue;  // no process edges, nothing to balance
        }
        const NodeFlows& nf = it->second;
        switch (n.kind.tag) {
            case KindTag::Source: {
                auto flow = n.attrs.find("flow");
                if (flow == n.attrs.end() || !flow->second.is_number() || nf.out.empty()) {
                    break;
                }
                EquationRow row;
                for (const Edge* e : nf.out) {
                    row.coeffs[e->tag] = 1.0;
                }
                row.rhs = flow->second.number();
                row.origin_node = tag;
                row.kind = EquationKind::SourceSpec;
                sys.rows.push_back(std::move(row));
                break;
            }
            case KindTag::Sink:
                break;
            case KindTag::Splitter: {
                if (nf.in.empty()) {
                    break;  // nothing to apportion; outlets stay free
                }
                if (nf.in.size() > 1) {
                    return Result<LinearSystem>(make_error(
                        Errc::Precondition, tag, "splitter '" + tag + "' has multiple inlets"));
                }
                const Edge* inlet = nf.in.front();
                for (const Edge* outlet : nf.out) {
                    auto frac = n.attrs.find("split." + outlet->source.nozzle_id);
                    if (frac == n.attrs.end() || !frac->second.is_number()) {
                        return Result<LinearSystem>(make_error(
                            Errc::Precondition, tag,
                            "splitter '" + tag + "' lacks a fraction for outlet '" +
                                outlet->source.nozzle_id + "'"));
                    }
                    EquationRow row;
                    row.coeffs[outlet->tag] = 1.0;
                    row.coeffs[inlet->tag] = -frac->second.number();
                    row.rhs = 0;
                    row.origin_node = tag;
                    row.kind = EquationKind::SplitterRatio;
                    sys.rows.push_back(std::move(row));
                }
                break;
            }
            default: {
                EquationRow row;
                for (const Edge* e : nf.in) {
                    row.coeffs[e->tag] += 1.0;
                }
                for (const Edge* e : nf.out) {
                    row.coeffs[e->tag] -= 1.0;
                }
                row.rhs = 0;
                row.origin_node = tag;
                row.kind = EquationKind::Conservation;
                sys.rows.push_back(std::move(row));
                break;
            }
        }
    }
    return sys;
}

Result<FlowSolution> solve_steady_state(const ProcessGraph& g) {
    auto built = build_equations(g);
    if (!built.ok()) {
        return Result<FlowSolution>(built.error());
    }
    const LinearSystem& sys = *built;
    const std::size_t n = sys.unknowns.size();
    const std::size_t m = sys.rows.size();

    FlowSolution solution;
    if (n == 0) {
        return solution;
    }

    std::map<std::string, std::size_t> column;
    for (std::size_t j = 0; j < n; ++j) {
        column[sys.unknowns[j]] = j;
    }
    std::vector<std::vector<double>> a(m, std::vector<double>(n, 0.0));
    std::vector<double> b(m, 0.0);
    double largest_source = 0;
    for (std::size_t i = 0; i < m; ++i) {
        for (const auto& [tag, coeff] : sys.rows[i].coeffs) {
            a[i][column.at(tag)] = coeff;
        }
        b[i] = sys.rows[i].rhs;
        if (sys.rows[i].kind == EquationKind::SourceSpec) {
            largest_source = std::max(largest_source, std::abs(b[i]));
        }
    }
    const auto a0 = a;
    const auto b0 = b;

    // Row echelon with partial pivoting; pivots below 1e-12 leave the
    // column free.
    constexpr double pivot_threshold = 1e-12;
    std::vector<std::ptrdiff_t> pivot_row(n, -1);
    std::size_t r = 0;
    for (std::size_t col = 0; col < n && r < m; ++col) {
        std::size_t best = r;
        for (std::size_t i = r + 1; i < m; ++i) {
            if (std::abs(a[i][col]) > std::abs(a[best][col])) {
                best = i;
            }
        }
        if (std::abs(a[best][col]) <= pivot_threshold) {
            continue;
        }
        std::swap(a[r], a[best]);
        std::swap(b[r], b[best]);
        for (std::size_t i = r + 1; i < m; ++i) {
            double f = a[i][col] / a[r][col];
            if (f == 0.0) {
                continue;
            }
            for (std::size_t j = col; j < n; ++j) {
                a[i][j] -= f * a[r][j];
            }
            b[i] -= f * b[r];
        }
        pivot_row[col] = static_cast<std::ptrdiff_t>(r);
        ++r;
    }

    double scale = std::max(1.0, largest_source);

    // Infeasibility first: a row eliminated to zero coefficients with a
    // nonzero right-hand side admits no solution at all.
    for (std::size_t i = 0; i < m; ++i) {
        double coef_max = 0;
        for (std::size_t j = 0; j < n; ++j) {
            coef_max = std::max(coef_max, std::abs(a[i][j]));
        }
        if (coef_max <= pivot_threshold && std::abs(b[i]) > 1e-6 * scale) {
            return Result<FlowSolution>(make_error(
                Errc::Inconsistent, "",
                "equations are contradictory (0 = " + detail::format_double(b[i]) + ")"));
        }
    }

    std::vector<std::string> free_edges;
    for (std::size_t col = 0; col < n; ++col) {
        if (pivot_row[col] < 0) {
            free_edges.push_back(sys.unknowns[col]);
        }
    }
    if (!free_edges.empty()) {
        return Result<FlowSolution>(make_error(
            Errc::Underdetermined, free_edges.front(),
            "system leaves " + std::to_string(free_edges.size()) +
                " edge flow(s) free: " + join(free_edges)));
    }

    std::vector<double> x(n, 0.0);
    for (std::size_t col = n; col-- > 0;) {
        std::size_t row = static_cast<std::size_t>(pivot_row[col]);
        double acc = b[row];
        for (std::size_t j = col + 1; j < n; ++j) {
            acc -= a[row][j] * x[j];
        }
        x[col] = acc / a[row][col];
    }

    double residual = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double acc = -b0[i];
        for (std::size_t j = 0; j < n; ++j) {
            acc += a0[i][j] * x[j];
        }
        residual = std::max(residual, std::abs(acc));
    }
    if (residual > 1e-6 * scale) {
        return Result<FlowSolution>(make_error(
            Errc::Inconsistent, "",
            "equations are inconsistent (residual " + detail::format_double(residual) + ")"));
    }

    for (std::size_t j = 0; j < n; ++j) {
        if (x[j] < -1e-9) {
            return Result<FlowSolution>(make_error(
                Errc::NegativeFlow, sys.unknowns[j],
                "edge '" + sys.unknowns[j] + "' solves to " + detail::format_double(x[j])));
        }
        solution.flows[sys.unknowns[j]] = x[j];
    }
    solution.max_residual = residual;

    for (const auto& [tag, node] : g.nodes()) {
        if (node.kind.tag != KindTag::Pump) {
            continue;
        }
        auto cap = node.attrs.find("max_flow");
        if (cap == node.attrs.end() || !cap->second.is_number()) {
            continue;
        }
        double through = 0;
        for (const Edge* e : g.edges_at(tag, EdgeKind::ProcessFlow)) {
            if (e->target.node_tag == tag) {
                through += solution.flows.at(e->tag);
            }
        }
        if (through > cap->second.number()) {
            solution.capacity_warnings.push_back({tag, through, cap->second.number()});
        }
    }
    return solution;
}

std::string solution_to_json(const FlowSolution& solution) {
    nlohmann::json flows = nlohmann::json::object();
    for (const auto& [tag, value] : solution.flows) {
        flows[tag] = value;
    }
    nlohmann::json warnings = nlohmann::json::array();
    for (const auto& w : solution.capacity_warnings) {
        nlohmann::json j;
        j["node"] = w.node;
        j["flow"] = w.flow;
        j["max_flow"] = w.max_flow;
        warnings.push_back(std::move(j));
    }
    nlohmann::json root;
    root["flows"] = std::move(flows);
    root["max_residual"] = solution.max_residual;
    root["capacity_warnings"] = std::move(warnings);
    return detail::canonical_dump(root);
}

}  // namespace twingraph
