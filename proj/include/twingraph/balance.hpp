// Steady-state mass balance over the process graph: one unknown per pipe,
// source flow specs and splitter ratios as boundary conditions, conservation
// everywhere else, solved by direct elimination with partial pivoting.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "twingraph/graph.hpp"

namespace twingraph {

enum class EquationKind { SourceSpec, SplitterRatio, Conservation };

const char* equation_kind_name(EquationKind k);

struct EquationRow {
    std::map<std::string, double> coeffs;  // edge tag -> coefficient
    double rhs = 0;
    std::string origin_node;
    EquationKind kind = EquationKind::Conservation;
};

struct LinearSystem {
    std::vector<std::string> unknowns;  // process edge tags, sorted
    std::vector<EquationRow> rows;      // node tag order; spec < ratio < conservation
};

struct CapacityWarning {
    std::string node;
    double flow = 0;
    double max_flow = 0;
};

struct FlowSolution {
    std::map<std::string, double> flows;  // m3/h per process edge
    double max_residual = 0;
    std::vector<CapacityWarning> capacity_warnings;
};

/// Transcribes the balance equations. Fails with MissingBoundaryCondition
/// when a connected piece of pipework has no source flow specification.
Result<LinearSystem> build_equations(const ProcessGraph& g);

/// Solves the system. Tolerances: pivot 1e-12; consistency 1e-6 relative to
/// the largest source flow; flows below -1e-9 are rejected.
Result<FlowSolution> solve_steady_state(const ProcessGraph& g);

std::string solution_to_json(const FlowSolution& solution);

}  // namespace twingraph
