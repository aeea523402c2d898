// Graph-theoretic consistency checks producing a machine-readable report.
//
// Checks:
//   C1 connectivity    — every non-controller node must sit in a component
//                        holding at least one source and one sink
//   C2 port cardinality— declared nozzles must match the per-kind table
//   C3 dangling        — unconnected nozzles and isolated nodes
//   C4 attributes      — profile-required attributes present and positive
//   C5 splitter ratios — split fractions cover every outlet and sum to 1
//   C6 cycles          — recycle and control loops (informational)
#pragma once

#include <string>
#include <vector>

#include "twingraph/transform.hpp"

namespace twingraph {

enum class Severity { Error, Warning, Info };

const char* severity_name(Severity s);

struct Finding {
    std::string check_id;  // "C1".."C6"
    Severity severity = Severity::Info;
    std::string subject;  // node/edge tag or "graph"
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool passed = true;  // no Error-severity findings

    std::size_t count(Severity s) const;
    std::size_t count(const std::string& check_id) const;
};

/// Runs all checks; findings ordered by (check_id, subject, message).
ValidationReport validate(const ProcessGraph& g, const FidelityProfile& p);

std::string report_to_json(const ValidationReport& report);

}  // namespace twingraph
