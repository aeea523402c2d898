// Parsers turning machine-readable P&ID descriptions into a ProcessGraph:
// the line-oriented PIDL text format and the canonical GraphJSON format.
#pragma once

#include <string>
#include <vector>

#include "twingraph/graph.hpp"

namespace twingraph {

struct ParseError {
    int line = 1;    // 1-based
    int column = 1;  // 1-based
    std::string message;
    std::string snippet;  // offending source fragment
};

struct SchemaError {
    std::string path;  // JSON pointer-ish, e.g. "/nodes/3/kind"
    std::string message;
};

enum class SourceFormat { Pidl, GraphJson };

struct SourceDoc {
    std::string id;  // nonempty; typically the file path
    SourceFormat format = SourceFormat::Pidl;
    std::string content;
};

/// Parses the PIDL DSL. All-or-nothing: on failure every located error is
/// reported, syntax errors first, then referential ones.
///
/// Grammar (one statement per line, '#' comments, blank lines allowed):
///   node   TAG type=KIND [in=N] [out=M] [KEY=VALUE ...]
///   pipe   TAG : A.noz -> B.noz [KEY=VALUE ...]
///   signal TAG : A -> B [KEY=VALUE ...]
/// KIND: tank|pump|valve|mixer|splitter|hx|instrument|controller|source|sink|other:<name>
/// Nodes that declare neither in= nor out= receive default nozzles per kind.
Result<ProcessGraph, std::vector<ParseError>> parse_pidl(const SourceDoc& doc);

/// Parses the canonical GraphJSON format written by to_json. Strict: unknown
/// keys are rejected and every reference must resolve.
Result<ProcessGraph, std::vector<SchemaError>> parse_graph_json(const SourceDoc& doc);

/// Default nozzle set for nodes that declare none, matching the port
/// cardinality table: source out1; sink in1; mixer in1,in2/out1;
/// splitter in1/out1,out2; controller none; tank/pump/valve/hx/instrument
/// in1/out1; other and stream none.
std::vector<Nozzle> default_nozzles(const NodeKind& kind);

}  // namespace twingraph
