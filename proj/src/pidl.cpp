#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>

#include "twingraph/ingest.hpp"

namespace twingraph {

std::vector<Nozzle> default_nozzles(const NodeKind& kind) {
    auto ins = [](unsigned n) {
        std::vector<Nozzle> v;
        for (unsigned i = 0; i < n; ++i) {
            v.push_back({"in" + std::to_string(i + 1), NozzleDirection::Inlet, i});
        }
        return v;
    };
    auto outs = [](std::vector<Nozzle>& v, unsigned n) {
        for (unsigned i = 0; i < n; ++i) {
            v.push_back({"out" + std::to_string(i + 1), NozzleDirection::Outlet, i});
        }
    };
    std::vector<Nozzle> v;
    switch (kind.tag) {
        case KindTag::Source: outs(v, 1); break;
        case KindTag::Sink: v = ins(1); break;
        case KindTag::Mixer: v = ins(2); outs(v, 1); break;
        case KindTag::Splitter: v = ins(1); outs(v, 2); break;
        case KindTag::Controller: break;
        case KindTag::Other: break;
        case KindTag::Stream:
        case KindTag::Tank:
        case KindTag::Pump:
        case KindTag::Valve:
        case KindTag::HeatExchanger:
        case KindTag::Instrument: v = ins(1); outs(v, 1); break;
    }
    return v;
}

namespace {

struct Token {
    std::string text;
    int column;  // 1-based
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == ' ' || line[i] == '\t') {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
            ++i;
        }
        toks.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return toks;
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) {
        return std::nullopt;
    }
    double value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<unsigned> parse_count(const std::string& s) {
    if (s.empty()) {
        return std::nullopt;
    }
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return value;
}

AttrValue value_from_token(const std::string& s) {
    if (auto n = parse_number(s)) {
        return AttrValue(*n);
    }
    if (s == "true") {
        return AttrValue(true);
    }
    if (s == "false") {
        return AttrValue(false);
    }
    return AttrValue(s);
}

struct LineParser {
    const std::string& line;
    int line_no;
    std::vector<ParseError>& syntax;
    std::vector<ParseError>& referential;

    void syntax_error(int col, std::string msg, std::string snippet) {
        syntax.push_back({line_no, col, std::move(msg), std::move(snippet)});
    }
    void ref_error(int col, std::string msg, std::string snippet) {
        referential.push_back({line_no, col, std::move(msg), std::move(snippet)});
    }
};

// KEY=VALUE; returns false when the token has no '=' or an empty key.
bool split_attr(const std::string& tok, std::string& key, std::string& value) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) {
        return false;
    }
    key = tok.substr(0, eq);
    value = tok.substr(eq + 1);
    return true;
}

// "A.noz" split at the last dot; nozzle ids never contain dots in PIDL.
bool split_endpoint(const std::string& s, Endpoint& ep) {
    auto dot = s.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= s.size()) {
        return false;
    }
    ep.node_tag = s.substr(0, dot);
    ep.nozzle_id = s.substr(dot + 1);
    return valid_user_tag(ep.node_tag);
}

// Joins the connection tokens of a pipe/signal statement ("A.x -> B.y" in any
// spacing) and splits on the single "->".
bool split_connection(const std::vector<Token>& toks, std::size_t first, std::size_t last,
                      std::string& lhs, std::string& rhs) {
    std::string joined;
    for (std::size_t i = first; i < last; ++i) {
        joined += toks[i].text;
    }
    auto arrow = joined.find("->");
    if (arrow == std::string::npos || joined.find("->", arrow + 2) != std::string::npos) {
        return false;
    }
    lhs = joined.substr(0, arrow);
    rhs = joined.substr(arrow + 2);
    return !lhs.empty() && !rhs.empty();
}

}  // namespace

Result<ProcessGraph, std::vector<ParseError>> parse_pidl(const SourceDoc& doc) {
    std::vector<ParseError> syntax;
    std::vector<ParseError> referential;
    ProcessGraph graph{{{"source", doc.id}}};

    // Split into lines, accepting \n and \r\n.
    std::vector<std::string> lines;
    {
        std::string cur;
        for (char c : doc.content) {
            if (c == '\n') {
                if (!cur.empty() && cur.back() == '\r') {
                    cur.pop_back();
                }
                lines.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) {
            if (cur.back() == '\r') {
                cur.pop_back();
            }
            lines.push_back(cur);
        }
    }

    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::string& line = lines[li];
        int line_no = static_cast<int>(li) + 1;
        LineParser lp{line, line_no, syntax, referential};
        auto toks = tokenize(line);
        if (toks.empty() || toks[0].text[0] == '#') {
            continue;
        }
        const std::string& stmt = toks[0].text;

        if (stmt == "node") {
            if (toks.size() < 3) {
                lp.syntax_error(toks[0].column, "node statement needs a tag and type=KIND", line);
                continue;
            }
            const std::string& tag = toks[1].text;
            if (!valid_user_tag(tag)) {
                lp.syntax_error(toks[1].column, "invalid tag '" + tag + "'", tag);
                continue;
            }
            std::string key, value;
            if (!split_attr(toks[2].text, key, value) || key != "type") {
                lp.syntax_error(toks[2].column, "expected type=KIND after the node tag",
                                toks[2].text);
                continue;
            }
            auto kind = kind_from_string(value);
            if (!kind || kind->tag == KindTag::Stream) {
                // stream nodes are generated by the rewriter, never declared
                lp.syntax_error(toks[2].column, "unknown node kind '" + value + "'", toks[2].text);
                continue;
            }
            Node n;
            n.tag = tag;
            n.kind = *kind;
            std::optional<unsigned> in_count, out_count;
            bool bad = false;
            for (std::size_t t = 3; t < toks.size(); ++t) {
                if (!split_attr(toks[t].text, key, value)) {
                    lp.syntax_error(toks[t].column, "expected KEY=VALUE", toks[t].text);
                    bad = true;
                    break;
                }
                if (key == "in" || key == "out") {
                    auto count = parse_count(value);
                    if (!count) {
                        lp.syntax_error(toks[t].column, key + "= takes a nonnegative integer",
                                        toks[t].text);
                        bad = true;
                        break;
                    }
                    (key == "in" ? in_count : out_count) = *count;
                } else {
                    n.attrs[key] = value_from_token(value);
                }
            }
            if (bad) {
                continue;
            }
            if (in_count || out_count) {
                for (unsigned i = 0; i < in_count.value_or(0); ++i) {
                    n.nozzles.push_back({"in" + std::to_string(i + 1), NozzleDirection::Inlet, i});
                }
                for (unsigned i = 0; i < out_count.value_or(0); ++i) {
                    n.nozzles.push_back(
                        {"out" + std::to_string(i + 1), NozzleDirection::Outlet, i});
                }
            } else {
                n.nozzles = default_nozzles(n.kind);
            }
            if (auto r = graph.add_node(std::move(n)); !r.ok()) {
                lp.ref_error(toks[1].column, r.error().message, tag);
            }
        } else if (stmt == "pipe" || stmt == "signal") {
            bool is_pipe = stmt == "pipe";
            if (toks.size() < 3) {
                lp.syntax_error(toks[0].column, stmt + " statement needs a tag and a connection",
                                line);
                continue;
            }
            std::string tag = toks[1].text;
            std::size_t conn_first = 2;
            if (!tag.empty() && tag.back() == ':') {
                tag.pop_back();
            } else if (toks.size() > 2 && toks[2].text == ":") {
                conn_first = 3;
            } else {
                lp.syntax_error(toks[1].column, "expected ':' after the " + stmt + " tag",
                                toks[1].text);
                continue;
            }
            if (!valid_user_tag(tag)) {
                lp.syntax_error(toks[1].column, "invalid tag '" + tag + "'", tag);
                continue;
            }
            // Connection tokens run until the first KEY=VALUE token.
            std::size_t conn_last = conn_first;
            std::string key, value;
            while (conn_last < toks.size() && !split_attr(toks[conn_last].text, key, value)) {
                ++conn_last;
            }
            if (conn_last == conn_first) {
                lp.syntax_error(toks.size() > conn_first ? toks[conn_first].column
                                                         : toks[1].column,
                                "missing connection", line);
                continue;
            }
            std::string lhs, rhs;
            if (!split_connection(toks, conn_first, conn_last, lhs, rhs)) {
                lp.syntax_error(toks[conn_first].column,
                                "connection must be of the form A -> B", line);
                continue;
            }
            Edge e;
            e.tag = tag;
            int conn_col = toks[conn_first].column;
            if (is_pipe) {
                e.kind = EdgeKind::ProcessFlow;
                if (!split_endpoint(lhs, e.source) || !split_endpoint(rhs, e.target)) {
                    lp.syntax_error(conn_col, "pipe endpoints must be TAG.NOZZLE", line);
                    continue;
                }
            } else {
                e.kind = EdgeKind::Signal;
                if (!valid_user_tag(lhs) || !valid_user_tag(rhs)) {
                    lp.syntax_error(conn_col, "signal endpoints must be node tags", line);
                    continue;
                }
                e.source.node_tag = lhs;
                e.target.node_tag = rhs;
            }
            bool bad = false;
            for (std::size_t t = conn_last; t < toks.size(); ++t) {
                if (!split_attr(toks[t].text, key, value)) {
                    lp.syntax_error(toks[t].column, "expected KEY=VALUE", toks[t].text);
                    bad = true;
                    break;
                }
                e.attrs[key] = value_from_token(value);
            }
            if (bad) {
                continue;
            }
            if (auto r = graph.add_edge(std::move(e)); !r.ok()) {
                lp.ref_error(conn_col, r.error().message, line);
            }
        } else {
            lp.syntax_error(toks[0].column,
                            "unknown statement '" + stmt + "' (expected node, pipe or signal)",
                            stmt);
        }
    }

    if (!syntax.empty() || !referential.empty()) {
        std::vector<ParseError> all = std::move(syntax);
        all.insert(all.end(), referential.begin(), referential.end());
        return all;
    }
    return graph;
}

}  // namespace twingraph
