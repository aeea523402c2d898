#include <doctest.h>

#include <json.hpp>
#include <random>

#include "helpers.hpp"
#include "twingraph/export.hpp"
#include "twingraph/ingest.hpp"
#include "twingraph/transform.hpp"

using namespace twingraph;
using fixtures::element;
using fixtures::pipe;
using fixtures::signal;

namespace {

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

ProcessGraph rewritten_two_elements() {
    ProcessGraph g;
    fixtures::must(g.add_node(element("S1", KindTag::Source, {{"flow", 5.0}})));
    fixtures::must(g.add_node(element("K1", KindTag::Sink)));
    fixtures::must(g.add_edge(pipe("e1", "S1", "out1", "K1", "in1")));
    auto filtered = filter_fidelity(g, FidelityProfile::steady_state());
    auto result = apply_ruleset(*filtered, fixtures::stream_rules());
    return result->graph;
}

}  // namespace

TEST_CASE("the empty graph has fixed canonical bytes") {
    CHECK(to_json(ProcessGraph{}) == R"({"edges":[],"format_version":"1","meta":{},"nodes":[]})");
}

TEST_CASE("canonical JSON is byte-identical across construction orders") {
    std::mt19937 rng(41);
    for (int round = 0; round < 25; ++round) {
        ProcessGraph g = fixtures::random_graph(rng, 25);
        std::string reference = to_json(g);
        for (int i = 0; i < 3; ++i) {
            ProcessGraph shuffled = fixtures::rebuild_shuffled(g, rng);
            REQUIRE(shuffled == g);
            CHECK(to_json(shuffled) == reference);
        }
    }
}

TEST_CASE("numbers serialize as shortest round-trip decimals") {
    ProcessGraph g;
    Node t = element("T1", KindTag::Tank);
    t.attrs["a"] = 0.1;
    t.attrs["b"] = 2.5;
    t.attrs["c"] = 10.0;
    t.attrs["d"] = 1e30;
    t.attrs["e"] = 1.0 / 3.0;
    REQUIRE(g.add_node(t).ok());
    std::string text = to_json(g);
    CHECK(text.find("\"a\":0.1,") != std::string::npos);
    CHECK(text.find("\"b\":2.5,") != std::string::npos);
    CHECK(text.find("\"c\":10,") != std::string::npos);
    CHECK(text.find("\"d\":1e+30,") != std::string::npos);

    auto parsed = parse_graph_json({"rt", SourceFormat::GraphJson, text});
    REQUIRE(parsed.ok());
    CHECK(parsed->find_node("T1")->attrs.at("e").number() == 1.0 / 3.0);
    CHECK(*parsed == g);
}

TEST_CASE("strings with JSON metacharacters survive the round trip") {
    ProcessGraph g{{{"note", "line1\nline2\t\"quoted\" \\ slash"}}};
    Node t = element("T1", KindTag::Tank);
    t.attrs["label"] = std::string("a\"b\\c\ncontrol\x01");
    REQUIRE(g.add_node(t).ok());
    auto parsed = parse_graph_json({"rt", SourceFormat::GraphJson, to_json(g)});
    REQUIRE(parsed.ok());
    CHECK(*parsed == g);
}

TEST_CASE("DOT output lists nodes and edges in tag order") {
    ProcessGraph g;
    REQUIRE(g.add_node(element("S1", KindTag::Source, {{"flow", 5.0}})).ok());
    REQUIRE(g.add_node(element("K1", KindTag::Sink)).ok());
    REQUIRE(g.add_edge(pipe("e1", "S1", "out1", "K1", "in1")).ok());

    std::string dot = to_dot(g);
    CHECK(dot.rfind("digraph", 0) == 0);
    CHECK(count_occurrences(dot, "[label=") == 3);  // 2 nodes + 1 edge
    CHECK(count_occurrences(dot, "->") == 1);
    CHECK(count_occurrences(dot, "style=dashed") == 0);
    CHECK(count_occurrences(dot, "{") == count_occurrences(dot, "}"));
    CHECK(dot.find("\"K1\" [label=\"K1\\nsink\"];") != std::string::npos);

    SUBCASE("signal edges are dashed") {
        ProcessGraph h = fixtures::instrumented_plant();
        std::string text = to_dot(h);
        CHECK(count_occurrences(text, "style=dashed") == 2);  // s1 and s2
    }
    SUBCASE("one node statement per node on the demo plant") {
        ProcessGraph h = fixtures::clean_plant();
        std::string text = to_dot(h);
        std::size_t node_statements = 0;
        std::size_t start = 0;
        while (true) {
            auto pos = text.find('\n', start);
            if (pos == std::string::npos) {
                break;
            }
            std::string line = text.substr(start, pos - start);
            if (line.find("[label=") != std::string::npos &&
                line.find("->") == std::string::npos) {
                ++node_statements;
            }
            start = pos + 1;
        }
        CHECK(node_statements == h.node_count());
    }
}

TEST_CASE("GraphML carries attributes as declared data keys") {
    SUBCASE("empty graph has only declarations") {
        std::string xml = to_graphml(ProcessGraph{});
        CHECK(xml.rfind("<?xml", 0) == 0);
        CHECK(count_occurrences(xml, "<node ") == 0);
        CHECK(count_occurrences(xml, "<edge ") == 0);
        CHECK(count_occurrences(xml, "<key ") == 2);  // node kind + edge kind
    }
    SUBCASE("a tank volume becomes one data element") {
        ProcessGraph g;
        REQUIRE(g.add_node(element("T1", KindTag::Tank, {{"volume", 2.5}})).ok());
        std::string xml = to_graphml(g);
        CHECK(count_occurrences(xml, ">2.5</data>") == 1);
        CHECK(count_occurrences(xml, "attr.name=\"volume\" attr.type=\"double\"") == 1);
    }
    SUBCASE("each attribute key is declared exactly once") {
        ProcessGraph g = fixtures::clean_plant();
        std::string xml = to_graphml(g);
        CHECK(count_occurrences(xml, "attr.name=\"diameter\"") == 1);
        CHECK(count_occurrences(xml, "attr.name=\"material\"") == 1);
        CHECK(count_occurrences(xml, "<node ") == g.node_count());
        CHECK(count_occurrences(xml, "<edge ") == g.edge_count());
    }
    SUBCASE("elements balance") {
        for (const ProcessGraph& g : {fixtures::clean_plant(), fixtures::instrumented_plant()}) {
            std::string xml = to_graphml(g);
            CHECK(count_occurrences(xml, "<node ") == count_occurrences(xml, "</node>"));
            CHECK(count_occurrences(xml, "<edge ") == count_occurrences(xml, "</edge>"));
            CHECK(count_occurrences(xml, "<graphml") == count_occurrences(xml, "</graphml>"));
            CHECK(count_occurrences(xml, "<data ") == count_occurrences(xml, "</data>"));
        }
    }
    SUBCASE("XML metacharacters are escaped") {
        ProcessGraph g;
        REQUIRE(g.add_node(element("T1", KindTag::Tank, {{"note", "a<b&c>d"}})).ok());
        std::string xml = to_graphml(g);
        CHECK(xml.find("a&lt;b&amp;c&gt;d") != std::string::npos);
        CHECK(xml.find("a<b&c>d") == std::string::npos);
    }
    SUBCASE("attributes named like built-in keys fold into them") {
        ProcessGraph g;
        REQUIRE(g.add_node(element("T1", KindTag::Tank, {{"kind", "vertical"},
                                                         {"position", "north"}})).ok());
        std::string xml = to_graphml(g);
        CHECK(count_occurrences(xml, "attr.name=\"kind\"") == 2);  // node + edge domains
        CHECK(count_occurrences(xml, "attr.name=\"position\"") == 1);
        CHECK(count_occurrences(xml, ">vertical</data>") == 1);
        CHECK(count_occurrences(xml, ">north</data>") == 1);
    }
}

TEST_CASE("SimSpec export needs a stream-rewritten graph") {
    SUBCASE("two elements and one stream") {
        ProcessGraph g = rewritten_two_elements();
        auto spec = to_simspec(g, "demo-sim");
        REQUIRE(spec.ok());
        CHECK(spec->simulator_name == "demo-sim");
        CHECK(spec->fidelity == "steady_state");
        REQUIRE(spec->components.size() == 2);
        REQUIRE(spec->connections.size() == 1);
        CHECK(spec->connections[0].from == "S1");
        CHECK(spec->connections[0].to == "K1");
        CHECK(spec->connections[0].stream == "S@e1");
    }
    SUBCASE("an un-rewritten pipe is refused") {
        ProcessGraph g = fixtures::clean_plant();
        g.meta()["fidelity"] = "steady_state";
        auto spec = to_simspec(g, "demo-sim");
        REQUIRE(!spec.ok());
        CHECK(spec.error().code == Errc::NotRewritten);
    }
    SUBCASE("missing fidelity is a precondition failure") {
        auto spec = to_simspec(fixtures::clean_plant(), "demo-sim");
        REQUIRE(!spec.ok());
        CHECK(spec.error().code == Errc::Precondition);
    }
    SUBCASE("counts follow the rewrite arithmetic on the demo plant") {
        ProcessGraph g = fixtures::clean_plant();
        auto filtered = filter_fidelity(g, FidelityProfile::steady_state());
        REQUIRE(filtered.ok());
        auto rewritten = apply_ruleset(*filtered, fixtures::stream_rules());
        REQUIRE(rewritten.ok());
        auto spec = to_simspec(rewritten->graph, "demo-sim");
        REQUIRE(spec.ok());
        CHECK(spec->components.size() == 5);
        CHECK(spec->connections.size() == 4);

        std::size_t streams = 0;
        for (const auto& [tag, n] : rewritten->graph.nodes()) {
            streams += n.kind.tag == KindTag::Stream;
        }
        CHECK(spec->connections.size() == streams);
        CHECK(spec->components.size() == rewritten->graph.node_count() - streams);

        nlohmann::json j = nlohmann::json::parse(simspec_to_json(*spec));
        CHECK(j["simulator_name"] == "demo-sim");
        CHECK(j["components"].size() == 5);
        CHECK(j["connections"].size() == 4);
        CHECK(j["components"][0]["params"].is_object());
    }
}

TEST_CASE("exports leave the graph untouched") {
    ProcessGraph g = fixtures::instrumented_plant();
    ProcessGraph before = g;
    (void)to_json(g);
    (void)to_dot(g);
    (void)to_graphml(g);
    CHECK(g == before);
}
