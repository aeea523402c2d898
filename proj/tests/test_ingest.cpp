#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "twingraph/export.hpp"
#include "twingraph/ingest.hpp"

using namespace twingraph;

namespace {

ProcessGraph parse_ok(const std::string& text, const std::string& id = "test") {
    auto r = parse_pidl({id, SourceFormat::Pidl, text});
    if (!r.ok()) {
        std::string all;
        for (const auto& e : r.error()) {
            all += std::to_string(e.line) + ":" + std::to_string(e.column) + " " + e.message +
                   "; ";
        }
        FAIL("parse failed: " << all);
    }
    return std::move(r).value();
}

std::vector<ParseError> parse_errors(const std::string& text) {
    auto r = parse_pidl({"test", SourceFormat::Pidl, text});
    REQUIRE(!r.ok());
    return r.error();
}

}  // namespace

TEST_CASE("a single node declaration") {
    ProcessGraph g = parse_ok("node T1 type=tank volume=2.5\n");
    REQUIRE(g.node_count() == 1);
    const Node* t1 = g.find_node("T1");
    REQUIRE(t1);
    CHECK(t1->kind.tag == KindTag::Tank);
    CHECK(t1->attrs.at("volume").number() == 2.5);
    REQUIRE(t1->nozzles.size() == 2);
    CHECK(t1->nozzles[0].id == "in1");
    CHECK(t1->nozzles[1].id == "out1");
    CHECK(g.meta().at("source") == "test");
}

TEST_CASE("an undeclared endpoint is a referential error with its line") {
    auto errors = parse_errors(
        "node S1 type=source flow=10\n"
        "node P1 type=pump max_flow=12\n"
        "pipe a1: S1.out1 -> P1.in1\n"
        "pipe a2: P1.out1 -> K1.in1\n");
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].line == 4);
    CHECK(errors[0].message.find("K1") != std::string::npos);
}

TEST_CASE("the demo plant parses to 5 nodes, 4 pipes, 0 signals") {
    ProcessGraph g = parse_ok(fixtures::clean_plant_pidl());
    CHECK(g.node_count() == 5);
    CHECK(g.edge_count(EdgeKind::ProcessFlow) == 4);
    CHECK(g.edge_count(EdgeKind::Signal) == 0);
    CHECK(g.check_integrity().ok());
}

TEST_CASE("node kinds, nozzle declarations and value types") {
    SUBCASE("every kind keyword parses") {
        ProcessGraph g = parse_ok(
            "node a type=tank\nnode b type=pump\nnode c type=valve\nnode d type=mixer\n"
            "node e type=splitter\nnode f type=hx\nnode g type=instrument\n"
            "node h type=controller\nnode i type=source\nnode j type=sink\n"
            "node k type=other:reactor\n");
        CHECK(g.node_count() == 11);
        CHECK(g.find_node("k")->kind.other_name == "reactor");
    }
    SUBCASE("stream is reserved for rewrites") {
        auto errors = parse_errors("node s type=stream\n");
        CHECK(errors[0].message.find("stream") != std::string::npos);
    }
    SUBCASE("explicit nozzle counts") {
        ProcessGraph g = parse_ok("node M type=mixer in=3 out=2\n");
        const Node* m = g.find_node("M");
        REQUIRE(m->nozzles.size() == 5);
        CHECK(m->find_nozzle("in3")->direction == NozzleDirection::Inlet);
        CHECK(m->find_nozzle("out2")->ordinal == 1);
    }
    SUBCASE("declaring one side zeroes the other") {
        ProcessGraph g = parse_ok("node K type=sink in=2\n");
        CHECK(g.find_node("K")->nozzles.size() == 2);
    }
    SUBCASE("controller and other default to no nozzles") {
        ProcessGraph g = parse_ok("node C type=controller\nnode R type=other:reactor\n");
        CHECK(g.find_node("C")->nozzles.empty());
        CHECK(g.find_node("R")->nozzles.empty());
    }
    SUBCASE("numbers, booleans and text") {
        ProcessGraph g = parse_ok(
            "node T type=tank volume=1.5e-2 insulated=true material=steel count=3\n");
        const Node* t = g.find_node("T");
        CHECK(t->attrs.at("volume").number() == doctest::Approx(0.015));
        CHECK(t->attrs.at("insulated").boolean());
        CHECK(t->attrs.at("material").text() == "steel");
        CHECK(t->attrs.at("count").number() == 3.0);
    }
}

TEST_CASE("comments, blank lines and CRLF endings") {
    ProcessGraph lf = parse_ok("# header\n\nnode T1 type=tank\n");
    ProcessGraph crlf = parse_ok("# header\r\n\r\nnode T1 type=tank\r\n");
    CHECK(lf == crlf);
}

TEST_CASE("pipes accept glued and spaced arrows") {
    ProcessGraph spaced = parse_ok(
        "node S type=source\nnode K type=sink\npipe e1: S.out1 -> K.in1\n");
    ProcessGraph glued = parse_ok(
        "node S type=source\nnode K type=sink\npipe e1: S.out1->K.in1\n");
    CHECK(spaced == glued);
}

TEST_CASE("syntax errors carry exact positions") {
    SUBCASE("unknown statement") {
        auto errors = parse_errors("nod T1 type=tank\n");
        CHECK(errors[0].line == 1);
        CHECK(errors[0].column == 1);
    }
    SUBCASE("unknown kind names its column") {
        auto errors = parse_errors("node T1 type=blimp\n");
        CHECK(errors[0].line == 1);
        CHECK(errors[0].column == 9);
        CHECK(errors[0].snippet == "type=blimp");
    }
    SUBCASE("missing type") {
        auto errors = parse_errors("node T1 volume=2\n");
        CHECK(errors[0].message.find("type=") != std::string::npos);
    }
    SUBCASE("duplicate node tag reports the re-declaring line") {
        auto errors = parse_errors("node T1 type=tank\nnode T1 type=pump\n");
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].line == 2);
    }
    SUBCASE("occupied nozzle reports the second pipe") {
        auto errors = parse_errors(
            "node S type=source out=2\nnode T type=source\nnode K type=sink\n"
            "pipe e1: S.out1 -> K.in1\npipe e2: T.out1 -> K.in1\n");
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].line == 5);
    }
    SUBCASE("syntax errors precede referential errors") {
        auto errors = parse_errors(
            "pipe e1: S.out1 -> K.in1\n"
            "node ?bad type=tank\n");
        REQUIRE(errors.size() == 2);
        CHECK(errors[0].line == 2);  // syntax first
        CHECK(errors[1].line == 1);  // then the unresolved pipe
    }
}

TEST_CASE("every malformed line yields an error inside the input") {
    const char* cases[] = {
        "node\n",
        "pipe\n",
        "node T1\n",
        "pipe p1 S.out1 -> K.in1\n",
        "pipe p1: S.out1\n",
        "pipe p1: S -> K\n",
        "signal s1: A.x -> B\n",
        "node T1 type=tank in=-2\n",
        "node T1 type=tank =3\n",
        "pipe p1: A.out1 -> B.in1 -> C.in1\n",
        "node T1 type=other:\n",
        "\xE2\x98\x83 line\n",
    };
    for (const char* text : cases) {
        CAPTURE(text);
        auto r = parse_pidl({"fuzz", SourceFormat::Pidl, text});
        REQUIRE(!r.ok());
        std::string input(text);
        std::size_t line_count = std::count(input.begin(), input.end(), '\n');
        for (const auto& e : r.error()) {
            CHECK(e.line >= 1);
            CHECK(e.line <= static_cast<int>(line_count));
            CHECK(e.column >= 1);
            CHECK(!e.message.empty());
        }
    }
}

TEST_CASE("node declaration order does not matter before first use") {
    std::string decls[] = {
        "node S1 type=source flow=10\n",
        "node P1 type=pump max_flow=12\n",
        "node K1 type=sink\n",
    };
    std::string edges = "pipe e1: S1.out1 -> P1.in1\npipe e2: P1.out1 -> K1.in1\n";
    std::sort(std::begin(decls), std::end(decls));
    ProcessGraph reference = parse_ok(decls[0] + decls[1] + decls[2] + edges);
    do {
        ProcessGraph permuted = parse_ok(decls[0] + decls[1] + decls[2] + edges);
        CHECK(permuted == reference);
    } while (std::next_permutation(std::begin(decls), std::end(decls)));
}

TEST_CASE("identical bytes parse to identical graphs") {
    std::string text = fixtures::clean_plant_pidl();
    CHECK(parse_ok(text) == parse_ok(text));
}

TEST_CASE("GraphJSON round-trips and rejects malformed documents") {
    SUBCASE("round trip of a fixture") {
        ProcessGraph g = fixtures::instrumented_plant();
        auto r = parse_graph_json({"rt", SourceFormat::GraphJson, to_json(g)});
        REQUIRE(r.ok());
        CHECK(*r == g);
    }
    SUBCASE("missing nodes key") {
        auto r = parse_graph_json(
            {"t", SourceFormat::GraphJson,
             R"({"edges":[],"format_version":"1","meta":{}})"});
        REQUIRE(!r.ok());
        bool found = false;
        for (const auto& e : r.error()) {
            found |= e.path == "/nodes";
        }
        CHECK(found);
    }
    SUBCASE("unknown top-level key") {
        auto r = parse_graph_json(
            {"t", SourceFormat::GraphJson,
             R"({"edges":[],"extra":1,"format_version":"1","meta":{},"nodes":[]})"});
        REQUIRE(!r.ok());
        CHECK(r.error()[0].path == "/extra");
    }
    SUBCASE("unsupported format version") {
        auto r = parse_graph_json(
            {"t", SourceFormat::GraphJson,
             R"({"edges":[],"format_version":"2","meta":{},"nodes":[]})"});
        REQUIRE(!r.ok());
        CHECK(r.error()[0].path == "/format_version");
    }
    SUBCASE("edge referencing an absent nozzle names the edge") {
        ProcessGraph g = fixtures::clean_plant();
        std::string text = to_json(g);
        auto pos = text.find("\"nozzle\":\"out1\"");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 15, "\"nozzle\":\"out9\"");
        auto r = parse_graph_json({"t", SourceFormat::GraphJson, text});
        REQUIRE(!r.ok());
        bool named = false;
        for (const auto& e : r.error()) {
            named |= e.message.find("'e1'") != std::string::npos ||
                     e.message.find("out9") != std::string::npos;
        }
        CHECK(named);
    }
    SUBCASE("not JSON at all") {
        auto r = parse_graph_json({"t", SourceFormat::GraphJson, "not json"});
        REQUIRE(!r.ok());
    }
}
