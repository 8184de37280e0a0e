#include <doctest.h>

#include <algorithm>
#include <set>

#include "dagbayes/graph.hpp"
#include "test_support.hpp"

using namespace dagbayes;

namespace {

// arc list in the order the cohort description gives it
constexpr const char* kArcListText =
    "A I\nA W1\nW1 I\nI W2\nW1 D\nW1 H\nW1 L\nW2 D\nW2 H\nW2 L\n";

}  // namespace

TEST_CASE("parse_graph reads the cohort arc list") {
    Dag dag = parse_graph(kArcListText);
    CHECK(dag.node_count() == 7);
    CHECK(dag.edge_count() == 10);
    // nodes in first-mention order
    CHECK(dag.node_names()[0] == "A");
    CHECK(dag.node_names()[1] == "I");
    CHECK(dag.node_names()[2] == "W1");
    CHECK(dag.edge_index(dag.node("A"), dag.node("I")) == 0);
    CHECK(dag.edge_index(dag.node("W2"), dag.node("L")) == 9);
}

TEST_CASE("parse_graph minimal and error cases") {
    Dag two = parse_graph("A B\n");
    CHECK(two.node_count() == 2);
    CHECK(two.edge_count() == 1);

    CHECK_THROWS_AS(parse_graph("A A\n"), ParseError);
    CHECK_THROWS_AS(parse_graph("A B\nA B\n"), ParseError);
    CHECK_THROWS_AS(parse_graph("A B C\n"), ParseError);
    CHECK_THROWS_AS(parse_graph("A B!\n"), ParseError);
    CHECK_THROWS_WITH_AS(parse_graph("A B\nX\n"), doctest::Contains("line 2"), ParseError);

    Dag commented = parse_graph("# header\n\nA B\n  # indented comment\nB C\n");
    CHECK(commented.edge_count() == 2);
}

TEST_CASE("validate accepts the bundled graph") {
    Dag dag = testsupport::influenza_dag();
    ValidationReport report = validate(dag);
    CHECK(report.valid());
    CHECK(dag.node_count() == 7);
    CHECK(dag.edge_count() == 11);
}

TEST_CASE("validate reports cycles with a witness") {
    Dag dag = Dag::from_edges({{"A", "B"}, {"B", "A"}});
    ValidationReport report = validate(dag);
    CHECK_FALSE(report.valid());
    bool has_cycle_failure = false;
    for (const auto& f : report.failures) {
        if (f.find("cycle") != std::string::npos) {
            has_cycle_failure = true;
            CHECK(f.find("A->B->A") != std::string::npos);
        }
    }
    CHECK(has_cycle_failure);
}

TEST_CASE("cycle witness survives dangling tails off the cycle") {
    // D hangs off the B<->C cycle; the witness walk must stay on the cycle
    ValidationReport report =
        validate(Dag::from_edges({{"A", "X"}, {"B", "C"}, {"C", "B"}, {"C", "D"}}));
    CHECK_FALSE(report.valid());
    bool has_witness = false;
    for (const auto& f : report.failures) {
        if (f.find("cycle found") != std::string::npos) {
            has_witness = true;
            CHECK((f.find("B->C->B") != std::string::npos || f.find("C->B->C") != std::string::npos));
        }
    }
    CHECK(has_witness);
}

TEST_CASE("validate rejects multiple sources and unreachable nodes") {
    ValidationReport two_sources = validate(Dag::from_edges({{"A", "B"}, {"C", "B"}}));
    CHECK_FALSE(two_sources.valid());
    bool mentions_sources = false;
    for (const auto& f : two_sources.failures) {
        if (f.find("in-degree-0") != std::string::npos) mentions_sources = true;
    }
    CHECK(mentions_sources);

    // cycle island off the main component: single source, but B and C
    // are unreachable from it
    ValidationReport island = validate(Dag::from_edges({{"A", "X"}, {"B", "C"}, {"C", "B"}}));
    CHECK_FALSE(island.valid());
    bool mentions_unreachable = false;
    for (const auto& f : island.failures) {
        if (f.find("unreachable") != std::string::npos) mentions_unreachable = true;
    }
    CHECK(mentions_unreachable);
}

TEST_CASE("classify_nodes partitions by degree") {
    Dag dag = testsupport::influenza_dag();
    NodeClassification cls = classify_nodes(dag);
    CHECK(dag.name(cls.source) == "A");
    auto names = [](const Dag& d, const std::vector<NodeId>& ids) {
        std::set<std::string> out;
        for (NodeId id : ids) out.insert(d.name(id));
        return out;
    };
    CHECK(names(dag, cls.transient) == std::set<std::string>{"I", "W1", "W2"});
    CHECK(names(dag, cls.absorbing) == std::set<std::string>{"D", "H", "L"});

    Dag chain = Dag::from_edges({{"A", "B"}, {"B", "C"}});
    NodeClassification chain_cls = classify_nodes(chain);
    CHECK(chain.name(chain_cls.source) == "A");
    CHECK(names(chain, chain_cls.transient) == std::set<std::string>{"B"});

    Dag star = Dag::from_edges({{"A", "B"}, {"A", "C"}});
    NodeClassification star_cls = classify_nodes(star);
    CHECK(star_cls.transient.empty());
    CHECK(star_cls.absorbing.size() == 2);
}

TEST_CASE("topological_order satisfies every edge and breaks ties by declaration") {
    Dag dag = testsupport::influenza_dag();
    auto order = topological_order(dag);
    REQUIRE(order.size() == dag.node_count());
    std::vector<std::size_t> pos(dag.node_count());
    for (std::size_t i = 0; i < order.size(); ++i) pos[static_cast<std::size_t>(order[i])] = i;
    for (const Edge& e : dag.edges()) {
        CHECK(pos[static_cast<std::size_t>(e.src)] < pos[static_cast<std::size_t>(e.dst)]);
    }

    CHECK(topological_order(parse_graph("")).empty());

    Dag chain = Dag::from_edges({{"A", "B"}, {"B", "C"}});
    auto chain_order = topological_order(chain);
    CHECK(chain_order == std::vector<NodeId>{0, 1, 2});

    CHECK_THROWS_AS(topological_order(Dag::from_edges({{"A", "B"}, {"B", "A"}})), NumericError);
}

TEST_CASE("enumerate_paths lists every route") {
    Dag dag = testsupport::influenza_dag();
    auto paths_to_d = enumerate_paths(dag, dag.node("A"), dag.node("D"));
    REQUIRE(paths_to_d.size() == 5);
    std::set<std::string> labels;
    for (const Path& p : paths_to_d) labels.insert(format_path(dag, p));
    CHECK(labels == std::set<std::string>{"A-I-W2-D", "A-I-D", "A-W1-I-W2-D", "A-W1-I-D", "A-W1-D"});

    CHECK(enumerate_paths(dag, dag.node("A"), dag.node("H")).size() == 3);
    CHECK(enumerate_paths(dag, dag.node("A"), dag.node("L")).size() == 3);
    CHECK(enumerate_paths(dag, dag.node("D"), dag.node("A")).empty());

    auto self = enumerate_paths(dag, dag.node("A"), dag.node("A"));
    REQUIRE(self.size() == 1);
    CHECK(self[0] == Path{dag.node("A")});
}

TEST_CASE("enumerate_paths honors the path cap") {
    // layered graph with 2^5 paths
    std::vector<std::pair<std::string, std::string>> edges;
    std::vector<std::string> layer{"s"};
    for (int l = 0; l < 5; ++l) {
        std::string a = "a" + std::to_string(l);
        std::string b = "b" + std::to_string(l);
        std::string next = "m" + std::to_string(l);
        for (const auto& from : layer) {
            edges.emplace_back(from, a);
            edges.emplace_back(from, b);
        }
        edges.emplace_back(a, next);
        edges.emplace_back(b, next);
        layer = {next};
    }
    Dag dag = Dag::from_edges(edges);
    CHECK(enumerate_paths(dag, dag.node("s"), dag.node("m4")).size() == 32);
    CHECK_THROWS_AS(enumerate_paths(dag, dag.node("s"), dag.node("m4"), 31), NumericError);
}

TEST_CASE("random DAG properties: paths, partition, order") {
    std::mt19937_64 rng(20240611);
    for (int trial = 0; trial < 60; ++trial) {
        Dag dag = testsupport::random_dag(rng);
        REQUIRE(validate(dag).valid());

        NodeClassification cls = classify_nodes(dag);
        CHECK(1 + cls.transient.size() + cls.absorbing.size() == dag.node_count());

        auto order = topological_order(dag);
        std::vector<std::size_t> pos(dag.node_count());
        for (std::size_t i = 0; i < order.size(); ++i) pos[static_cast<std::size_t>(order[i])] = i;
        for (const Edge& e : dag.edges()) {
            CHECK(pos[static_cast<std::size_t>(e.src)] < pos[static_cast<std::size_t>(e.dst)]);
        }

        std::uniform_int_distribution<int> pick(0, static_cast<int>(dag.node_count()) - 1);
        NodeId from = pick(rng);
        NodeId to = pick(rng);
        auto paths = enumerate_paths(dag, from, to);
        CHECK(paths.size() == testsupport::path_count_oracle(dag, from, to));
        std::set<std::string> unique;
        for (const Path& p : paths) {
            for (std::size_t i = 0; i + 1 < p.size(); ++i) {
                CHECK(dag.edge_index(p[i], p[i + 1]) >= 0);
            }
            unique.insert(format_path(dag, p));
        }
        CHECK(unique.size() == paths.size());
    }
}
