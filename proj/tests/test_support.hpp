#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dagbayes/conjugate.hpp"
#include "dagbayes/graph.hpp"

namespace testsupport {

inline std::string data_path(const std::string& rel) {
    return std::string(DAGBAYES_DATA_DIR) + "/" + rel;
}

inline dagbayes::Dag influenza_dag() {
    return dagbayes::load_graph(data_path("influenza/graph.txt"));
}

inline dagbayes::TransitionCounts influenza_counts(const dagbayes::Dag& dag) {
    return dagbayes::load_counts_csv(data_path("influenza/counts.csv"), dag);
}

// Random DAG with a unique source and a non-empty absorbing set: nodes
// 0..n-1 in topological order, each node past the first gets one edge
// from an earlier node, plus extra forward edges at random.
inline dagbayes::Dag random_dag(std::mt19937_64& rng, int max_nodes = 8) {
    std::uniform_int_distribution<int> node_count(2, max_nodes);
    const int n = node_count(rng);
    std::vector<std::pair<std::string, std::string>> edges;
    auto name = [](int i) { return std::string(1, static_cast<char>('a' + i)); };
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> parent(0, v - 1);
        edges.emplace_back(name(parent(rng)), name(v));
    }
    std::bernoulli_distribution extra(0.35);
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            bool present = false;
            for (const auto& e : edges) {
                if (e.first == name(u) && e.second == name(v)) present = true;
            }
            if (!present && extra(rng)) edges.emplace_back(name(u), name(v));
        }
    }
    return dagbayes::Dag::from_edges(edges);
}

inline std::vector<dagbayes::NodePosterior> random_posteriors(const dagbayes::Dag& dag,
                                                              std::mt19937_64& rng) {
    std::uniform_real_distribution<double> alpha(0.3, 6.0);
    std::vector<dagbayes::NodePosterior> posteriors;
    for (std::size_t v = 0; v < dag.node_count(); ++v) {
        auto parent = static_cast<dagbayes::NodeId>(v);
        if (dag.out_degree(parent) == 0) continue;
        dagbayes::NodePosterior block;
        block.parent = parent;
        block.children = dag.children(parent);
        for (std::size_t j = 0; j < block.children.size(); ++j) block.alpha.push_back(alpha(rng));
        posteriors.push_back(std::move(block));
    }
    return posteriors;
}

// Independent oracle: number of from->to paths by the counting dynamic
// program over topological order.
inline std::uint64_t path_count_oracle(const dagbayes::Dag& dag, dagbayes::NodeId from,
                                       dagbayes::NodeId to) {
    auto order = dagbayes::topological_order(dag);
    std::vector<std::uint64_t> count(dag.node_count(), 0);
    count[static_cast<std::size_t>(to)] = 1;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (*it == to) continue;
        std::uint64_t c = 0;
        for (dagbayes::NodeId child : dag.children(*it)) {
            c += count[static_cast<std::size_t>(child)];
        }
        count[static_cast<std::size_t>(*it)] = c;
    }
    return count[static_cast<std::size_t>(from)];
}

}  // namespace testsupport
