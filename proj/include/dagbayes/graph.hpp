#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dagbayes/errors.hpp"

namespace dagbayes {

using NodeId = int;

struct Edge {
    NodeId src;
    NodeId dst;
    friend bool operator==(const Edge&, const Edge&) = default;
};

// Directed acyclic graph over named nodes. Nodes are stored in
// first-mention order, edges in declaration order; both orders are
// observable (they fix child ordering in posterior blocks and the
// traversal order of path enumeration). Immutable once built.
class Dag {
public:
    // Builds from an ordered edge list of node names. Rejects self-loops
    // and duplicate edges; acyclicity is checked by validate(), not here.
    static Dag from_edges(const std::vector<std::pair<std::string, std::string>>& edges);

    std::size_t node_count() const { return names_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const std::vector<std::string>& node_names() const { return names_; }
    const std::string& name(NodeId v) const { return names_[static_cast<std::size_t>(v)]; }

    // Throws ParseError on unknown identifiers.
    NodeId node(std::string_view name) const;
    bool has_node(std::string_view name) const;

    const std::vector<Edge>& edges() const { return edges_; }
    // Edge index in declaration order, or -1 if absent.
    int edge_index(NodeId src, NodeId dst) const;

    // Children/parents in edge declaration order.
    const std::vector<NodeId>& children(NodeId v) const { return children_[static_cast<std::size_t>(v)]; }
    const std::vector<NodeId>& parents(NodeId v) const { return parents_[static_cast<std::size_t>(v)]; }
    // Edge indices of v's outgoing edges, aligned with children(v).
    const std::vector<int>& out_edges(NodeId v) const { return out_edges_[static_cast<std::size_t>(v)]; }

    std::size_t out_degree(NodeId v) const { return children_[static_cast<std::size_t>(v)].size(); }
    std::size_t in_degree(NodeId v) const { return parents_[static_cast<std::size_t>(v)].size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, NodeId> index_;
    std::vector<Edge> edges_;
    std::vector<std::vector<NodeId>> children_;
    std::vector<std::vector<NodeId>> parents_;
    std::vector<std::vector<int>> out_edges_;
};

struct NodeClassification {
    NodeId source = -1;
    std::vector<NodeId> transient;
    std::vector<NodeId> absorbing;
};

// Node sequence; consecutive pairs are edges of the Dag.
using Path = std::vector<NodeId>;

struct ValidationReport {
    std::vector<std::string> failures;
    bool valid() const { return failures.empty(); }
};

// Parses the edge-list format: one "SRC DST" pair per line, whitespace
// separated; blank lines and '#' comments ignored; identifiers match
// [A-Za-z0-9_]+. Throws ParseError with the offending line number.
Dag parse_graph(std::string_view text);
Dag load_graph(const std::string& path);

// Structural checks: acyclicity (with a cycle witness), a unique
// in-degree-0 source, reachability of every node from it, and a
// non-empty absorbing set. Failures are report entries, not errors.
ValidationReport validate(const Dag& dag);

// Requires a valid dag.
NodeClassification classify_nodes(const Dag& dag);

// Deterministic topological order: ties broken by node declaration
// order. Throws NumericError if a cycle is present.
std::vector<NodeId> topological_order(const Dag& dag);

inline constexpr std::size_t kDefaultPathCap = 1000000;

// All directed paths from `from` to `to`, depth-first with children in
// edge declaration order. Returns {{from}} when from == to and an empty
// list when `to` is unreachable. Throws NumericError past `path_cap`.
std::vector<Path> enumerate_paths(const Dag& dag, NodeId from, NodeId to,
                                  std::size_t path_cap = kDefaultPathCap);

std::string format_path(const Dag& dag, const Path& path);

}  // namespace dagbayes
