#include "dagbayes/graph.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace dagbayes {

namespace {

bool valid_identifier(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    }
    return true;
}

}  // namespace

Dag Dag::from_edges(const std::vector<std::pair<std::string, std::string>>& edges) {
    Dag dag;
    auto intern = [&dag](const std::string& name) -> NodeId {
        auto it = dag.index_.find(name);
        if (it != dag.index_.end()) return it->second;
        NodeId id = static_cast<NodeId>(dag.names_.size());
        dag.names_.push_back(name);
        dag.index_.emplace(name, id);
        return id;
    };
    for (const auto& [src_name, dst_name] : edges) {
        if (src_name == dst_name) {
            throw ParseError("self-loop on node '" + src_name + "'");
        }
        NodeId src = intern(src_name);
        NodeId dst = intern(dst_name);
        for (const Edge& e : dag.edges_) {
            if (e.src == src && e.dst == dst) {
                throw ParseError("duplicate edge " + src_name + " -> " + dst_name);
            }
        }
        dag.edges_.push_back({src, dst});
    }
    dag.children_.resize(dag.names_.size());
    dag.parents_.resize(dag.names_.size());
    dag.out_edges_.resize(dag.names_.size());
    for (std::size_t i = 0; i < dag.edges_.size(); ++i) {
        const Edge& e = dag.edges_[i];
        dag.children_[static_cast<std::size_t>(e.src)].push_back(e.dst);
        dag.out_edges_[static_cast<std::size_t>(e.src)].push_back(static_cast<int>(i));
        dag.parents_[static_cast<std::size_t>(e.dst)].push_back(e.src);
    }
    return dag;
}

NodeId Dag::node(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) {
        throw ParseError("unknown node identifier '" + std::string(name) + "'");
    }
    return it->second;
}

bool Dag::has_node(std::string_view name) const {
    return index_.find(std::string(name)) != index_.end();
}

int Dag::edge_index(NodeId src, NodeId dst) const {
    const auto& outs = out_edges_[static_cast<std::size_t>(src)];
    const auto& kids = children_[static_cast<std::size_t>(src)];
    for (std::size_t k = 0; k < kids.size(); ++k) {
        if (kids[k] == dst) return outs[k];
    }
    return -1;
}

Dag parse_graph(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> edges;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = (eol == std::string_view::npos)
                                    ? text.substr(pos)
                                    : text.substr(pos, eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;

        std::vector<std::string> tokens;
        std::istringstream iss{std::string(line)};
        std::string tok;
        while (iss >> tok) tokens.push_back(tok);
        if (tokens.empty() || tokens[0][0] == '#') continue;

        if (tokens.size() != 2) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected 'SRC DST', got " + std::to_string(tokens.size()) +
                             " token(s)");
        }
        for (const std::string& t : tokens) {
            if (!valid_identifier(t)) {
                throw ParseError("line " + std::to_string(line_no) +
                                 ": invalid node identifier '" + t + "'");
            }
        }
        if (tokens[0] == tokens[1]) {
            throw ParseError("line " + std::to_string(line_no) + ": self-loop on node '" +
                             tokens[0] + "'");
        }
        edges.emplace_back(tokens[0], tokens[1]);
    }
    try {
        return Dag::from_edges(edges);
    } catch (const ParseError& e) {
        throw ParseError(std::string("graph spec: ") + e.what());
    }
}

Dag load_graph(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open graph file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

namespace {

// Finds one directed cycle by walking forward from a node on a cycle.
std::string cycle_witness(const Dag& dag, const std::vector<bool>& on_cycle) {
    NodeId start = -1;
    for (std::size_t v = 0; v < dag.node_count(); ++v) {
        if (on_cycle[v]) {
            start = static_cast<NodeId>(v);
            break;
        }
    }
    std::vector<NodeId> walk{start};
    std::vector<bool> seen(dag.node_count(), false);
    seen[static_cast<std::size_t>(start)] = true;
    NodeId cur = start;
    while (true) {
        NodeId next = -1;
        for (NodeId c : dag.children(cur)) {
            if (on_cycle[static_cast<std::size_t>(c)]) {
                next = c;
                break;
            }
        }
        walk.push_back(next);
        if (seen[static_cast<std::size_t>(next)]) {
            // trim the leading tail before the repeated node
            auto first = std::find(walk.begin(), walk.end(), next);
            walk.erase(walk.begin(), first);
            break;
        }
        seen[static_cast<std::size_t>(next)] = true;
        cur = next;
    }
    std::string s;
    for (std::size_t i = 0; i < walk.size(); ++i) {
        if (i) s += "->";
        s += dag.name(walk[i]);
    }
    return s;
}

// Two-way Kahn trim (in-degree, then out-degree within the remainder);
// what survives lies on or between directed cycles, so every surviving
// node keeps at least one surviving child and the witness walk cannot
// dead-end.
std::vector<bool> cyclic_nodes(const Dag& dag) {
    std::vector<std::size_t> indeg(dag.node_count());
    for (std::size_t v = 0; v < dag.node_count(); ++v) {
        indeg[v] = dag.in_degree(static_cast<NodeId>(v));
    }
    std::vector<NodeId> queue;
    for (std::size_t v = 0; v < dag.node_count(); ++v) {
        if (indeg[v] == 0) queue.push_back(static_cast<NodeId>(v));
    }
    std::size_t removed = 0;
    while (!queue.empty()) {
        NodeId v = queue.back();
        queue.pop_back();
        ++removed;
        for (NodeId c : dag.children(v)) {
            if (--indeg[static_cast<std::size_t>(c)] == 0) queue.push_back(c);
        }
    }
    std::vector<bool> remains(dag.node_count(), false);
    if (removed == dag.node_count()) return remains;
    for (std::size_t v = 0; v < dag.node_count(); ++v) {
        remains[v] = indeg[v] > 0;
    }
    std::vector<std::size_t> live_out(dag.node_count(), 0);
    for (std::size_t v = 0; v < dag.node_count(); ++v) {
        if (!remains[v]) continue;
        for (NodeId c : dag.children(static_cast<NodeId>(v))) {
            if (remains[static_cast<std::size_t>(c)]) ++live_out[v];
        }
        if (live_out[v] == 0) queue.push_back(static_cast<NodeId>(v));
    }
    while (!queue.empty()) {
        NodeId v = queue.back();
        queue.pop_back();
        remains[static_cast<std::size_t>(v)] = false;
        for (NodeId p : dag.parents(v)) {
            if (remains[static_cast<std::size_t>(p)] && --live_out[static_cast<std::size_t>(p)] == 0) {
                queue.push_back(p);
            }
        }
    }
    return remains;
}

}  // namespace

ValidationReport validate(const Dag& dag) {
    ValidationReport report;
    if (dag.node_count() == 0) {
        report.failures.push_back("graph is empty");
        return report;
    }

    std::vector<bool> on_cycle = cyclic_nodes(dag);
    bool acyclic = std::none_of(on_cycle.begin(), on_cycle.end(), [](bool b) { return b; });
    if (!acyclic) {
        report.failures.push_back("cycle found: " + cycle_witness(dag, on_cycle));
    }

    std::vector<NodeId> sources;
    for (std::size_t v = 0; v < dag.node_count(); ++v) {
        if (dag.in_degree(static_cast<NodeId>(v)) == 0) sources.push_back(static_cast<NodeId>(v));
    }
    if (sources.size() != 1) {
        std::string names;
        for (NodeId s : sources) {
            if (!names.empty()) names += ", ";
            names += dag.name(s);
        }
        report.failures.push_back("expected exactly one in-degree-0 node, found " +
                                  std::to_string(sources.size()) +
                                  (names.empty() ? "" : " {" + names + "}"));
    }

    if (sources.size() == 1) {
        std::vector<bool> reached(dag.node_count(), false);
        std::vector<NodeId> stack{sources[0]};
        reached[static_cast<std::size_t>(sources[0])] = true;
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            for (NodeId c : dag.children(v)) {
                if (!reached[static_cast<std::size_t>(c)]) {
                    reached[static_cast<std::size_t>(c)] = true;
                    stack.push_back(c);
                }
            }
        }
        for (std::size_t v = 0; v < dag.node_count(); ++v) {
            if (!reached[v]) {
                report.failures.push_back("node " + dag.name(static_cast<NodeId>(v)) +
                                          " unreachable from source " + dag.name(sources[0]));
            }
        }
    }

    bool any_absorbing = false;
    for (std::size_t v = 0; v < dag.node_count(); ++v) {
        if (dag.out_degree(static_cast<NodeId>(v)) == 0) any_absorbing = true;
    }
    if (!any_absorbing) {
        report.failures.push_back("no absorbing node (every node has outgoing edges)");
    }

    return report;
}

NodeClassification classify_nodes(const Dag& dag) {
    NodeClassification cls;
    for (std::size_t v = 0; v < dag.node_count(); ++v) {
        NodeId id = static_cast<NodeId>(v);
        if (dag.in_degree(id) == 0) {
            cls.source = id;
        } else if (dag.out_degree(id) == 0) {
            cls.absorbing.push_back(id);
        } else {
            cls.transient.push_back(id);
        }
    }
    return cls;
}

std::vector<NodeId> topological_order(const Dag& dag) {
    std::vector<std::size_t> indeg(dag.node_count());
    for (std::size_t v = 0; v < dag.node_count(); ++v) {
        indeg[v] = dag.in_degree(static_cast<NodeId>(v));
    }
    std::vector<NodeId> order;
    order.reserve(dag.node_count());
    std::vector<bool> done(dag.node_count(), false);
    for (std::size_t step = 0; step < dag.node_count(); ++step) {
        // lowest declaration index among ready nodes
        NodeId pick = -1;
        for (std::size_t v = 0; v < dag.node_count(); ++v) {
            if (!done[v] && indeg[v] == 0) {
                pick = static_cast<NodeId>(v);
                break;
            }
        }
        if (pick < 0) throw NumericError("topological_order: graph has a cycle");
        done[static_cast<std::size_t>(pick)] = true;
        order.push_back(pick);
        for (NodeId c : dag.children(pick)) {
            --indeg[static_cast<std::size_t>(c)];
        }
    }
    return order;
}

std::vector<Path> enumerate_paths(const Dag& dag, NodeId from, NodeId to, std::size_t path_cap) {
    if (from < 0 || static_cast<std::size_t>(from) >= dag.node_count() || to < 0 ||
        static_cast<std::size_t>(to) >= dag.node_count()) {
        throw ParseError("enumerate_paths: node id out of range");
    }
    std::vector<Path> result;
    Path current{from};
    // explicit stack of child cursors; children visited in declaration order
    std::vector<std::size_t> cursor{0};
    while (!current.empty()) {
        NodeId v = current.back();
        if (v == to) {
            if (result.size() >= path_cap) {
                throw NumericError("enumerate_paths: path count exceeds cap of " +
                                   std::to_string(path_cap));
            }
            result.push_back(current);
            current.pop_back();
            cursor.pop_back();
            continue;
        }
        const auto& kids = dag.children(v);
        if (cursor.back() < kids.size()) {
            NodeId next = kids[cursor.back()++];
            current.push_back(next);
            cursor.push_back(0);
        } else {
            current.pop_back();
            cursor.pop_back();
        }
    }
    return result;
}

std::string format_path(const Dag& dag, const Path& path) {
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) s += "-";
        s += dag.name(path[i]);
    }
    return s;
}

}  // namespace dagbayes
