#include "dagbayes/conjugate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dagbayes/betafn.hpp"

namespace dagbayes {

namespace {

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(std::string("cannot open ") + what + " file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_row(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

// Calls fn(line_no, line) for each non-blank, non-comment line.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view raw = (eol == std::string_view::npos) ? text.substr(pos)
                                                               : text.substr(pos, eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        fn(line_no, line);
    }
}

}  // namespace

std::int64_t TransitionCounts::edge_count(const Dag& dag, NodeId src, NodeId dst) const {
    int e = dag.edge_index(src, dst);
    return e < 0 ? 0 : per_edge[static_cast<std::size_t>(e)];
}

std::int64_t TransitionCounts::node_total(const Dag& dag, NodeId parent) const {
    std::int64_t total = 0;
    for (int e : dag.out_edges(parent)) total += per_edge[static_cast<std::size_t>(e)];
    return total;
}

TransitionCounts zero_counts(const Dag& dag) {
    return TransitionCounts{std::vector<std::int64_t>(dag.edge_count(), 0)};
}

TransitionCounts parse_counts_csv(std::string_view text, const Dag& dag) {
    TransitionCounts counts = zero_counts(dag);
    bool header_seen = false;
    for_each_line(text, [&](std::size_t line_no, const std::string& line) {
        auto fields = split_csv_row(line);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() == 3 && fields[0] == "src" && fields[1] == "dst" &&
                fields[2] == "count") {
                return;
            }
            throw ParseError("counts CSV line " + std::to_string(line_no) +
                             ": expected header 'src,dst,count'");
        }
        if (fields.size() != 3) {
            throw ParseError("counts CSV line " + std::to_string(line_no) +
                             ": expected 3 fields, got " + std::to_string(fields.size()));
        }
        if (!dag.has_node(fields[0]) || !dag.has_node(fields[1])) {
            throw ParseError("counts CSV line " + std::to_string(line_no) + ": unknown node in '" +
                             fields[0] + "," + fields[1] + "'");
        }
        int e = dag.edge_index(dag.node(fields[0]), dag.node(fields[1]));
        if (e < 0) {
            throw ParseError("counts CSV line " + std::to_string(line_no) + ": " + fields[0] +
                             " -> " + fields[1] + " is not an edge of the graph");
        }
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), value);
        if (ec != std::errc{} || ptr != fields[2].data() + fields[2].size() || value < 0) {
            throw ParseError("counts CSV line " + std::to_string(line_no) +
                             ": count must be a non-negative integer, got '" + fields[2] + "'");
        }
        counts.per_edge[static_cast<std::size_t>(e)] = value;
    });
    return counts;
}

TransitionCounts load_counts_csv(const std::string& path, const Dag& dag) {
    return parse_counts_csv(read_file(path, "counts"), dag);
}

TransitionCounts tally_trajectories(std::string_view text, const Dag& dag) {
    TransitionCounts counts = zero_counts(dag);
    NodeClassification cls = classify_nodes(dag);
    for_each_line(text, [&](std::size_t line_no, const std::string& line) {
        auto fields = split_csv_row(line);
        std::vector<NodeId> nodes;
        for (const std::string& f : fields) {
            if (!dag.has_node(f)) {
                throw ParseError("trajectory line " + std::to_string(line_no) +
                                 ": unknown node '" + f + "'");
            }
            nodes.push_back(dag.node(f));
        }
        if (nodes.empty()) return;
        if (nodes.front() != cls.source) {
            throw ParseError("trajectory line " + std::to_string(line_no) +
                             ": must start at source " + dag.name(cls.source));
        }
        if (dag.out_degree(nodes.back()) != 0) {
            throw ParseError("trajectory line " + std::to_string(line_no) +
                             ": does not end at an absorbing node (" + dag.name(nodes.back()) +
                             " has outgoing edges)");
        }
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            int e = dag.edge_index(nodes[i], nodes[i + 1]);
            if (e < 0) {
                throw ParseError("trajectory line " + std::to_string(line_no) + ": " +
                                 dag.name(nodes[i]) + " -> " + dag.name(nodes[i + 1]) +
                                 " is not an edge of the graph");
            }
            ++counts.per_edge[static_cast<std::size_t>(e)];
        }
    });
    return counts;
}

TransitionCounts load_trajectories(const std::string& path, const Dag& dag) {
    return tally_trajectories(read_file(path, "trajectory"), dag);
}

double PriorSpec::alpha_for(const Dag& dag, NodeId src, NodeId dst) const {
    switch (kind) {
        case Kind::perks:
            return 1.0 / static_cast<double>(dag.out_degree(src));
        case Kind::symmetric:
            if (!(symmetric_value > 0.0)) {
                throw std::invalid_argument("symmetric prior requires c > 0");
            }
            return symmetric_value;
        case Kind::custom: {
            auto it = custom.find({dag.name(src), dag.name(dst)});
            if (it == custom.end()) {
                throw ParseError("custom prior missing entry for edge " + dag.name(src) + " -> " +
                                 dag.name(dst));
            }
            if (!(it->second > 0.0)) {
                throw std::invalid_argument("custom prior alpha must be positive for edge " +
                                            dag.name(src) + " -> " + dag.name(dst));
            }
            return it->second;
        }
    }
    throw std::logic_error("unreachable");
}

std::string PriorSpec::describe() const {
    switch (kind) {
        case Kind::perks:
            return "perks";
        case Kind::symmetric: {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "symmetric:%.17g", symmetric_value);
            return buf;
        }
        case Kind::custom:
            return "custom";
    }
    return "?";
}

PriorSpec parse_prior_csv(std::string_view text) {
    std::map<std::pair<std::string, std::string>, double> entries;
    bool header_seen = false;
    for_each_line(text, [&](std::size_t line_no, const std::string& line) {
        auto fields = split_csv_row(line);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() == 3 && fields[0] == "src" && fields[1] == "dst" &&
                fields[2] == "alpha") {
                return;
            }
            throw ParseError("prior CSV line " + std::to_string(line_no) +
                             ": expected header 'src,dst,alpha'");
        }
        if (fields.size() != 3) {
            throw ParseError("prior CSV line " + std::to_string(line_no) +
                             ": expected 3 fields, got " + std::to_string(fields.size()));
        }
        char* end = nullptr;
        double alpha = std::strtod(fields[2].c_str(), &end);
        if (end != fields[2].c_str() + fields[2].size() || !(alpha > 0.0)) {
            throw ParseError("prior CSV line " + std::to_string(line_no) +
                             ": alpha must be a positive number, got '" + fields[2] + "'");
        }
        entries[{fields[0], fields[1]}] = alpha;
    });
    return PriorSpec::custom_from(std::move(entries));
}

PriorSpec load_prior_csv(const std::string& path) {
    return parse_prior_csv(read_file(path, "prior"));
}

double NodePosterior::alpha_total() const {
    return std::accumulate(alpha.begin(), alpha.end(), 0.0);
}

std::vector<NodePosterior> fit_posterior(const TransitionCounts& counts, const PriorSpec& prior,
                                         const Dag& dag) {
    std::vector<NodePosterior> result;
    for (std::size_t v = 0; v < dag.node_count(); ++v) {
        NodeId parent = static_cast<NodeId>(v);
        if (dag.out_degree(parent) == 0) continue;
        NodePosterior block;
        block.parent = parent;
        block.children = dag.children(parent);
        block.alpha.reserve(block.children.size());
        const auto& out = dag.out_edges(parent);
        for (std::size_t k = 0; k < block.children.size(); ++k) {
            double a = prior.alpha_for(dag, parent, block.children[k]);
            block.alpha.push_back(static_cast<double>(counts.per_edge[static_cast<std::size_t>(out[k])]) + a);
        }
        result.push_back(std::move(block));
    }
    return result;
}

BetaMarginal beta_marginal(const NodePosterior& posterior, NodeId child) {
    auto it = std::find(posterior.children.begin(), posterior.children.end(), child);
    if (it == posterior.children.end()) {
        throw std::invalid_argument("beta_marginal: node is not a child of this block");
    }
    if (posterior.children.size() < 2) {
        throw std::invalid_argument(
            "beta_marginal: single-child block is deterministic (no Beta margin)");
    }
    std::size_t j = static_cast<std::size_t>(it - posterior.children.begin());
    double a = posterior.alpha[j];
    double b = posterior.alpha_total() - a;
    return {a, b};
}

double beta_mean(const BetaMarginal& m) {
    return m.a / (m.a + m.b);
}

double beta_sd(const BetaMarginal& m) {
    double s = m.a + m.b;
    return std::sqrt(m.a * m.b / (s * s * (s + 1.0)));
}

double beta_quantile(const BetaMarginal& m, double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("beta_quantile: p must lie in (0,1)");
    }
    return beta_reg_inv(m.a, m.b, p);
}

bool FlowReport::all_balanced() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const FlowEntry& e) { return e.balanced(); });
}

FlowReport flow_check(const TransitionCounts& counts, const Dag& dag) {
    FlowReport report;
    NodeClassification cls = classify_nodes(dag);
    for (std::size_t v = 0; v < dag.node_count(); ++v) {
        NodeId id = static_cast<NodeId>(v);
        FlowEntry entry;
        entry.node = id;
        if (id == cls.source) {
            entry.role = FlowEntry::Role::source;
        } else if (dag.out_degree(id) == 0) {
            entry.role = FlowEntry::Role::absorbing;
        } else {
            entry.role = FlowEntry::Role::transient;
        }
        for (NodeId p : dag.parents(id)) {
            entry.inflow += counts.edge_count(dag, p, id);
        }
        entry.outflow = counts.node_total(dag, id);
        report.entries.push_back(entry);
        if (entry.role == FlowEntry::Role::source) report.cohort_size = entry.outflow;
    }
    return report;
}

}  // namespace dagbayes
