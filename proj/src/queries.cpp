#include "dagbayes/queries.hpp"

#include <algorithm>
#include <cmath>

#include "dagbayes/betafn.hpp"

namespace dagbayes {

Query Query::path_query(Path p) {
    Query q;
    q.kind = Kind::path;
    q.path = std::move(p);
    return q;
}

Query Query::forward(NodeId from, NodeId to) {
    Query q;
    q.kind = Kind::forward;
    q.from = from;
    q.to = to;
    return q;
}

Query Query::inverse(NodeId later, NodeId earlier) {
    Query q;
    q.kind = Kind::inverse;
    q.later = later;
    q.earlier = earlier;
    return q;
}

Query Query::absorption(NodeId from) {
    Query q;
    q.kind = Kind::absorption_profile;
    q.from = from;
    return q;
}

std::string Query::describe(const Dag& dag) const {
    switch (kind) {
        case Kind::path: {
            std::string s = "path:";
            for (std::size_t i = 0; i < path.size(); ++i) {
                if (i) s += ",";
                s += dag.name(path[i]);
            }
            return s;
        }
        case Kind::forward:
            return "forward:" + dag.name(from) + ":" + dag.name(to);
        case Kind::inverse:
            return "inverse:" + dag.name(later) + ":" + dag.name(earlier);
        case Kind::absorption_profile:
            return "absorption:" + dag.name(from);
    }
    return "?";
}

Query parse_query(std::string_view spec, const Dag& dag) {
    auto fail = [&spec](const std::string& why) -> ParseError {
        return ParseError("query '" + std::string(spec) + "': " + why);
    };
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t colon = spec.find(':', start);
        if (colon == std::string_view::npos) {
            parts.emplace_back(spec.substr(start));
            break;
        }
        parts.emplace_back(spec.substr(start, colon - start));
        start = colon + 1;
    }
    if (parts.empty()) throw fail("empty spec");
    const std::string& kind = parts[0];
    if (kind == "forward") {
        if (parts.size() != 3) throw fail("expected forward:FROM:TO");
        return Query::forward(dag.node(parts[1]), dag.node(parts[2]));
    }
    if (kind == "inverse") {
        if (parts.size() != 3) throw fail("expected inverse:LATER:EARLIER");
        return Query::inverse(dag.node(parts[1]), dag.node(parts[2]));
    }
    if (kind == "absorption") {
        if (parts.size() != 2) throw fail("expected absorption:FROM");
        return Query::absorption(dag.node(parts[1]));
    }
    if (kind == "path") {
        if (parts.size() != 2 || parts[1].empty()) throw fail("expected path:A,B,C");
        Path p;
        std::size_t pos = 0;
        const std::string& list = parts[1];
        while (true) {
            std::size_t comma = list.find(',', pos);
            std::string name =
                (comma == std::string::npos) ? list.substr(pos) : list.substr(pos, comma - pos);
            p.push_back(dag.node(name));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            if (dag.edge_index(p[i], p[i + 1]) < 0) {
                throw fail(dag.name(p[i]) + " -> " + dag.name(p[i + 1]) + " is not an edge");
            }
        }
        return Query::path_query(std::move(p));
    }
    throw fail("unknown query kind '" + kind + "'");
}

double path_probability(std::span<const double> edge_probs, const Dag& dag, const Path& path) {
    double prob = 1.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        int e = dag.edge_index(path[i], path[i + 1]);
        if (e < 0) {
            throw NumericError("path_probability: " + dag.name(path[i]) + " -> " +
                               dag.name(path[i + 1]) + " is not an edge");
        }
        prob *= edge_probs[static_cast<std::size_t>(e)];
    }
    return prob;
}

namespace {

double reach_over_order(std::span<const double> edge_probs, const Dag& dag,
                        std::span<const NodeId> topo_order, std::span<double> scratch, NodeId from,
                        NodeId to) {
    if (from == to) return 1.0;
    std::fill(scratch.begin(), scratch.end(), 0.0);
    scratch[static_cast<std::size_t>(to)] = 1.0;
    for (auto it = topo_order.rbegin(); it != topo_order.rend(); ++it) {
        NodeId v = *it;
        if (v == to) continue;
        const auto& kids = dag.children(v);
        const auto& out = dag.out_edges(v);
        double r = 0.0;
        for (std::size_t k = 0; k < kids.size(); ++k) {
            r += edge_probs[static_cast<std::size_t>(out[k])] * scratch[static_cast<std::size_t>(kids[k])];
        }
        scratch[static_cast<std::size_t>(v)] = r;
    }
    return scratch[static_cast<std::size_t>(from)];
}

}  // namespace

double forward_reach(std::span<const double> edge_probs, const Dag& dag, NodeId from, NodeId to) {
    std::vector<NodeId> order = topological_order(dag);
    std::vector<double> scratch(dag.node_count());
    return reach_over_order(edge_probs, dag, order, scratch, from, to);
}

double inverse_probability(std::span<const double> edge_probs, const Dag& dag, NodeId later,
                           NodeId earlier) {
    NodeClassification cls = classify_nodes(dag);
    const double forward_el = forward_reach(edge_probs, dag, earlier, later);
    const double visit_earlier = forward_reach(edge_probs, dag, cls.source, earlier);
    const double visit_later = forward_reach(edge_probs, dag, cls.source, later);
    if (visit_later == 0.0) {
        throw NumericError("inverse_probability: zero probability of visiting " + dag.name(later));
    }
    return forward_el * visit_earlier / visit_later;
}

std::vector<std::pair<NodeId, double>> absorption_profile(std::span<const double> edge_probs,
                                                          const Dag& dag, NodeId from) {
    std::vector<std::pair<NodeId, double>> profile;
    for (std::size_t v = 0; v < dag.node_count(); ++v) {
        NodeId id = static_cast<NodeId>(v);
        if (dag.out_degree(id) == 0) {
            profile.emplace_back(id, forward_reach(edge_probs, dag, from, id));
        }
    }
    return profile;
}

double analytic_forward_mean(const std::vector<NodePosterior>& posteriors, const Dag& dag,
                             NodeId from, NodeId to, std::size_t path_cap) {
    std::vector<double> edge_means(dag.edge_count(), 0.0);
    for (const NodePosterior& post : posteriors) {
        const double total = post.alpha_total();
        const auto& out = dag.out_edges(post.parent);
        for (std::size_t k = 0; k < post.children.size(); ++k) {
            edge_means[static_cast<std::size_t>(out[k])] = post.alpha[k] / total;
        }
    }
    double sum = 0.0;
    for (const Path& path : enumerate_paths(dag, from, to, path_cap)) {
        sum += path_probability(edge_means, dag, path);
    }
    return sum;
}

namespace {

// One reusable row buffer; evaluation walks rows in index order so
// summaries are deterministic.
template <typename Fn>
void for_each_row(const SampleMatrix& matrix, const Dag& dag, Fn&& fn) {
    EdgeProbIndex index(dag, matrix);
    std::vector<double> row(dag.edge_count());
    for (std::size_t m = 0; m < matrix.samples; ++m) {
        index.extract_row(m, row);
        fn(m, std::span<const double>(row));
    }
}

}  // namespace

std::vector<QueryResult> evaluate_query(const Query& query, const SampleMatrix& matrix,
                                        const Dag& dag, const SamplerConfig& cfg) {
    std::vector<QueryResult> results;
    switch (query.kind) {
        case Query::Kind::path: {
            std::vector<double> values(matrix.samples);
            for_each_row(matrix, dag, [&](std::size_t m, std::span<const double> row) {
                values[m] = path_probability(row, dag, query.path);
            });
            results.push_back({query.describe(dag), summarize(values, cfg)});
            break;
        }
        case Query::Kind::forward: {
            const std::vector<NodeId> order = topological_order(dag);
            std::vector<double> scratch(dag.node_count());
            std::vector<double> values(matrix.samples);
            for_each_row(matrix, dag, [&](std::size_t m, std::span<const double> row) {
                values[m] = reach_over_order(row, dag, order, scratch, query.from, query.to);
            });
            results.push_back({query.describe(dag), summarize(values, cfg)});
            break;
        }
        case Query::Kind::inverse: {
            const std::vector<NodeId> order = topological_order(dag);
            const NodeClassification cls = classify_nodes(dag);
            std::vector<double> scratch(dag.node_count());
            std::vector<double> values(matrix.samples);
            for_each_row(matrix, dag, [&](std::size_t m, std::span<const double> row) {
                const double fwd = reach_over_order(row, dag, order, scratch, query.earlier, query.later);
                const double ve = reach_over_order(row, dag, order, scratch, cls.source, query.earlier);
                const double vl = reach_over_order(row, dag, order, scratch, cls.source, query.later);
                if (vl == 0.0) {
                    throw NumericError("inverse_probability: zero probability of visiting " +
                                       dag.name(query.later));
                }
                values[m] = fwd * ve / vl;
            });
            results.push_back({query.describe(dag), summarize(values, cfg)});
            break;
        }
        case Query::Kind::absorption_profile: {
            const std::vector<NodeId> order = topological_order(dag);
            const NodeClassification cls = classify_nodes(dag);
            std::vector<double> scratch(dag.node_count());
            std::vector<std::vector<double>> values(cls.absorbing.size());
            for (auto& v : values) v.resize(matrix.samples);
            for_each_row(matrix, dag, [&](std::size_t m, std::span<const double> row) {
                for (std::size_t s = 0; s < cls.absorbing.size(); ++s) {
                    values[s][m] = reach_over_order(row, dag, order, scratch, query.from, cls.absorbing[s]);
                }
            });
            for (std::size_t s = 0; s < cls.absorbing.size(); ++s) {
                results.push_back({"absorption:" + dag.name(query.from) + ":" + dag.name(cls.absorbing[s]),
                                   summarize(values[s], cfg)});
            }
            break;
        }
    }
    return results;
}

std::vector<QueryResult> run_query(const Query& query, const std::vector<NodePosterior>& posteriors,
                                   const Dag& dag, const SamplerConfig& cfg, unsigned threads) {
    SampleMatrix matrix = draw_joint(posteriors, cfg, threads);
    return evaluate_query(query, matrix, dag, cfg);
}

}  // namespace dagbayes
