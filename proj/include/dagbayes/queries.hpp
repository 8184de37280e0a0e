#pragma once

#include <span>
#include <string>
#include <vector>

#include "dagbayes/conjugate.hpp"
#include "dagbayes/graph.hpp"
#include "dagbayes/montecarlo.hpp"

namespace dagbayes {

// A posterior functional of the edge probabilities. `forward` sums over
// every connecting path, `inverse` is the Bayes-inverted direction
// (later conditioned on earlier), `absorption_profile` is the forward
// probability into each absorbing node.
struct Query {
    enum class Kind { path, forward, inverse, absorption_profile };
    Kind kind = Kind::forward;
    Path path;            // Kind::path
    NodeId from = -1;     // forward / absorption_profile
    NodeId to = -1;       // forward
    NodeId later = -1;    // inverse
    NodeId earlier = -1;  // inverse

    static Query path_query(Path p);
    static Query forward(NodeId from, NodeId to);
    static Query inverse(NodeId later, NodeId earlier);
    static Query absorption(NodeId from);

    std::string describe(const Dag& dag) const;
};

// "forward:SRC:DST", "inverse:LATER:EARLIER", "absorption:SRC",
// "path:A,B,C". Throws ParseError for malformed specs or unknown nodes.
Query parse_query(std::string_view spec, const Dag& dag);

// Product of the sampled probabilities along the path (1 for a
// single-node path). Throws NumericError if a hop is not an edge.
double path_probability(std::span<const double> edge_probs, const Dag& dag, const Path& path);

// Probability of ever visiting `to` from `from`: dynamic program over
// reverse topological order, equal to the sum over all connecting paths
// of their edge-probability products. 0 when unreachable, 1 when
// from == to.
double forward_reach(std::span<const double> edge_probs, const Dag& dag, NodeId from, NodeId to);

// Bayes inversion on one joint draw:
//   reach(earlier -> later) * reach(source -> earlier) / reach(source -> later).
// Throws NumericError on a zero denominator (degenerate inputs only).
double inverse_probability(std::span<const double> edge_probs, const Dag& dag, NodeId later,
                           NodeId earlier);

// forward_reach(from -> s) for every absorbing s, in declaration order.
std::vector<std::pair<NodeId, double>> absorption_profile(std::span<const double> edge_probs,
                                                          const Dag& dag, NodeId from);

// Exact posterior mean of forward_reach: every path visits each parent
// block at most once, so the expectation factorizes into Beta means.
double analytic_forward_mean(const std::vector<NodePosterior>& posteriors, const Dag& dag,
                             NodeId from, NodeId to, std::size_t path_cap = kDefaultPathCap);

struct QueryResult {
    std::string label;  // query echo, e.g. "forward:A:H" or "absorption:A:H"
    QuerySummary summary;
};

// Evaluates one query on every row of `matrix`; absorption profiles
// yield one summary per absorbing node.
std::vector<QueryResult> evaluate_query(const Query& query, const SampleMatrix& matrix,
                                        const Dag& dag, const SamplerConfig& cfg);

// Draws a fresh SampleMatrix and evaluates.
std::vector<QueryResult> run_query(const Query& query, const std::vector<NodePosterior>& posteriors,
                                   const Dag& dag, const SamplerConfig& cfg, unsigned threads = 1);

}  // namespace dagbayes
