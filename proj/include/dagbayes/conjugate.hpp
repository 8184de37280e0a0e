#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dagbayes/graph.hpp"

namespace dagbayes {

// Observed transition tallies, one per dag edge (declaration order),
// plus per-node outflow totals.
struct TransitionCounts {
    std::vector<std::int64_t> per_edge;  // aligned with dag.edges()

    std::int64_t edge_count(const Dag& dag, NodeId src, NodeId dst) const;
    std::int64_t node_total(const Dag& dag, NodeId parent) const;
};

TransitionCounts zero_counts(const Dag& dag);

// Counts CSV: header "src,dst,count", one row per edge; edges absent
// from the file stay zero.
TransitionCounts parse_counts_csv(std::string_view text, const Dag& dag);
TransitionCounts load_counts_csv(const std::string& path, const Dag& dag);

// Trajectory log: one comma-separated node path per line, '#' comments
// allowed. Each trajectory must start at the source, follow dag edges,
// and end in an absorbing node; violations throw ParseError with the
// line number.
TransitionCounts tally_trajectories(std::string_view text, const Dag& dag);
TransitionCounts load_trajectories(const std::string& path, const Dag& dag);

struct PriorSpec {
    enum class Kind { perks, symmetric, custom };
    Kind kind = Kind::perks;
    double symmetric_value = 1.0;                 // for Kind::symmetric
    std::map<std::pair<std::string, std::string>, double> custom;  // for Kind::custom

    static PriorSpec perks() { return {Kind::perks, 0.0, {}}; }
    static PriorSpec symmetric(double c) { return {Kind::symmetric, c, {}}; }
    static PriorSpec custom_from(std::map<std::pair<std::string, std::string>, double> m) {
        return {Kind::custom, 0.0, std::move(m)};
    }

    // Prior mass for one edge; Perks splits one unit over the parent's
    // out-degree. Throws on non-positive or missing entries.
    double alpha_for(const Dag& dag, NodeId src, NodeId dst) const;

    std::string describe() const;
};

// Custom prior CSV: header "src,dst,alpha".
PriorSpec parse_prior_csv(std::string_view text);
PriorSpec load_prior_csv(const std::string& path);

// Posterior Dirichlet block of one parent node: children in edge
// declaration order, alpha[j] = y_ij + prior alpha_ij.
struct NodePosterior {
    NodeId parent = -1;
    std::vector<NodeId> children;
    std::vector<double> alpha;

    double alpha_total() const;
};

// One block per node with out-degree >= 1, in node declaration order.
std::vector<NodePosterior> fit_posterior(const TransitionCounts& counts, const PriorSpec& prior,
                                         const Dag& dag);

struct BetaMarginal {
    double a = 0.0;
    double b = 0.0;
};

// Marginal of one child's probability: Be(alpha_j, sum(alpha) - alpha_j).
// Throws std::invalid_argument for an unknown child or when the block
// has a single child (the margin degenerates to the constant 1).
BetaMarginal beta_marginal(const NodePosterior& posterior, NodeId child);

double beta_mean(const BetaMarginal& m);
double beta_sd(const BetaMarginal& m);
// Equal-tailed quantile by root-finding on the regularized incomplete
// beta. Throws std::invalid_argument unless 0 < p < 1.
double beta_quantile(const BetaMarginal& m, double p);

// Per-node inflow/outflow bookkeeping; imbalance at a transient node is
// a warning (censoring), never an error.
struct FlowEntry {
    NodeId node = -1;
    enum class Role { source, transient, absorbing } role = Role::transient;
    std::int64_t inflow = 0;
    std::int64_t outflow = 0;
    bool balanced() const { return role != Role::transient || inflow == outflow; }
};

struct FlowReport {
    std::vector<FlowEntry> entries;  // node declaration order
    std::int64_t cohort_size = 0;    // source outflow
    bool all_balanced() const;
};

FlowReport flow_check(const TransitionCounts& counts, const Dag& dag);

}  // namespace dagbayes
