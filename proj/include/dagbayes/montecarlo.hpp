#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dagbayes/conjugate.hpp"
#include "dagbayes/graph.hpp"

namespace dagbayes {

struct SamplerConfig {
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    double ci_level = 0.95;
    std::size_t histogram_bins = 100;
};

// Small splitmix-style generator. Each (parent block, sample index) pair
// gets its own substream derived from (seed, block, sample), so draws do
// not depend on execution order or thread count.
class SubstreamRng {
public:
    SubstreamRng(std::uint64_t seed, std::uint64_t block, std::uint64_t sample);

    std::uint64_t next_u64();
    // uniform on the open interval (0,1)
    double next_unit();
    double next_normal();
    // Gamma(shape, 1); Marsaglia-Tsang for shape >= 1, with the
    // shape-boost transform below 1 (Perks priors put zero-count edges
    // there).
    double next_gamma(double shape);

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// M joint posterior draws of every edge probability, organized as one
// M x J block per parent, rows aligned across blocks (row m is one
// joint world). Every row of every block sums to 1.
struct SampleMatrix {
    struct Block {
        NodeId parent = -1;
        std::vector<NodeId> children;
        std::vector<double> data;  // row-major, samples x children

        double at(std::size_t m, std::size_t j) const { return data[m * children.size() + j]; }
    };

    std::size_t samples = 0;
    std::vector<Block> blocks;

    const Block* block_for(NodeId parent) const;
};

// Draws each parent's full Dirichlet row jointly (independent Gamma
// variates, normalized). Deterministic for fixed (posteriors, cfg)
// regardless of `threads`.
SampleMatrix draw_joint(const std::vector<NodePosterior>& posteriors, const SamplerConfig& cfg,
                        unsigned threads = 1);

// Per-sample edge probabilities of one joint world, aligned with
// dag.edges(). Edges whose parent has no posterior block are invalid to
// query (fit_posterior covers every parent with out-degree >= 1).
class EdgeProbIndex {
public:
    EdgeProbIndex(const Dag& dag, const SampleMatrix& matrix);

    // Fills `out` (size = dag.edge_count()) with row m's edge draws.
    void extract_row(std::size_t m, std::span<double> out) const;

private:
    const SampleMatrix* matrix_;
    std::vector<std::pair<int, int>> edge_slot_;  // (block, column) per edge
};

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    std::uint64_t count = 0;
};

struct QuerySummary {
    double mean = 0.0;
    double sd = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    double quantile_lower_p = 0.0;  // (1-ci_level)/2
    double quantile_upper_p = 0.0;
    std::vector<HistogramBin> histogram;
    std::size_t samples = 0;
};

// Mean, sample sd (denominator M-1), equal-tailed CI by linear
// interpolation between order statistics at rank q*(M-1), and an
// equal-width histogram over [min, max] (right-open, last bin closed).
QuerySummary summarize(std::span<const double> values, const SamplerConfig& cfg);

// Empirical quantile with the same interpolation rule as summarize.
double empirical_quantile(std::span<const double> sorted_values, double q);

}  // namespace dagbayes
