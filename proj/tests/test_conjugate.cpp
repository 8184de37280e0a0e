#include <doctest.h>

#include <cmath>

#include "dagbayes/betafn.hpp"
#include "dagbayes/conjugate.hpp"
#include "test_support.hpp"

using namespace dagbayes;

namespace {

const NodePosterior& block_for(const std::vector<NodePosterior>& posteriors, const Dag& dag,
                               const std::string& parent) {
    for (const NodePosterior& p : posteriors) {
        if (dag.name(p.parent) == parent) return p;
    }
    REQUIRE(false);
    return posteriors.front();
}

}  // namespace

TEST_CASE("tally_trajectories counts consecutive hops") {
    Dag dag = testsupport::influenza_dag();
    TransitionCounts counts = tally_trajectories("A,W1,H\nA,I,D\n", dag);
    CHECK(counts.edge_count(dag, dag.node("A"), dag.node("W1")) == 1);
    CHECK(counts.edge_count(dag, dag.node("W1"), dag.node("H")) == 1);
    CHECK(counts.edge_count(dag, dag.node("A"), dag.node("I")) == 1);
    CHECK(counts.edge_count(dag, dag.node("I"), dag.node("D")) == 1);
    CHECK(counts.edge_count(dag, dag.node("W1"), dag.node("D")) == 0);
    CHECK(counts.node_total(dag, dag.node("A")) == 2);

    TransitionCounts empty = tally_trajectories("", dag);
    for (auto c : empty.per_edge) CHECK(c == 0);

    // A -> W2 is not an arc
    CHECK_THROWS_WITH_AS(tally_trajectories("A,W2,H\n", dag), doctest::Contains("line 1"),
                         ParseError);
    // W1 is not absorbing
    CHECK_THROWS_AS(tally_trajectories("A,W1\n", dag), ParseError);
    // must start at the source
    CHECK_THROWS_AS(tally_trajectories("W1,H\n", dag), ParseError);
    CHECK_THROWS_AS(tally_trajectories("A,Q\n", dag), ParseError);
}

TEST_CASE("counts CSV round trip and errors") {
    Dag dag = testsupport::influenza_dag();
    TransitionCounts counts = testsupport::influenza_counts(dag);
    CHECK(counts.edge_count(dag, dag.node("A"), dag.node("W1")) == 1208);
    CHECK(counts.edge_count(dag, dag.node("W2"), dag.node("L")) == 12);
    CHECK(counts.node_total(dag, dag.node("A")) == 1306);
    CHECK(counts.node_total(dag, dag.node("W1")) == 1208);

    // missing edges default to zero
    TransitionCounts partial = parse_counts_csv("src,dst,count\nA,I,7\n", dag);
    CHECK(partial.edge_count(dag, dag.node("A"), dag.node("I")) == 7);
    CHECK(partial.edge_count(dag, dag.node("A"), dag.node("W1")) == 0);

    CHECK_THROWS_AS(parse_counts_csv("src,dst,n\nA,I,7\n", dag), ParseError);
    CHECK_THROWS_AS(parse_counts_csv("src,dst,count\nA,W2,7\n", dag), ParseError);
    CHECK_THROWS_AS(parse_counts_csv("src,dst,count\nA,I,-1\n", dag), ParseError);
    CHECK_THROWS_AS(parse_counts_csv("src,dst,count\nA,I,seven\n", dag), ParseError);
}

TEST_CASE("flow_check certifies the bundled cohort") {
    Dag dag = testsupport::influenza_dag();
    FlowReport flow = flow_check(testsupport::influenza_counts(dag), dag);
    CHECK(flow.cohort_size == 1306);
    CHECK(flow.all_balanced());
    for (const FlowEntry& e : flow.entries) {
        if (dag.name(e.node) == "I") {
            CHECK(e.inflow == 180);
            CHECK(e.outflow == 180);
        }
        if (dag.name(e.node) == "W2") {
            CHECK(e.inflow == 145);
            CHECK(e.outflow == 145);
        }
    }
}

TEST_CASE("flow_check flags imbalance as a warning entry") {
    Dag chain = Dag::from_edges({{"A", "B"}, {"B", "C"}});
    TransitionCounts counts = zero_counts(chain);
    counts.per_edge[0] = 5;
    counts.per_edge[1] = 3;
    FlowReport flow = flow_check(counts, chain);
    CHECK_FALSE(flow.all_balanced());
    for (const FlowEntry& e : flow.entries) {
        if (chain.name(e.node) == "B") {
            CHECK(e.inflow == 5);
            CHECK(e.outflow == 3);
            CHECK_FALSE(e.balanced());
        }
    }
}

TEST_CASE("fit_posterior adds Perks mass to the observed counts") {
    Dag dag = testsupport::influenza_dag();
    auto posteriors = fit_posterior(testsupport::influenza_counts(dag), PriorSpec::perks(), dag);
    REQUIRE(posteriors.size() == 4);

    const NodePosterior& a = block_for(posteriors, dag, "A");
    REQUIRE(a.alpha.size() == 2);
    CHECK(a.alpha[0] == 1208.5);
    CHECK(a.alpha[1] == 98.5);

    const NodePosterior& w1 = block_for(posteriors, dag, "W1");
    CHECK(w1.alpha == std::vector<double>{82.25, 125.25, 946.25, 55.25});

    const NodePosterior& i = block_for(posteriors, dag, "I");
    CHECK(i.alpha == std::vector<double>{145.5, 35.5});

    const NodePosterior& w2 = block_for(posteriors, dag, "W2");
    CHECK(w2.alpha == std::vector<double>{15 + 1.0 / 3, 118 + 1.0 / 3, 12 + 1.0 / 3});

    // no data: posterior equals the prior
    auto prior_only = fit_posterior(zero_counts(dag), PriorSpec::perks(), dag);
    CHECK(block_for(prior_only, dag, "A").alpha == std::vector<double>{0.5, 0.5});
    // Perks mass sums to one unit per node
    for (const NodePosterior& p : prior_only) {
        CHECK(p.alpha_total() == doctest::Approx(1.0).epsilon(1e-12));
    }
    // posterior minus prior recovers the counts exactly
    TransitionCounts counts = testsupport::influenza_counts(dag);
    for (const NodePosterior& p : posteriors) {
        const auto& prior_block = block_for(prior_only, dag, dag.name(p.parent));
        for (std::size_t j = 0; j < p.alpha.size(); ++j) {
            const double y = p.alpha[j] - prior_block.alpha[j];
            CHECK(y == static_cast<double>(counts.edge_count(dag, p.parent, p.children[j])));
        }
    }
}

TEST_CASE("prior specs: symmetric and custom") {
    Dag dag = Dag::from_edges({{"A", "B"}, {"A", "C"}});
    TransitionCounts counts = zero_counts(dag);
    counts.per_edge[0] = 3;

    auto sym = fit_posterior(counts, PriorSpec::symmetric(2.0), dag);
    CHECK(sym[0].alpha == std::vector<double>{5.0, 2.0});
    CHECK_THROWS_AS(fit_posterior(counts, PriorSpec::symmetric(0.0), dag), std::invalid_argument);

    PriorSpec custom = parse_prior_csv("src,dst,alpha\nA,B,0.7\nA,C,1.3\n");
    auto fitted = fit_posterior(counts, custom, dag);
    CHECK(fitted[0].alpha == std::vector<double>{3.7, 1.3});

    PriorSpec incomplete = parse_prior_csv("src,dst,alpha\nA,B,0.7\n");
    CHECK_THROWS_AS(fit_posterior(counts, incomplete, dag), ParseError);
    CHECK_THROWS_AS(parse_prior_csv("src,dst,alpha\nA,B,0\n"), ParseError);
}

TEST_CASE("beta_marginal and its analytics") {
    Dag dag = testsupport::influenza_dag();
    auto posteriors = fit_posterior(testsupport::influenza_counts(dag), PriorSpec::perks(), dag);

    const NodePosterior& a = block_for(posteriors, dag, "A");
    BetaMarginal ai = beta_marginal(a, dag.node("I"));
    CHECK(ai.a == 98.5);
    CHECK(ai.b == 1208.5);
    CHECK(beta_mean(ai) == doctest::Approx(0.075).epsilon(5e-3));

    const NodePosterior& w1 = block_for(posteriors, dag, "W1");
    BetaMarginal w1d = beta_marginal(w1, dag.node("D"));
    CHECK(w1d.a == 125.25);
    CHECK(w1d.b == doctest::Approx(1083.75).epsilon(1e-15));
    CHECK(std::fabs(beta_mean(w1d) - 0.103598014888) < 1e-9);
    CHECK(std::fabs(beta_quantile(w1d, 0.025) - 0.087) < 1e-3);
    CHECK(std::fabs(beta_quantile(w1d, 0.975) - 0.121) < 1e-3);

    BetaMarginal uniform{1.0, 1.0};
    CHECK(beta_mean(uniform) == 0.5);
    CHECK(std::fabs(beta_quantile(uniform, 0.3) - 0.3) < 1e-10);
    CHECK(std::fabs(beta_quantile(BetaMarginal{2.0, 1.0}, 0.5) - 0.70711) < 1e-5);

    CHECK_THROWS_AS(beta_marginal(a, dag.node("D")), std::invalid_argument);
    CHECK_THROWS_AS(beta_quantile(uniform, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(beta_quantile(uniform, 1.5), std::invalid_argument);

    Dag chain = Dag::from_edges({{"A", "B"}, {"B", "C"}});
    auto chain_post = fit_posterior(zero_counts(chain), PriorSpec::perks(), chain);
    CHECK_THROWS_AS(beta_marginal(chain_post[0], chain.node("B")), std::invalid_argument);
}

TEST_CASE("Dirichlet means sum to one and quantiles round-trip") {
    Dag dag = testsupport::influenza_dag();
    auto posteriors = fit_posterior(testsupport::influenza_counts(dag), PriorSpec::perks(), dag);
    for (const NodePosterior& p : posteriors) {
        if (p.children.size() < 2) continue;
        double total = 0.0;
        for (NodeId child : p.children) total += beta_mean(beta_marginal(p, child));
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        BetaMarginal m = beta_marginal(p, p.children[0]);
        for (double q : {0.025, 0.21, 0.5, 0.8, 0.975}) {
            const double x = beta_quantile(m, q);
            CHECK(beta_reg(m.a, m.b, x) == doctest::Approx(q).epsilon(1e-9));
        }
    }
}
