#include "dagbayes/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace dagbayes {

namespace {

std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

struct LoadedInputs {
    Dag dag;
    TransitionCounts counts;
    std::vector<NodePosterior> posteriors;
    ValidationReport validation;
    FlowReport flow;
};

LoadedInputs load_inputs(const RunConfig& config) {
    if (config.counts_path.has_value() == config.trajectories_path.has_value()) {
        throw ParseError("exactly one of --counts and --trajectories is required");
    }
    LoadedInputs in{load_graph(config.graph_path), {}, {}, {}, {}};
    in.validation = validate(in.dag);
    if (!in.validation.valid()) return in;
    in.counts = config.counts_path ? load_counts_csv(*config.counts_path, in.dag)
                                   : load_trajectories(*config.trajectories_path, in.dag);
    in.posteriors = fit_posterior(in.counts, config.prior, in.dag);
    in.flow = flow_check(in.counts, in.dag);
    return in;
}

std::string sanitize_label(std::string label) {
    for (char& c : label) {
        if (c == ':' || c == ',' || c == '/' || c == '\\') c = '_';
    }
    return label;
}

void append_query_entries(Json& report, const std::vector<QueryResult>& results,
                          const RunConfig& config) {
    for (const QueryResult& r : results) {
        Json entry;
        entry["query"] = r.label;
        entry["mean"] = r.summary.mean;
        entry["sd"] = r.summary.sd;
        entry["ci"] = Json::array({r.summary.ci_lower, r.summary.ci_upper});
        entry["M"] = r.summary.samples;
        if (config.hist_dir) {
            std::filesystem::create_directories(*config.hist_dir);
            std::string filename = sanitize_label(r.label) + ".csv";
            std::string full = (std::filesystem::path(*config.hist_dir) / filename).string();
            std::ofstream out(full, std::ios::binary);
            if (!out) throw ParseError("cannot write histogram file '" + full + "'");
            out << histogram_csv(r.summary);
            entry["histogram_file"] = filename;
        }
        report["queries"].push_back(std::move(entry));
    }
}

}  // namespace

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x00000100000001B3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_digest(const std::string& path) {
    return fnv1a64_hex(read_file_bytes(path));
}

Json build_meta(const RunConfig& config) {
    Json meta;
    meta["tool"] = std::string(kToolName);
    meta["version"] = std::string(kToolVersion);
    meta["seed"] = config.sampler.seed;
    meta["samples"] = config.sampler.samples;
    meta["ci_level"] = config.sampler.ci_level;
    meta["histogram_bins"] = config.sampler.histogram_bins;
    meta["prior"] = config.prior.describe();
    Json inputs;
    inputs["graph"] = Json{{"path", config.graph_path}, {"fnv1a64", file_digest(config.graph_path)}};
    if (config.counts_path) {
        inputs["counts"] =
            Json{{"path", *config.counts_path}, {"fnv1a64", file_digest(*config.counts_path)}};
    }
    if (config.trajectories_path) {
        inputs["trajectories"] = Json{{"path", *config.trajectories_path},
                                      {"fnv1a64", file_digest(*config.trajectories_path)}};
    }
    meta["inputs"] = std::move(inputs);
    return meta;
}

Json build_validation(const ValidationReport& report) {
    Json v;
    v["valid"] = report.valid();
    v["failures"] = report.failures;
    return v;
}

Json build_flow(const FlowReport& flow, const Dag& dag) {
    Json f;
    f["cohort_size"] = flow.cohort_size;
    f["balanced"] = flow.all_balanced();
    f["nodes"] = Json::array();
    for (const FlowEntry& e : flow.entries) {
        Json node;
        node["node"] = dag.name(e.node);
        switch (e.role) {
            case FlowEntry::Role::source: node["role"] = "source"; break;
            case FlowEntry::Role::transient: node["role"] = "transient"; break;
            case FlowEntry::Role::absorbing: node["role"] = "absorbing"; break;
        }
        node["inflow"] = e.inflow;
        node["outflow"] = e.outflow;
        node["balanced"] = e.balanced();
        f["nodes"].push_back(std::move(node));
    }
    return f;
}

Json build_edges(const std::vector<NodePosterior>& posteriors, const TransitionCounts& counts,
                 const PriorSpec& prior, const Dag& dag, double ci_level) {
    Json edges = Json::array();
    const double q_lo = (1.0 - ci_level) / 2.0;
    const double q_hi = 1.0 - q_lo;
    for (const NodePosterior& post : posteriors) {
        const bool deterministic = post.children.size() == 1;
        for (std::size_t j = 0; j < post.children.size(); ++j) {
            Json e;
            e["src"] = dag.name(post.parent);
            e["dst"] = dag.name(post.children[j]);
            e["count"] = counts.edge_count(dag, post.parent, post.children[j]);
            e["prior_alpha"] = prior.alpha_for(dag, post.parent, post.children[j]);
            e["alpha"] = post.alpha[j];
            if (deterministic) {
                // single-child parent: transition is certain, no Beta margin
                e["deterministic"] = true;
                e["beta"] = nullptr;
                e["mean"] = 1.0;
                e["sd"] = 0.0;
                e["ci"] = Json::array({1.0, 1.0});
            } else {
                BetaMarginal m = beta_marginal(post, post.children[j]);
                e["deterministic"] = false;
                e["beta"] = Json{{"a", m.a}, {"b", m.b}};
                e["mean"] = beta_mean(m);
                e["sd"] = beta_sd(m);
                e["ci"] = Json::array({beta_quantile(m, q_lo), beta_quantile(m, q_hi)});
            }
            edges.push_back(std::move(e));
        }
    }
    return edges;
}

std::string edges_csv(const Json& report) {
    std::string csv = "src,dst,count,prior_alpha,alpha,beta_a,beta_b,mean,sd,ci_low,ci_high\n";
    for (const Json& e : report.at("edges")) {
        csv += e.at("src").get<std::string>() + "," + e.at("dst").get<std::string>() + ",";
        csv += std::to_string(e.at("count").get<std::int64_t>()) + ",";
        csv += fmt_g(e.at("prior_alpha").get<double>()) + ",";
        csv += fmt_g(e.at("alpha").get<double>()) + ",";
        if (e.at("beta").is_null()) {
            csv += ",,";
        } else {
            csv += fmt_g(e.at("beta").at("a").get<double>()) + ",";
            csv += fmt_g(e.at("beta").at("b").get<double>()) + ",";
        }
        csv += fmt_g(e.at("mean").get<double>()) + ",";
        csv += fmt_g(e.at("sd").get<double>()) + ",";
        csv += fmt_g(e.at("ci").at(0).get<double>()) + ",";
        csv += fmt_g(e.at("ci").at(1).get<double>()) + "\n";
    }
    return csv;
}

std::string queries_csv(const Json& report) {
    std::string csv = "query,mean,sd,ci_low,ci_high,M\n";
    for (const Json& q : report.at("queries")) {
        csv += q.at("query").get<std::string>() + ",";
        csv += fmt_g(q.at("mean").get<double>()) + ",";
        csv += fmt_g(q.at("sd").get<double>()) + ",";
        csv += fmt_g(q.at("ci").at(0).get<double>()) + ",";
        csv += fmt_g(q.at("ci").at(1).get<double>()) + ",";
        csv += std::to_string(q.at("M").get<std::uint64_t>()) + "\n";
    }
    return csv;
}

std::string histogram_csv(const QuerySummary& summary) {
    std::string csv = "bin_left,bin_right,count\n";
    for (const HistogramBin& b : summary.histogram) {
        csv += fmt_g(b.left);
        csv += ",";
        csv += fmt_g(b.right);
        csv += ",";
        csv += std::to_string(b.count);
        csv += "\n";
    }
    return csv;
}

int cmd_validate(const std::string& graph_path, const std::optional<std::string>& counts_path,
                 std::ostream& out) {
    Dag dag = load_graph(graph_path);
    ValidationReport report = validate(dag);
    if (!report.valid()) {
        for (const std::string& f : report.failures) out << "FAIL " << f << "\n";
        return 1;
    }
    NodeClassification cls = classify_nodes(dag);
    out << "graph OK: " << dag.node_count() << " nodes, " << dag.edge_count() << " edges\n";
    out << "source: " << dag.name(cls.source) << "\n";
    out << "transient:";
    for (NodeId v : cls.transient) out << " " << dag.name(v);
    out << "\nabsorbing:";
    for (NodeId v : cls.absorbing) out << " " << dag.name(v);
    out << "\n";
    if (counts_path) {
        TransitionCounts counts = load_counts_csv(*counts_path, dag);
        FlowReport flow = flow_check(counts, dag);
        out << "cohort size: " << flow.cohort_size << "\n";
        for (const FlowEntry& e : flow.entries) {
            if (e.role != FlowEntry::Role::transient) continue;
            out << "flow " << dag.name(e.node) << ": inflow " << e.inflow << ", outflow "
                << e.outflow << (e.balanced() ? ", balanced" : ", IMBALANCED (censoring?)") << "\n";
        }
    }
    return 0;
}

namespace {

Json report_skeleton(const RunConfig& config, const LoadedInputs& in) {
    Json report;
    report["meta"] = build_meta(config);
    report["validation"] = build_validation(in.validation);
    if (!in.validation.valid()) return report;
    report["flow"] = build_flow(in.flow, in.dag);
    report["edges"] =
        build_edges(in.posteriors, in.counts, config.prior, in.dag, config.sampler.ci_level);
    report["queries"] = Json::array();
    return report;
}

}  // namespace

Json cmd_fit(const RunConfig& config) {
    LoadedInputs in = load_inputs(config);
    return report_skeleton(config, in);
}

Json cmd_query(const RunConfig& config) {
    LoadedInputs in = load_inputs(config);
    Json report = report_skeleton(config, in);
    if (!in.validation.valid()) return report;
    if (config.query_specs.empty()) throw ParseError("query command requires at least one --query");

    std::vector<Query> queries;
    queries.reserve(config.query_specs.size());
    for (const std::string& spec : config.query_specs) {
        queries.push_back(parse_query(spec, in.dag));
    }
    SampleMatrix matrix = draw_joint(in.posteriors, config.sampler, config.threads);
    for (const Query& q : queries) {
        append_query_entries(report, evaluate_query(q, matrix, in.dag, config.sampler), config);
    }
    return report;
}

Json cmd_report(const RunConfig& config) {
    LoadedInputs in = load_inputs(config);
    Json report = report_skeleton(config, in);
    if (!in.validation.valid()) return report;

    NodeClassification cls = classify_nodes(in.dag);
    std::vector<Query> queries;
    queries.push_back(Query::absorption(cls.source));
    for (NodeId s : cls.absorbing) {
        for (NodeId t : cls.transient) {
            queries.push_back(Query::inverse(s, t));
        }
    }
    SampleMatrix matrix = draw_joint(in.posteriors, config.sampler, config.threads);
    for (const Query& q : queries) {
        append_query_entries(report, evaluate_query(q, matrix, in.dag, config.sampler), config);
    }
    return report;
}

void write_output(const Json& report, const RunConfig& config, std::ostream& fallback_out) {
    std::string payload;
    if (config.format == OutputFormat::json) {
        payload = report.dump(2);
        payload += "\n";
    } else if (report.contains("queries") && !report.at("queries").empty()) {
        payload = queries_csv(report);
    } else {
        payload = edges_csv(report);
    }
    if (config.out_path.empty()) {
        fallback_out << payload;
        return;
    }
    std::ofstream out(config.out_path, std::ios::binary);
    if (!out) throw ParseError("cannot write output file '" + config.out_path + "'");
    out << payload;
}

}  // namespace dagbayes
