#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dagbayes/report.hpp"

namespace {

using dagbayes::OutputFormat;
using dagbayes::PriorSpec;
using dagbayes::RunConfig;

PriorSpec parse_prior_flag(const std::string& spec) {
    if (spec == "perks") return PriorSpec::perks();
    if (spec.rfind("symmetric:", 0) == 0) {
        const std::string num = spec.substr(10);
        char* end = nullptr;
        double c = std::strtod(num.c_str(), &end);
        if (end != num.c_str() + num.size() || !(c > 0.0)) {
            throw dagbayes::ParseError("--prior symmetric:<c> requires c > 0, got '" + num + "'");
        }
        return PriorSpec::symmetric(c);
    }
    if (spec.rfind("custom:", 0) == 0) {
        return dagbayes::load_prior_csv(spec.substr(7));
    }
    throw dagbayes::ParseError("--prior must be perks, symmetric:<c>, or custom:<path>, got '" +
                               spec + "'");
}

void add_data_options(CLI::App* cmd, RunConfig& config, std::string& prior_spec) {
    cmd->add_option("--graph", config.graph_path, "graph spec file (edge list)")->required();
    auto* counts = cmd->add_option("--counts", "transition counts CSV (src,dst,count)");
    auto* traj = cmd->add_option("--trajectories", "trajectory log (comma-separated node paths)");
    counts->excludes(traj);
    cmd->add_option("--prior", prior_spec, "perks | symmetric:<c> | custom:<path>")
        ->default_val("perks");
    cmd->add_option("--ci", config.sampler.ci_level, "credible-interval level")->default_val(0.95);
    cmd->add_option("--out", config.out_path, "output file (default: stdout)");
    std::map<std::string, OutputFormat> formats{{"json", OutputFormat::json},
                                                {"csv", OutputFormat::csv}};
    cmd->add_option("--format", config.format, "json | csv")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
        ->default_val("json");
}

void add_sampler_options(CLI::App* cmd, RunConfig& config) {
    cmd->add_option("--samples", config.sampler.samples, "Monte-Carlo sample count")
        ->default_val(100000);
    cmd->add_option("--seed", config.sampler.seed, "RNG seed")->default_val(0);
    cmd->add_option("--bins", config.sampler.histogram_bins, "histogram bin count")
        ->default_val(100);
    cmd->add_option("--hist-dir", "write per-query histogram CSVs into this directory");
    cmd->add_option("--threads", config.threads, "sampling threads (output-invariant)")
        ->default_val(1);
}

void finish_config(CLI::App* cmd, RunConfig& config, const std::string& prior_spec) {
    if (cmd->count("--counts")) config.counts_path = cmd->get_option("--counts")->as<std::string>();
    if (cmd->count("--trajectories")) {
        config.trajectories_path = cmd->get_option("--trajectories")->as<std::string>();
    }
    if (cmd->get_option_no_throw("--hist-dir") != nullptr && cmd->count("--hist-dir")) {
        config.hist_dir = cmd->get_option("--hist-dir")->as<std::string>();
    }
    config.prior = parse_prior_flag(prior_spec);
}

int run(int argc, char** argv) {
    CLI::App app{"Bayesian transition-probability inference on absorbing DAGs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(dagbayes::kToolVersion));

    auto* validate_cmd = app.add_subcommand("validate", "check graph structure and count flow");
    std::string v_graph;
    std::optional<std::string> v_counts;
    validate_cmd->add_option("--graph", v_graph, "graph spec file")->required();
    validate_cmd->add_option("--counts", "transition counts CSV");

    RunConfig fit_config;
    std::string fit_prior;
    auto* fit_cmd = app.add_subcommand("fit", "analytic per-edge posterior summaries");
    add_data_options(fit_cmd, fit_config, fit_prior);

    RunConfig query_config;
    std::string query_prior;
    auto* query_cmd = app.add_subcommand("query", "Monte-Carlo posterior queries");
    add_data_options(query_cmd, query_config, query_prior);
    add_sampler_options(query_cmd, query_config);
    query_cmd
        ->add_option("--query", query_config.query_specs,
                     "forward:FROM:TO | inverse:LATER:EARLIER | absorption:FROM | path:A,B,C "
                     "(repeatable)")
        ->required();

    RunConfig report_config;
    std::string report_prior;
    auto* report_cmd =
        app.add_subcommand("report", "full report: fit + absorption profile + inverse queries");
    add_data_options(report_cmd, report_config, report_prior);
    add_sampler_options(report_cmd, report_config);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help/--version exit 0; real flag errors map to the parse code
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (validate_cmd->parsed()) {
        if (validate_cmd->count("--counts")) {
            v_counts = validate_cmd->get_option("--counts")->as<std::string>();
        }
        return dagbayes::cmd_validate(v_graph, v_counts, std::cout);
    }

    dagbayes::Json report;
    RunConfig* config = nullptr;
    if (fit_cmd->parsed()) {
        finish_config(fit_cmd, fit_config, fit_prior);
        config = &fit_config;
        report = dagbayes::cmd_fit(fit_config);
    } else if (query_cmd->parsed()) {
        finish_config(query_cmd, query_config, query_prior);
        config = &query_config;
        report = dagbayes::cmd_query(query_config);
    } else {
        finish_config(report_cmd, report_config, report_prior);
        config = &report_config;
        report = dagbayes::cmd_report(report_config);
    }

    if (!report.at("validation").at("valid").get<bool>()) {
        for (const auto& f : report.at("validation").at("failures")) {
            std::cerr << "validation: " << f.get<std::string>() << "\n";
        }
        return 1;
    }
    dagbayes::write_output(report, *config, std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const dagbayes::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const dagbayes::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
