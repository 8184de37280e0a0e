#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dagbayes/conjugate.hpp"
#include "dagbayes/montecarlo.hpp"
#include "dagbayes/queries.hpp"

namespace dagbayes {

inline constexpr std::string_view kToolName = "dagbayes";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Insertion-ordered JSON so reports serialize with a stable key layout.
using Json = nlohmann::ordered_json;

enum class OutputFormat { json, csv };

struct RunConfig {
    std::string graph_path;
    std::optional<std::string> counts_path;
    std::optional<std::string> trajectories_path;  // mutually exclusive with counts_path
    PriorSpec prior = PriorSpec::perks();
    SamplerConfig sampler;
    std::vector<std::string> query_specs;
    std::string out_path;  // empty: stdout
    OutputFormat format = OutputFormat::json;
    std::optional<std::string> hist_dir;  // write per-query histogram CSVs here
    unsigned threads = 1;                 // never affects output bytes
};

// FNV-1a over the raw bytes; recorded in report metadata so a report
// pins down its inputs.
std::string fnv1a64_hex(std::string_view bytes);
std::string file_digest(const std::string& path);

// Report sections ("meta", "validation", "flow", "edges", "queries").
Json build_meta(const RunConfig& config);
Json build_validation(const ValidationReport& report);
Json build_flow(const FlowReport& flow, const Dag& dag);
Json build_edges(const std::vector<NodePosterior>& posteriors, const TransitionCounts& counts,
                 const PriorSpec& prior, const Dag& dag, double ci_level);

std::string edges_csv(const Json& report);
std::string queries_csv(const Json& report);
std::string histogram_csv(const QuerySummary& summary);

// Subcommand drivers. All printing goes through `out`/`err`; exit codes:
// 0 success, 1 validation failure, 2 I/O or parse error, 3 numeric
// failure (exceptions mapped by the CLI wrapper).
int cmd_validate(const std::string& graph_path, const std::optional<std::string>& counts_path,
                 std::ostream& out);
Json cmd_fit(const RunConfig& config);
Json cmd_query(const RunConfig& config);
// Canned set: fit + absorption profile from the source + every
// inverse(absorbing, transient) pair.
Json cmd_report(const RunConfig& config);

// Serializes and writes per config.format / config.out_path.
void write_output(const Json& report, const RunConfig& config, std::ostream& fallback_out);

}  // namespace dagbayes
