#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cclique/graph.hpp"
#include "json.hpp"

namespace cclique {

// Exit codes of the command-line tool.
enum ExitCode : int { ExitOk = 0, ExitMismatch = 1, ExitConfig = 2, ExitContract = 3 };

struct ExperimentConfig {
    std::string algo;                  // see algorithm_ids()
    std::string graph_path;            // edge-list file; empty: use the generator
    std::string family;                // generator family
    GeneratorParams params;
    std::uint64_t graph_seed = 0;
    std::vector<std::uint64_t> seeds;  // runs of randomized algorithms
    double eps = 0.1;
    std::size_t t0 = 1;
    std::string pattern = "triangle";
    bool packed = false;
    std::optional<std::size_t> s_fixed;  // tightness only
    bool outcome_only = false;           // tri-sample / distinguisher / tightness
    std::optional<std::size_t> max_rounds;
    std::string out;                     // report path; empty: stdout
};

const std::vector<std::string>& algorithm_ids();
bool is_randomized(const std::string& algo);

// Throws ParameterError on an unknown algorithm, a missing graph source,
// a missing file or an empty seed list for a randomized algorithm.
void validate(const ExperimentConfig& config);

// Config files use the long flag names as keys ("algo", "family", "n", ...).
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

// "1,2,5" or "1-300" or a mix of both.
std::vector<std::uint64_t> parse_seeds(const std::string& text);

Graph load_graph(const ExperimentConfig& config);

// Whether g contains the pattern, by census for triangles and exhaustive or
// backtracking search otherwise.
bool oracle_verdict(const Graph& g, const SubgraphPattern& pattern);

struct RunReport {
    nlohmann::json document;  // header, config, runs, aggregate, oracle
    int exit_code = ExitOk;
};

// Runs the configured algorithm once (deterministic) or once per seed. The
// header block holds the timestamp and nothing else that varies between runs.
RunReport run_experiment(const ExperimentConfig& config);

// Re-derives the oracle verdict from the echoed config and checks every run
// against it; deterministic algorithms are also re-run and compared.
RunReport verify_report(const nlohmann::json& report);

struct SweepRow {
    std::string value;
    double mean_rounds = 0;
    std::size_t max_rounds = 0;
    double success = 0;  // fraction of runs reporting found
    bool agree = true;
};

struct SweepReport {
    std::vector<nlohmann::json> reports;
    std::vector<SweepRow> rows;
    int exit_code = ExitOk;
};

// axis is one of n, t, eps, k (the arboricity-family parameter), p.
SweepReport run_sweep(const ExperimentConfig& base, const std::string& axis, const std::vector<std::string>& values);
std::string sweep_csv(const std::string& axis, const std::vector<SweepRow>& rows);

}  // namespace cclique
