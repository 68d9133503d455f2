#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cclique/errors.hpp"
#include "cclique/harness.hpp"

using namespace cclique;
using nlohmann::json;

namespace {

struct Flags {
    ExperimentConfig config;
    std::string config_file;
    std::string seeds;
    std::string csv;
    std::size_t s_fixed = 0;
    std::size_t max_rounds = 0;
};

void add_experiment_flags(CLI::App* cmd, Flags& f) {
    auto& c = f.config;
    cmd->add_option("--config", f.config_file, "JSON config; keys mirror the long flags");
    cmd->add_option("--algo", c.algo, "algorithm id");
    cmd->add_option("--graph", c.graph_path, "edge-list file");
    cmd->add_option("--family", c.family, "generator family");
    cmd->add_option("--n", c.params.n, "vertex count");
    cmd->add_option("--t", c.params.t, "triangle count for shared-edge / disjoint");
    cmd->add_option("--p", c.params.p, "edge probability for gnp");
    cmd->add_option("--k", c.params.k, "forest or hub count");
    cmd->add_option("--seed", c.graph_seed, "generator seed");
    cmd->add_option("--seeds", f.seeds, "run seeds, e.g. 1-300 or 1,4,9");
    cmd->add_option("--eps", c.eps, "failure budget");
    cmd->add_option("--t0", c.t0, "distinguisher triangle count");
    cmd->add_option("--pattern", c.pattern, "triangle, clique:4, cycle:5, path:4");
    cmd->add_flag("--packed", c.packed, "pack sublists into full words");
    cmd->add_option("--s", f.s_fixed, "fixed sample size for tightness");
    cmd->add_flag("--outcome-only", c.outcome_only, "skip the message exchange of sampling runs");
    cmd->add_option("--max-rounds", f.max_rounds, "round budget per run");
    cmd->add_option("--out", c.out, "report path (default stdout)");
    cmd->add_option("--csv", f.csv, "CSV projection path");
}

ExperimentConfig resolve(const Flags& f, const CLI::App* cmd) {
    ExperimentConfig c = f.config;
    if (!f.config_file.empty()) {
        std::ifstream in(f.config_file);
        if (!in) throw ParameterError("cannot open config " + f.config_file);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ParameterError(std::string("bad config file: ") + e.what());
        }
        ExperimentConfig file = config_from_json(j);
        // Flags given on the command line override the file.
        auto given = [&](const char* name) { return cmd->count(name) > 0; };
        if (!given("--algo")) c.algo = file.algo;
        if (!given("--graph")) c.graph_path = file.graph_path;
        if (!given("--family")) c.family = file.family;
        if (!given("--n")) c.params.n = file.params.n;
        if (!given("--t")) c.params.t = file.params.t;
        if (!given("--p")) c.params.p = file.params.p;
        if (!given("--k")) c.params.k = file.params.k;
        if (!given("--seed")) c.graph_seed = file.graph_seed;
        if (!given("--seeds")) c.seeds = file.seeds;
        if (!given("--eps")) c.eps = file.eps;
        if (!given("--t0")) c.t0 = file.t0;
        if (!given("--pattern")) c.pattern = file.pattern;
        if (!given("--packed")) c.packed = file.packed;
        if (!given("--s")) c.s_fixed = file.s_fixed;
        if (!given("--outcome-only")) c.outcome_only = file.outcome_only;
        if (!given("--max-rounds")) c.max_rounds = file.max_rounds;
        if (!given("--out")) c.out = file.out;
    }
    if (cmd->count("--seeds")) c.seeds = parse_seeds(f.seeds);
    if (cmd->count("--s")) c.s_fixed = f.s_fixed;
    if (cmd->count("--max-rounds")) c.max_rounds = f.max_rounds;
    return c;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ParameterError("cannot write " + path);
    out << text;
}

std::string runs_csv(const json& doc) {
    std::ostringstream os;
    os << "seed,found,rounds,words,bits,agree\n";
    for (const auto& r : doc["runs"])
        os << r.value("seed", std::uint64_t{0}) << ',' << r["found"].get<bool>() << ',' << r["ledger"]["rounds"] << ','
           << r["ledger"]["words"] << ',' << r["ledger"]["bits"] << ',' << r["agree"].get<bool>() << '\n';
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Congested-clique subgraph detection simulator"};
    app.require_subcommand(1);

    std::string gen_family, gen_out;
    GeneratorParams gen_params;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("generate", "write a generated graph as an edge list");
    gen->add_option("--family", gen_family, "generator family")->required();
    gen->add_option("--n", gen_params.n, "vertex count")->required();
    gen->add_option("--t", gen_params.t, "triangle count for shared-edge / disjoint");
    gen->add_option("--p", gen_params.p, "edge probability for gnp");
    gen->add_option("--k", gen_params.k, "forest or hub count");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output path (default stdout)");

    Flags run_flags;
    auto* run = app.add_subcommand("run", "run one algorithm over a graph and its seeds");
    add_experiment_flags(run, run_flags);

    Flags sweep_flags;
    std::string axis, values;
    auto* sweep = app.add_subcommand("sweep", "run a config over a range of one parameter");
    add_experiment_flags(sweep, sweep_flags);
    sweep->add_option("--axis", axis, "n, t, eps, k or p")->required();
    sweep->add_option("--values", values, "comma-separated values")->required();

    std::string report_path;
    auto* verify = app.add_subcommand("verify", "check a report against the oracle");
    verify->add_option("--report", report_path, "report file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ExitOk : ExitConfig;
    }

    try {
        if (*gen) {
            Graph g = generate(parse_family(gen_family), gen_params, gen_seed);
            emit(gen_out, serialize_edge_list(g));
            return ExitOk;
        }
        if (*run) {
            ExperimentConfig c = resolve(run_flags, run);
            RunReport r = run_experiment(c);
            emit(c.out, r.document.dump(2) + "\n");
            if (!run_flags.csv.empty()) emit(run_flags.csv, runs_csv(r.document));
            return r.exit_code;
        }
        if (*sweep) {
            ExperimentConfig c = resolve(sweep_flags, sweep);
            std::vector<std::string> list;
            std::stringstream ss(values);
            for (std::string v; std::getline(ss, v, ',');)
                if (!v.empty()) list.push_back(v);
            SweepReport r = run_sweep(c, axis, list);
            json doc = {{"axis", axis}, {"reports", r.reports}};
            emit(c.out, doc.dump(2) + "\n");
            std::string table = sweep_csv(axis, r.rows);
            if (sweep_flags.csv.empty())
                std::cerr << table;
            else
                emit(sweep_flags.csv, table);
            return r.exit_code;
        }
        std::ifstream in(report_path);
        if (!in) throw ParameterError("cannot open report " + report_path);
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw ParameterError(std::string("report is not JSON: ") + e.what());
        }
        RunReport r = verify_report(doc);
        std::cout << r.document.dump(2) << "\n";
        return r.exit_code;
    } catch (const ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return ExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return ExitConfig;
    } catch (const ContractViolation& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return ExitContract;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitContract;
    }
}
