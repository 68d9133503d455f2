#include "cclique/harness.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <sstream>

#include "cclique/detect_general.hpp"
#include "cclique/detect_random.hpp"
#include "cclique/detect_sparse.hpp"
#include "cclique/errors.hpp"
#include "cclique/routing.hpp"

namespace cclique {

using nlohmann::json;

namespace {

std::string timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

json ledger_json(const RoundLedger& l) {
    return {{"rounds", l.rounds}, {"words", l.words}, {"bits", l.bits_sent}, {"max_link_use", l.max_link_use}};
}

bool triangle_pattern(const SubgraphPattern& p) {
    return p.d == 3 && p.edges.size() == 3;
}

// Maps pattern vertices 1..d in order onto distinct vertices of g.
bool backtrack(const Graph& g, const SubgraphPattern& p, std::vector<NodeId>& map, std::vector<char>& used) {
    const std::size_t k = map.size();
    if (k == p.d) return true;
    for (NodeId v = 1; v <= g.size(); ++v) {
        if (used[v - 1]) continue;
        bool ok = true;
        for (auto [a, b] : p.edges) {
            NodeId x = a - 1 == k ? b : b - 1 == k ? a : 0;
            if (x && x - 1 < k && !g.has_edge(v, map[x - 1])) ok = false;
        }
        if (!ok) continue;
        map.push_back(v);
        used[v - 1] = 1;
        if (backtrack(g, p, map, used)) return true;
        used[v - 1] = 0;
        map.pop_back();
    }
    return false;
}

double subsets(std::size_t n, std::size_t k) {
    double r = 1;
    for (std::size_t i = 0; i < k && i < n; ++i) r = r * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return k > n ? 0 : r;
}

std::string oracle_method(const Graph& g, const SubgraphPattern& p) {
    if (triangle_pattern(p)) return "census";
    return subsets(g.size(), p.d) <= 2e6 ? "exhaustive" : "backtracking";
}

bool uses_pattern(const std::string& algo) { return algo == "d-clique0" || algo == "diameter-d"; }

// One execution; fills the per-run record.
json run_once(const ExperimentConfig& c, const Graph& g, const SubgraphPattern& pattern, std::uint64_t seed,
              std::size_t triangles) {
    json r;
    const std::string& a = c.algo;
    if (a == "tri-partition" || a == "d-clique0" || a == "tri-neighbors" || a == "diameter-d") {
        DetectionResult d = a == "tri-partition" ? tri_partition(g, c.packed)
                            : a == "d-clique0"   ? d_clique0(g, pattern, c.packed)
                            : a == "tri-neighbors" ? tri_neighbors(g)
                                                   : detect_diameter_d(g, pattern);
        r["found"] = d.found;
        r["ledger"] = ledger_json(d.ledger);
        r["debug"] = {{"n_effective", d.n_effective}, {"reporters", d.reporters.size()}, {"originated", d.originated}};
    } else if (a.rfind("tri-arbor:", 0) == 0) {
        ArborResult x = tri_arbor(g, parse_arbor_variant(a.substr(10)));
        r["found"] = x.found;
        r["ledger"] = ledger_json(x.ledger);
        std::size_t delegates = 0;
        for (std::size_t k : x.debug.delegates_per_iteration) delegates += k;
        r["debug"] = {{"iterations", x.debug.trace.iterations()},
                      {"decomposition_rounds", x.debug.trace.rounds},
                      {"delegates", delegates},
                      {"max_delegate_roles", x.debug.delegate_roles.empty()
                                                 ? 0
                                                 : *std::max_element(x.debug.delegate_roles.begin(),
                                                                     x.debug.delegate_roles.end())},
                      {"low_low_hits", x.debug.low_low_hits},
                      {"delegate_hits", x.debug.delegate_hits}};
    } else if (a == "learn-graph") {
        Network net(g.size());
        auto learned = learn_full_graph(net, g);
        const auto edges = g.edges();
        r["found"] = std::all_of(learned.begin(), learned.end(), [&](const auto& e) { return e == edges; });
        r["ledger"] = ledger_json(net.ledger());
        const std::size_t n = g.size();
        r["debug"] = {{"edges", edges.size()}, {"bound", 3 * ((2 * edges.size() + n - 1) / n) + 3}};
    } else {
        SampleResult x;
        if (a == "distinguisher") {
            x = distinguisher(g, c.t0, c.eps, seed, c.outcome_only);
        } else {
            SampleOptions o;
            o.outcome_only = c.outcome_only;
            if (a == "tightness") o.fixed_s = c.s_fixed;
            x = tri_sample(g, seed, o);
        }
        r["seed"] = seed;
        r["found"] = x.found;
        r["ledger"] = ledger_json(x.ledger);
        r["fell_back"] = x.fell_back;
        r["success_iteration"] = x.success_iteration;
        r["s_at_success"] = x.s_at_success;
        r["iterations"] = x.iterations.size();
        r["witness"] = x.witness ? json(*x.witness) : json(nullptr);
        if (a == "tri-sample" && triangles > 0 && g.size() >= 2) {
            const std::size_t m = m_threshold(g.size(), static_cast<double>(triangles), c.eps);
            r["by_m_threshold"] = x.success_iteration >= 1 && x.success_iteration <= m;
        }
    }
    return r;
}

// Whether one run agrees with the oracle. Sampling without fallback is
// one-sided; graph learning must always succeed.
bool agrees(const std::string& algo, const json& run, bool contains, const Graph& g) {
    const bool found = run.at("found").get<bool>();
    if (algo == "learn-graph") return found;
    if (run.contains("witness") && !run["witness"].is_null()) {
        auto w = run["witness"].get<std::array<NodeId, 3>>();
        for (NodeId v : w)
            if (v < 1 || v > g.size()) return false;
        if (!g.has_edge(w[0], w[1]) || !g.has_edge(w[0], w[2]) || !g.has_edge(w[1], w[2])) return false;
    }
    const bool one_sided = algo == "distinguisher" || (algo == "tightness" && !run.value("fell_back", false));
    return one_sided ? (!found || contains) : found == contains;
}

}  // namespace

const std::vector<std::string>& algorithm_ids() {
    static const std::vector<std::string> ids = {
        "tri-partition",  "d-clique0",      "tri-neighbors", "diameter-d", "tri-arbor:seq", "tri-arbor:par",
        "tri-arbor:base", "tri-arbor:uniform", "tri-sample", "distinguisher", "tightness",  "learn-graph"};
    return ids;
}

bool is_randomized(const std::string& algo) {
    return algo == "tri-sample" || algo == "distinguisher" || algo == "tightness";
}

void validate(const ExperimentConfig& c) {
    const auto& ids = algorithm_ids();
    if (std::find(ids.begin(), ids.end(), c.algo) == ids.end()) throw ParameterError("unknown algorithm '" + c.algo + "'");
    if (c.graph_path.empty() && c.family.empty()) throw ParameterError("need --graph or --family");
    if (!c.graph_path.empty() && !std::filesystem::exists(c.graph_path))
        throw ParameterError("graph file not found: " + c.graph_path);
    if (!c.family.empty()) parse_family(c.family);
    if (is_randomized(c.algo) && c.seeds.empty()) throw ParameterError(c.algo + " needs at least one seed");
    if (c.algo == "tightness") {
        if (!c.s_fixed) throw ParameterError("tightness needs --s");
        if (c.family != "shared-edge" && c.family != "disjoint")
            throw ParameterError("tightness runs on the shared-edge or disjoint family");
    }
    if (uses_pattern(c.algo)) SubgraphPattern::parse(c.pattern);
    if (!(c.eps > 0)) throw ParameterError("eps must be positive");
}

json config_to_json(const ExperimentConfig& c) {
    json j = {{"algo", c.algo},       {"graph", c.graph_path}, {"family", c.family},   {"n", c.params.n},
              {"t", c.params.t},      {"p", c.params.p},       {"k", c.params.k},      {"seed", c.graph_seed},
              {"seeds", c.seeds},     {"eps", c.eps},          {"t0", c.t0},           {"pattern", c.pattern},
              {"packed", c.packed},   {"outcome_only", c.outcome_only}};
    j["s"] = c.s_fixed ? json(*c.s_fixed) : json(nullptr);
    j["max_rounds"] = c.max_rounds ? json(*c.max_rounds) : json(nullptr);
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    static const std::vector<std::string> keys = {"algo", "graph", "family", "n",       "t",            "p",
                                                  "k",    "seed",  "seeds",  "eps",     "t0",           "pattern",
                                                  "packed", "s",   "outcome_only", "max_rounds", "out"};
    if (!j.is_object()) throw ParameterError("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
            throw ParameterError("unknown config key '" + it.key() + "'");
    ExperimentConfig c;
    try {
        c.algo = j.value("algo", "");
        c.graph_path = j.value("graph", "");
        c.family = j.value("family", "");
        c.params.n = j.value("n", std::size_t{0});
        c.params.t = j.value("t", std::size_t{0});
        c.params.p = j.value("p", 0.0);
        c.params.k = j.value("k", std::size_t{1});
        c.graph_seed = j.value("seed", std::uint64_t{0});
        if (j.contains("seeds")) {
            const json& s = j["seeds"];
            c.seeds = s.is_string() ? parse_seeds(s.get<std::string>()) : s.get<std::vector<std::uint64_t>>();
        }
        c.eps = j.value("eps", 0.1);
        c.t0 = j.value("t0", std::size_t{1});
        c.pattern = j.value("pattern", "triangle");
        c.packed = j.value("packed", false);
        c.outcome_only = j.value("outcome_only", false);
        if (j.contains("s") && !j["s"].is_null()) c.s_fixed = j["s"].get<std::size_t>();
        if (j.contains("max_rounds") && !j["max_rounds"].is_null()) c.max_rounds = j["max_rounds"].get<std::size_t>();
        c.out = j.value("out", "");
    } catch (const json::exception& e) {
        throw ParameterError(std::string("bad config value: ") + e.what());
    }
    return c;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw ParameterError("bad seed '" + s + "'");
        return static_cast<std::uint64_t>(v);
    };
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto dash = item.find('-');
        if (dash == std::string::npos) {
            out.push_back(number(item));
            continue;
        }
        std::uint64_t lo = number(item.substr(0, dash)), hi = number(item.substr(dash + 1));
        if (lo > hi) throw ParameterError("empty seed range '" + item + "'");
        for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    }
    return out;
}

Graph load_graph(const ExperimentConfig& c) {
    if (!c.graph_path.empty()) return read_edge_list_file(c.graph_path);
    return generate(parse_family(c.family), c.params, c.graph_seed);
}

bool oracle_verdict(const Graph& g, const SubgraphPattern& p) {
    const std::string method = oracle_method(g, p);
    if (method == "census") return census(g).t > 0;
    if (method == "exhaustive") return oracle_contains(g, p);
    std::vector<NodeId> map;
    std::vector<char> used(g.size(), 0);
    return backtrack(g, p, map, used);
}

RunReport run_experiment(const ExperimentConfig& c) {
    validate(c);
    const Graph g = load_graph(c);
    const SubgraphPattern pattern = uses_pattern(c.algo) ? SubgraphPattern::parse(c.pattern) : SubgraphPattern::triangle();
    if (c.algo == "tightness")  // checks s against the family's branch
        tightness_experiment(parse_family(c.family), c.params.n, c.params.t, c.eps, *c.s_fixed, 0);

    const std::size_t triangles = census(g).t;
    const bool contains = c.algo == "learn-graph" ? true : oracle_verdict(g, pattern);

    RunReport out;
    json& doc = out.document;
    doc["header"] = {{"tool", "cclique"}, {"timestamp", timestamp()}};
    doc["config"] = config_to_json(c);
    doc["graph"] = {{"n", g.size()}, {"edges", g.edge_count()}, {"triangles", triangles}};
    doc["oracle"] = {{"pattern", uses_pattern(c.algo) ? c.pattern : "triangle"},
                     {"contains", contains},
                     {"method", c.algo == "learn-graph" ? "edge-set" : oracle_method(g, pattern)}};

    std::vector<std::uint64_t> seeds = is_randomized(c.algo) ? c.seeds : std::vector<std::uint64_t>{0};
    json runs = json::array();
    std::size_t found = 0, max_rounds = 0, by_m = 0, over_budget = 0;
    double total_rounds = 0;
    bool all_agree = true;
    for (std::uint64_t seed : seeds) {
        json r = run_once(c, g, pattern, seed, triangles);
        r["agree"] = agrees(c.algo, r, contains, g);
        all_agree = all_agree && r["agree"].get<bool>();
        const std::size_t rounds = r["ledger"]["rounds"].get<std::size_t>();
        if (c.max_rounds && rounds > *c.max_rounds) {
            r["over_budget"] = true;
            ++over_budget;
        }
        found += r["found"].get<bool>();
        by_m += r.value("by_m_threshold", false);
        max_rounds = std::max(max_rounds, rounds);
        total_rounds += static_cast<double>(rounds);
        runs.push_back(std::move(r));
    }
    doc["runs"] = runs;
    const double count = static_cast<double>(seeds.size());
    json agg = {{"runs", seeds.size()},
                {"success_frequency", found / count},
                {"max_rounds", max_rounds},
                {"mean_rounds", total_rounds / count},
                {"agree", all_agree},
                {"over_budget", over_budget}};
    if (c.algo == "tri-sample" && triangles > 0) {
        agg["m_threshold"] = m_threshold(g.size(), static_cast<double>(triangles), c.eps);
        agg["success_by_m_threshold"] = by_m / count;
    }
    if (c.algo == "tightness") agg["miss_frequency"] = (count - found) / count;
    doc["aggregate"] = agg;
    out.exit_code = !all_agree ? ExitMismatch : over_budget ? ExitContract : ExitOk;
    return out;
}

RunReport verify_report(const json& report) {
    RunReport out;
    json problems = json::array();
    auto fail = [&](const std::string& what) { problems.push_back(what); };
    try {
        const ExperimentConfig c = config_from_json(report.at("config"));
        validate(c);
        const Graph g = load_graph(c);
        const SubgraphPattern pattern =
            uses_pattern(c.algo) ? SubgraphPattern::parse(c.pattern) : SubgraphPattern::triangle();
        const bool contains = c.algo == "learn-graph" ? true : oracle_verdict(g, pattern);
        if (report.at("oracle").at("contains").get<bool>() != contains) fail("recorded oracle verdict is wrong");
        const json& runs = report.at("runs");
        for (std::size_t i = 0; i < runs.size(); ++i)
            if (!agrees(c.algo, runs[i], contains, g)) fail("run " + std::to_string(i) + " disagrees with the oracle");
        if (!is_randomized(c.algo)) {
            json fresh = run_experiment(c).document;
            if (fresh["runs"].size() != runs.size()) fail("run count differs from a fresh execution");
            for (std::size_t i = 0; i < std::min(runs.size(), fresh["runs"].size()); ++i) {
                if (fresh["runs"][i]["found"] != runs[i].at("found")) fail("run " + std::to_string(i) + ": found differs");
                if (fresh["runs"][i]["ledger"] != runs[i].at("ledger")) fail("run " + std::to_string(i) + ": ledger differs");
            }
        }
    } catch (const json::exception& e) {
        fail(std::string("malformed report: ") + e.what());
    }
    out.document = {{"verified", problems.empty()}, {"problems", problems}};
    out.exit_code = problems.empty() ? ExitOk : ExitMismatch;
    return out;
}

SweepReport run_sweep(const ExperimentConfig& base, const std::string& axis, const std::vector<std::string>& values) {
    std::function<void(ExperimentConfig&, const std::string&)> set;
    auto whole = [](const std::string& v) {
        std::size_t used = 0;
        unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw ParameterError("bad sweep value '" + v + "'");
        return static_cast<std::size_t>(x);
    };
    if (axis == "n") set = [&](ExperimentConfig& c, const std::string& v) { c.params.n = whole(v); };
    else if (axis == "t") set = [&](ExperimentConfig& c, const std::string& v) { c.params.t = whole(v); };
    else if (axis == "k") set = [&](ExperimentConfig& c, const std::string& v) { c.params.k = whole(v); };
    else if (axis == "eps") set = [](ExperimentConfig& c, const std::string& v) { c.eps = std::stod(v); };
    else if (axis == "p") set = [](ExperimentConfig& c, const std::string& v) { c.params.p = std::stod(v); };
    else throw ParameterError("sweep axis must be n, t, eps, k or p");
    if (values.empty()) throw ParameterError("sweep needs at least one value");

    SweepReport out;
    for (const auto& v : values) {
        ExperimentConfig c = base;
        try {
            set(c, v);
        } catch (const std::logic_error&) {
            throw ParameterError("bad sweep value '" + v + "'");
        }
        RunReport r = run_experiment(c);
        const json& agg = r.document["aggregate"];
        out.rows.push_back({v, agg["mean_rounds"].get<double>(), agg["max_rounds"].get<std::size_t>(),
                            agg["success_frequency"].get<double>(), agg["agree"].get<bool>()});
        out.exit_code = std::max(out.exit_code, r.exit_code);
        out.reports.push_back(std::move(r.document));
    }
    return out;
}

std::string sweep_csv(const std::string& axis, const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << axis << ",mean_rounds,max_rounds,success,agree\n";
    for (const auto& r : rows)
        os << r.value << ',' << r.mean_rounds << ',' << r.max_rounds << ',' << r.success << ',' << (r.agree ? 1 : 0)
           << '\n';
    return os.str();
}

}  // namespace cclique
