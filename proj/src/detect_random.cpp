#include "cclique/detect_random.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "cclique/detect_general.hpp"
#include "cclique/detection.hpp"
#include "cclique/errors.hpp"
#include "cclique/routing.hpp"

namespace cclique {

namespace {

constexpr double slack = 1e-9;

std::size_t ceil_sqrt(std::size_t n) {
    std::size_t s = 0;
    while (s * s < n) ++s;
    return s;
}

void check_eps(double eps, double hi) {
    if (!(eps > 0.0 && eps < hi)) throw ParameterError("eps must lie in (0, " + std::to_string(hi) + ")");
}

double critical_size(double n, double t, double log_term) {
    double scattered = 2.0 * std::cbrt(n * n) / std::cbrt(t) * std::cbrt(log_term);
    double clustered = 2.0 * std::sqrt(n * log_term);
    return std::max(scattered, clustered);
}

std::uint64_t stream_seed(std::uint64_t seed, std::size_t m, unsigned phase) {
    return seed * 0x9E3779B97F4A7C15ull + (static_cast<std::uint64_t>(m) << 2) + phase;
}

// A triangle in the graph on `verts` (sorted) with the given edges, if any.
std::optional<std::array<NodeId, 3>> find_triangle(const std::vector<NodeId>& verts, const std::vector<Edge>& edges) {
    const std::size_t s = verts.size(), words = (s + 63) / 64;
    std::vector<std::uint64_t> rows(s * words, 0);
    auto index = [&](NodeId v) {
        return static_cast<std::size_t>(std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
    };
    for (auto [u, v] : edges) {
        std::size_t a = index(u), b = index(v);
        rows[a * words + b / 64] |= std::uint64_t{1} << (b % 64);
        rows[b * words + a / 64] |= std::uint64_t{1} << (a % 64);
    }
    for (auto [u, v] : edges) {
        std::size_t a = index(u), b = index(v);
        for (std::size_t w = 0; w < words; ++w)
            if (std::uint64_t both = rows[a * words + w] & rows[b * words + w]) {
                std::size_t c = w * 64 + static_cast<std::size_t>(__builtin_ctzll(both));
                std::array<NodeId, 3> tri{u, v, verts[c]};
                std::sort(tri.begin(), tri.end());
                return tri;
            }
    }
    return std::nullopt;
}

// Edges of g among the members of a sorted set.
std::vector<Edge> induced_edges(const Graph& g, const std::vector<NodeId>& members) {
    std::vector<Edge> e;
    for (NodeId j : members)
        for (NodeId k : g.neighbors(j))
            if (j < k && std::binary_search(members.begin(), members.end(), k)) e.emplace_back(j, k);
    return e;
}

struct IterationOutcome {
    SampleIteration info;
    std::vector<NodeId> reporters;
    std::optional<std::array<NodeId, 3>> witness;
};

IterationOutcome sample_iteration(const Graph& g, Network* net, std::uint64_t seed, std::size_t m, std::size_t s) {
    const std::size_t n = g.size();
    IterationOutcome out;
    out.info.m = m;
    out.info.s = s;

    std::vector<std::vector<NodeId>> c(n);
    std::vector<std::size_t> member_of(n, 0);
    for (NodeId i = 1; i <= n; ++i) {
        c[i - 1] = sample_set(n, s, seed, i, m);
        for (NodeId j : c[i - 1]) ++member_of[j - 1];
    }
    out.info.max_membership = *std::max_element(member_of.begin(), member_of.end());

    std::vector<std::vector<Edge>> known(n);
    if (net) {
        const std::size_t mark = net->mark();
        const unsigned idb = net->id_bits();
        // Member lists to every member.
        std::vector<Message> lists;
        for (NodeId i = 1; i <= n; ++i)
            for (NodeId j : c[i - 1]) {
                if (j == i) continue;
                for (NodeId x : c[i - 1]) lists.push_back({i, j, WordPacker().put_id(x, idb).word()});
            }
        Inboxes got = randomized_delivery(*net, lists, stream_seed(seed, m, 1));

        // Each member answers with its neighbors inside the list.
        std::vector<Message> replies;
        for (NodeId j = 1; j <= n; ++j) {
            const auto& box = got[j - 1];
            for (std::size_t a = 0; a < box.size();) {
                std::size_t b = a;
                std::vector<NodeId> members;
                while (b < box.size() && box[b].src == box[a].src) members.push_back(WordReader(box[b++].payload).get_id(idb));
                std::sort(members.begin(), members.end());
                for (NodeId k : g.neighbors(j))
                    if (std::binary_search(members.begin(), members.end(), k))
                        replies.push_back({j, box[a].src, WordPacker().put_id(k, idb).word()});
                a = b;
            }
        }
        Inboxes back = randomized_delivery(*net, replies, stream_seed(seed, m, 2));
        for (NodeId i = 1; i <= n; ++i) {
            for (const auto& d : back[i - 1]) known[i - 1].emplace_back(d.src, WordReader(d.payload).get_id(idb));
            // A node in its own sample answers itself.
            if (std::binary_search(c[i - 1].begin(), c[i - 1].end(), i))
                for (NodeId k : g.neighbors(i))
                    if (std::binary_search(c[i - 1].begin(), c[i - 1].end(), k)) known[i - 1].emplace_back(i, k);
        }
        out.info.rounds = net->rounds_since(mark);
    } else {
        for (NodeId i = 1; i <= n; ++i) known[i - 1] = induced_edges(g, c[i - 1]);
    }

    for (NodeId i = 1; i <= n; ++i) {
        // Both endpoints may report an edge; keep one copy in a fixed order.
        auto& e = known[i - 1];
        for (auto& [u, v] : e)
            if (u > v) std::swap(u, v);
        std::sort(e.begin(), e.end());
        e.erase(std::unique(e.begin(), e.end()), e.end());
    }
    for (NodeId i = 1; i <= n; ++i)
        if (auto tri = find_triangle(c[i - 1], known[i - 1])) {
            out.reporters.push_back(i);
            if (!out.witness) out.witness = tri;
        }
    out.info.hits = out.reporters.size();
    return out;
}

}  // namespace

double s_threshold(std::size_t n, double t, double eps) {
    check_eps(eps, 2.0);
    if (n < 2) throw ParameterError("threshold needs n >= 2");
    if (!(t >= 1.0)) throw ParameterError("threshold needs t >= 1");
    return critical_size(static_cast<double>(n), t, std::log(2.0 / eps));
}

std::size_t m_threshold(std::size_t n, double t, double eps) {
    double ratio = std::max(s_threshold(n, t, eps) / static_cast<double>(ceil_sqrt(n)), 1.0);
    return static_cast<std::size_t>(std::ceil(std::log2(ratio) - slack)) + 1;
}

double sample_cap(std::size_t n) { return std::cbrt(static_cast<double>(n) * static_cast<double>(n)); }

std::size_t partition_round_cost(std::size_t n) {
    std::size_t s = 1;
    while (s * s * s < n) ++s;
    return 6 * s + 1;
}

std::vector<NodeId> sample_set(std::size_t n, std::size_t s, std::uint64_t seed, NodeId node, std::size_t m) {
    s = std::min(s, n);
    std::mt19937_64 rng = node_rng(seed, node, m);
    // Floyd's method: s uniform distinct values from 1..n.
    std::unordered_set<NodeId> chosen;
    std::vector<NodeId> out;
    for (std::size_t j = n - s + 1; j <= n; ++j) {
        NodeId t = static_cast<NodeId>(std::uniform_int_distribution<std::size_t>(1, j)(rng));
        NodeId pick = chosen.count(t) ? static_cast<NodeId>(j) : t;
        chosen.insert(pick);
        out.push_back(pick);
    }
    std::sort(out.begin(), out.end());
    return out;
}

SampleResult tri_sample(const Graph& g, std::uint64_t seed, const SampleOptions& options) {
    const std::size_t n = g.size();
    if (n == 0) throw ParameterError("graph needs at least one vertex");
    const double cap = options.cap.value_or(sample_cap(n));
    const std::size_t wall = options.wall.value_or(partition_round_cost(n));
    std::optional<Network> net;
    if (!options.outcome_only) net.emplace(n);

    SampleResult res;
    std::size_t s = options.fixed_s.value_or(ceil_sqrt(n));
    for (std::size_t m = 1;; ++m) {
        if (static_cast<double>(s) > cap + slack) break;
        if (net && wall && net->ledger().rounds >= wall) break;
        IterationOutcome it = sample_iteration(g, net ? &*net : nullptr, seed, m, s);
        if (net) {
            const std::size_t mark = net->mark();
            res.found = announce_found(*net, it.reporters);
            it.info.rounds += net->rounds_since(mark);
        } else {
            res.found = !it.reporters.empty();
        }
        res.iterations.push_back(it.info);
        if (res.found) {
            res.success_iteration = m;
            res.s_at_success = s;
            res.witness = it.witness;
            break;
        }
        // A sample of every vertex sees the whole graph; doubling adds nothing.
        if (options.fixed_s || s >= n) break;
        s *= 2;
    }

    if (!res.found && options.fallback && !(options.fixed_s && static_cast<double>(*options.fixed_s) <= cap + slack)) {
        res.fell_back = true;
        DetectionResult d = tri_partition(g, true);
        res.found = d.found;
        if (net) {
            res.ledger = net->ledger();
            res.ledger.append(d.ledger);
            return res;
        }
    }
    if (net) res.ledger = net->ledger();
    return res;
}

double distinguisher_cap(std::size_t n, std::size_t t0, double eps) {
    check_eps(eps, 1.0);
    if (t0 < 1) throw ParameterError("t0 must be at least 1");
    return 2.0 * critical_size(static_cast<double>(n), static_cast<double>(t0), std::log(1.0 / eps));
}

SampleResult distinguisher(const Graph& g, std::size_t t0, double eps, std::uint64_t seed, bool outcome_only) {
    SampleOptions o;
    o.cap = distinguisher_cap(g.size(), t0, eps);
    o.wall = 0;
    o.fallback = false;
    o.outcome_only = outcome_only;
    return tri_sample(g, seed, o);
}

TightnessResult tightness_experiment(Family family, std::size_t n, std::size_t t, double eps, std::size_t s_fixed,
                                     std::size_t seeds, std::uint64_t first_seed, bool outcome_only) {
    check_eps(eps, 2.0);
    const double log_term = std::log(2.0 / eps), dn = static_cast<double>(n);
    double branch;
    if (family == Family::SharedEdge)
        branch = 2.0 * std::sqrt(dn * log_term);
    else if (family == Family::Disjoint)
        branch = 2.0 * std::cbrt(dn * dn) / std::cbrt(static_cast<double>(t)) * std::cbrt(log_term);
    else
        throw ParameterError("tightness runs on the shared-edge or disjoint family");
    if (s_fixed == 0 || static_cast<double>(s_fixed) >= branch)
        throw ParameterError("s_fixed must lie below the family's threshold branch " + std::to_string(branch));

    Graph g = generate(family, {.n = n, .t = t});
    SampleOptions o;
    o.fixed_s = s_fixed;
    o.outcome_only = outcome_only;
    o.fallback = true;
    TightnessResult r;
    for (std::size_t q = 0; q < seeds; ++q) {
        SampleResult x = tri_sample(g, first_seed + q, o);
        ++r.runs;
        if (!x.found) ++r.misses;
    }
    return r;
}

}  // namespace cclique
