#include "cclique/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

#include "cclique/errors.hpp"

namespace cclique {

Graph::Graph(std::size_t n) : adj_(n) {}

Graph::Graph(std::size_t n, const std::vector<Edge>& edges) : adj_(n) {
    for (auto [u, v] : edges) {
        if (u == v) throw ParameterError("self-loop at vertex " + std::to_string(u));
        if (u < 1 || v < 1 || u > n || v > n)
            throw ParameterError("edge {" + std::to_string(u) + "," + std::to_string(v) +
                                 "} out of range 1.." + std::to_string(n));
        adj_[u - 1].push_back(v);
        adj_[v - 1].push_back(u);
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = adj_[i];
        std::sort(a.begin(), a.end());
        if (std::adjacent_find(a.begin(), a.end()) != a.end())
            throw ParameterError("duplicate edge at vertex " + std::to_string(i + 1));
    }
    edges_ = edges.size();
}

std::size_t Graph::max_degree() const {
    std::size_t m = 0;
    for (const auto& a : adj_) m = std::max(m, a.size());
    return m;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    if (u < 1 || u > adj_.size()) return false;
    const auto& a = adj_[u - 1];
    return std::binary_search(a.begin(), a.end(), v);
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(edges_);
    for (NodeId u = 1; u <= adj_.size(); ++u)
        for (NodeId v : adj_[u - 1])
            if (u < v) out.emplace_back(u, v);
    return out;
}

bool Graph::check_invariants() const {
    const std::size_t n = adj_.size();
    std::size_t half_edges = 0;
    for (NodeId u = 1; u <= n; ++u) {
        const auto& a = adj_[u - 1];
        if (!std::is_sorted(a.begin(), a.end())) return false;
        if (std::adjacent_find(a.begin(), a.end()) != a.end()) return false;
        for (NodeId v : a) {
            if (v < 1 || v > n || v == u) return false;
            if (!has_edge(v, u)) return false;
        }
        half_edges += a.size();
    }
    return half_edges == 2 * edges_;
}

// ---------------------------------------------------------------------------
// Patterns

SubgraphPattern SubgraphPattern::triangle() { return clique(3); }

SubgraphPattern SubgraphPattern::clique(std::size_t d) {
    SubgraphPattern p{d, {}};
    for (NodeId a = 1; a <= d; ++a)
        for (NodeId b = a + 1; b <= d; ++b) p.edges.emplace_back(a, b);
    return p;
}

SubgraphPattern SubgraphPattern::cycle(std::size_t d) {
    if (d < 3) throw ParameterError("cycle pattern needs d >= 3");
    SubgraphPattern p{d, {}};
    for (NodeId a = 1; a < d; ++a) p.edges.emplace_back(a, a + 1);
    p.edges.emplace_back(1, static_cast<NodeId>(d));
    return p;
}

SubgraphPattern SubgraphPattern::path(std::size_t d) {
    if (d < 1) throw ParameterError("path pattern needs d >= 1");
    SubgraphPattern p{d, {}};
    for (NodeId a = 1; a < d; ++a) p.edges.emplace_back(a, a + 1);
    return p;
}

SubgraphPattern SubgraphPattern::parse(const std::string& spec) {
    if (spec == "triangle") return triangle();
    auto colon = spec.find(':');
    if (colon == std::string::npos) throw ParameterError("unknown pattern '" + spec + "'");
    std::string kind = spec.substr(0, colon);
    std::size_t d = 0;
    try {
        d = std::stoul(spec.substr(colon + 1));
    } catch (const std::exception&) {
        throw ParameterError("bad pattern size in '" + spec + "'");
    }
    if (kind == "clique") return clique(d);
    if (kind == "cycle") return cycle(d);
    if (kind == "path") return path(d);
    throw ParameterError("unknown pattern '" + spec + "'");
}

Graph SubgraphPattern::as_graph() const { return Graph(d, edges); }

namespace {

std::vector<std::size_t> bfs_dist(const Graph& g, NodeId src) {
    constexpr auto inf = static_cast<std::size_t>(-1);
    std::vector<std::size_t> dist(g.size(), inf);
    std::queue<NodeId> q;
    dist[src - 1] = 0;
    q.push(src);
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop();
        for (NodeId v : g.neighbors(u))
            if (dist[v - 1] == inf) {
                dist[v - 1] = dist[u - 1] + 1;
                q.push(v);
            }
    }
    return dist;
}

}  // namespace

bool SubgraphPattern::connected() const {
    if (d == 0) return false;
    auto dist = bfs_dist(as_graph(), 1);
    return std::none_of(dist.begin(), dist.end(), [](std::size_t x) { return x == static_cast<std::size_t>(-1); });
}

std::size_t SubgraphPattern::diameter() const {
    Graph g = as_graph();
    std::size_t diam = 0;
    for (NodeId v = 1; v <= d; ++v)
        for (std::size_t x : bfs_dist(g, v))
            if (x != static_cast<std::size_t>(-1)) diam = std::max(diam, x);
    return diam;
}

// ---------------------------------------------------------------------------
// Generators

Family parse_family(const std::string& name) {
    static const std::pair<const char*, Family> table[] = {
        {"empty", Family::Empty},     {"complete", Family::Complete},      {"path", Family::Path},
        {"cycle", Family::Cycle},     {"star", Family::Star},              {"tree", Family::Tree},
        {"gnp", Family::Gnp},         {"shared-edge", Family::SharedEdge}, {"disjoint", Family::Disjoint},
        {"forests", Family::Forests}, {"grid", Family::Grid},              {"hubs", Family::Hubs},
    };
    for (auto [k, f] : table)
        if (name == k) return f;
    throw ParameterError("unknown graph family '" + name + "'");
}

std::string family_name(Family f) {
    switch (f) {
        case Family::Empty: return "empty";
        case Family::Complete: return "complete";
        case Family::Path: return "path";
        case Family::Cycle: return "cycle";
        case Family::Star: return "star";
        case Family::Tree: return "tree";
        case Family::Gnp: return "gnp";
        case Family::SharedEdge: return "shared-edge";
        case Family::Disjoint: return "disjoint";
        case Family::Forests: return "forests";
        case Family::Grid: return "grid";
        case Family::Hubs: return "hubs";
    }
    return "?";
}

namespace {

// Random recursive tree on the given vertex order.
void add_random_tree(std::vector<NodeId> order, std::mt19937_64& rng, std::vector<Edge>& out) {
    for (std::size_t i = 1; i < order.size(); ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        NodeId a = order[i], b = order[pick(rng)];
        out.emplace_back(std::min(a, b), std::max(a, b));
    }
}

}  // namespace

Graph generate(Family family, const GeneratorParams& params, std::uint64_t seed) {
    const std::size_t n = params.n;
    std::vector<Edge> e;
    std::mt19937_64 rng(seed);
    auto id = [](std::size_t x) { return static_cast<NodeId>(x); };

    switch (family) {
        case Family::Empty:
            break;
        case Family::Complete:
            for (std::size_t u = 1; u <= n; ++u)
                for (std::size_t v = u + 1; v <= n; ++v) e.emplace_back(id(u), id(v));
            break;
        case Family::Path:
            for (std::size_t u = 1; u < n; ++u) e.emplace_back(id(u), id(u + 1));
            break;
        case Family::Cycle:
            if (n < 3) throw ParameterError("cycle needs n >= 3");
            for (std::size_t u = 1; u < n; ++u) e.emplace_back(id(u), id(u + 1));
            e.emplace_back(1, id(n));
            break;
        case Family::Star:
            for (std::size_t u = 2; u <= n; ++u) e.emplace_back(1, id(u));
            break;
        case Family::Tree: {
            std::vector<NodeId> order(n);
            std::iota(order.begin(), order.end(), NodeId{1});
            add_random_tree(order, rng, e);
            break;
        }
        case Family::Gnp: {
            if (params.p < 0.0 || params.p > 1.0) throw ParameterError("gnp needs 0 <= p <= 1");
            std::bernoulli_distribution coin(params.p);
            for (std::size_t u = 1; u <= n; ++u)
                for (std::size_t v = u + 1; v <= n; ++v)
                    if (coin(rng)) e.emplace_back(id(u), id(v));
            break;
        }
        case Family::SharedEdge:
            if (n < 2 || params.t > n - 2) throw ParameterError("shared-edge needs t <= n-2");
            e.emplace_back(1, 2);
            for (std::size_t k = 3; k < 3 + params.t; ++k) {
                e.emplace_back(1, id(k));
                e.emplace_back(2, id(k));
            }
            break;
        case Family::Disjoint:
            if (3 * params.t > n) throw ParameterError("disjoint needs 3t <= n");
            for (std::size_t i = 0; i < params.t; ++i) {
                NodeId a = id(3 * i + 1);
                e.emplace_back(a, a + 1);
                e.emplace_back(a, a + 2);
                e.emplace_back(a + 1, a + 2);
            }
            break;
        case Family::Forests: {
            // Union of k random spanning trees: arboricity <= k.
            if (params.k < 1) throw ParameterError("forests needs k >= 1");
            std::vector<NodeId> order(n);
            std::iota(order.begin(), order.end(), NodeId{1});
            for (std::size_t f = 0; f < params.k; ++f) {
                std::shuffle(order.begin(), order.end(), rng);
                add_random_tree(order, rng, e);
            }
            std::sort(e.begin(), e.end());
            e.erase(std::unique(e.begin(), e.end()), e.end());
            break;
        }
        case Family::Grid: {
            // Triangulated grid, row width ceil(sqrt(n)): planar, arboricity <= 3.
            std::size_t w = 1;
            while (w * w < n) ++w;
            for (std::size_t v = 0; v < n; ++v) {
                std::size_t r = v / w, c = v % w;
                if (c + 1 < w && v + 1 < n) e.emplace_back(id(v + 1), id(v + 2));
                if (v + w < n) e.emplace_back(id(v + 1), id(v + w + 1));
                if (c + 1 < w && v + w + 1 < n) e.emplace_back(id(v + 1), id(v + w + 2));
                (void)r;
            }
            break;
        }
        case Family::Hubs: {
            // k >= 2 pairwise adjacent hubs, one pendant vertex adjacent to every
            // hub, remaining vertices are leaves spread round-robin over hubs.
            const std::size_t k = params.k;
            if (k < 2 || n < k + 1) throw ParameterError("hubs needs k >= 2 and n >= k+1");
            for (std::size_t a = 1; a <= k; ++a)
                for (std::size_t b = a + 1; b <= k; ++b) e.emplace_back(id(a), id(b));
            for (std::size_t a = 1; a <= k; ++a) e.emplace_back(id(a), id(k + 1));
            for (std::size_t v = k + 2; v <= n; ++v) e.emplace_back(id((v - k - 2) % k + 1), id(v));
            break;
        }
    }
    return Graph(n, e);
}

// ---------------------------------------------------------------------------
// Census

namespace {

std::size_t triple_overlap(const std::array<NodeId, 3>& a, const std::array<NodeId, 3>& b) {
    std::size_t i = 0, j = 0, c = 0;
    while (i < 3 && j < 3) {
        if (a[i] == b[j]) {
            ++c;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return c;
}

constexpr std::uint64_t kBrutePairLimit = 6000;

}  // namespace

TriangleCensus census(const Graph& g) {
    TriangleCensus c;
    const std::size_t n = g.size();

    // Edge index: for u, its upper neighbors v > u are stored consecutively.
    std::vector<std::size_t> offset(n + 1, 0);
    for (NodeId u = 1; u <= n; ++u) {
        const auto& a = g.neighbors(u);
        offset[u] = offset[u - 1] + static_cast<std::size_t>(a.end() - std::upper_bound(a.begin(), a.end(), u));
    }
    auto edge_index = [&](NodeId u, NodeId v) {
        if (u > v) std::swap(u, v);
        const auto& a = g.neighbors(u);
        auto first = std::upper_bound(a.begin(), a.end(), u);
        return offset[u - 1] + static_cast<std::size_t>(std::lower_bound(first, a.end(), v) - first);
    };
    c.delta_e.assign(g.edge_count(), 0);

    std::vector<std::uint64_t> per_vertex(n, 0);
    for (NodeId u = 1; u <= n; ++u) {
        const auto& nu = g.neighbors(u);
        for (NodeId v : nu) {
            if (v <= u) continue;
            const auto& nv = g.neighbors(v);
            auto a = std::upper_bound(nu.begin(), nu.end(), v);
            auto b = std::upper_bound(nv.begin(), nv.end(), v);
            while (a != nu.end() && b != nv.end()) {
                if (*a == *b) {
                    NodeId w = *a;
                    c.triangles.push_back({u, v, w});
                    ++c.delta_e[edge_index(u, v)];
                    ++c.delta_e[edge_index(u, w)];
                    ++c.delta_e[edge_index(v, w)];
                    ++per_vertex[u - 1];
                    ++per_vertex[v - 1];
                    ++per_vertex[w - 1];
                    ++a;
                    ++b;
                } else if (*a < *b) {
                    ++a;
                } else {
                    ++b;
                }
            }
        }
    }
    c.t = c.triangles.size();
    for (auto d : c.delta_e) c.delta_max = std::max(c.delta_max, d);

    const std::uint64_t pairs = c.t * (c.t - (c.t > 0 ? 1 : 0)) / 2;
    if (c.t <= kBrutePairLimit) {
        for (std::size_t i = 0; i < c.triangles.size(); ++i)
            for (std::size_t j = i + 1; j < c.triangles.size(); ++j) {
                switch (triple_overlap(c.triangles[i], c.triangles[j])) {
                    case 2: ++c.t4; break;
                    case 1: ++c.t5; break;
                    default: ++c.t6; break;
                }
            }
    } else {
        // Pairs sharing an edge, then pairs sharing at least a vertex (edge-sharing
        // pairs are counted twice there), remainder are disjoint.
        for (auto d : c.delta_e) c.t4 += d * (d - (d > 0 ? 1 : 0)) / 2;
        std::uint64_t share_vertex = 0;
        for (auto d : per_vertex) share_vertex += d * (d - (d > 0 ? 1 : 0)) / 2;
        c.t5 = share_vertex - 2 * c.t4;
        c.t6 = pairs - c.t4 - c.t5;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Containment oracle

bool oracle_contains(const Graph& g, const SubgraphPattern& pattern) {
    const std::size_t n = g.size(), d = pattern.d;
    if (d == 0) return true;
    if (d > n) return false;

    std::vector<std::pair<std::size_t, std::size_t>> pedges;
    for (auto [a, b] : pattern.edges) pedges.emplace_back(a - 1, b - 1);
    if (pedges.size() > g.edge_count()) return false;

    // Dense adjacency rows make the inner check cheap.
    const std::size_t words = (n + 63) / 64;
    std::vector<std::uint64_t> bits(n * words, 0);
    for (NodeId u = 1; u <= n; ++u)
        for (NodeId v : g.neighbors(u)) bits[(u - 1) * words + (v - 1) / 64] |= std::uint64_t{1} << ((v - 1) % 64);
    auto adjacent = [&](std::size_t u, std::size_t v) { return (bits[u * words + v / 64] >> (v % 64)) & 1; };

    std::vector<std::size_t> perm(d);
    std::vector<std::size_t> pick(d);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
        std::iota(perm.begin(), perm.end(), 0);
        do {
            bool ok = true;
            for (auto [a, b] : pedges)
                if (!adjacent(pick[perm[a]], pick[perm[b]])) {
                    ok = false;
                    break;
                }
            if (ok) return true;
        } while (std::next_permutation(perm.begin(), perm.end()));

        // Next d-combination of 0..n-1.
        std::size_t i = d;
        while (i > 0 && pick[i - 1] == n - d + (i - 1)) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < d; ++j) pick[j] = pick[j - 1] + 1;
    }
    return false;
}

// ---------------------------------------------------------------------------

std::size_t degeneracy(const Graph& g) {
    const std::size_t n = g.size();
    if (n == 0) return 0;
    std::vector<std::size_t> deg(n);
    std::size_t maxd = 0;
    for (NodeId v = 1; v <= n; ++v) {
        deg[v - 1] = g.degree(v);
        maxd = std::max(maxd, deg[v - 1]);
    }
    std::vector<std::vector<NodeId>> bucket(maxd + 1);
    for (NodeId v = 1; v <= n; ++v) bucket[deg[v - 1]].push_back(v);
    std::vector<bool> removed(n, false);
    std::size_t k = 0, cur = 0;
    for (std::size_t done = 0; done < n;) {
        cur = cur > 0 ? cur - 1 : 0;
        while (bucket[cur].empty()) ++cur;
        NodeId v = bucket[cur].back();
        bucket[cur].pop_back();
        if (removed[v - 1] || deg[v - 1] != cur) continue;  // stale entry
        removed[v - 1] = true;
        ++done;
        k = std::max(k, cur);
        for (NodeId u : g.neighbors(v))
            if (!removed[u - 1]) bucket[--deg[u - 1]].push_back(u);
    }
    return k;
}

// ---------------------------------------------------------------------------
// Edge-list text format

Graph parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> n;
    std::vector<Edge> edges;
    std::vector<std::vector<NodeId>> seen;

    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;  // blank line
        std::string extra;
        if (!n) {
            std::size_t count = 0;
            if (first != "n" || !(ls >> count) || (ls >> extra))
                throw ParseError(lineno, "expected header 'n <vertex-count>'");
            n = count;
            seen.assign(count, {});
            continue;
        }
        long long u = 0, v = 0;
        std::istringstream es(line);
        if (!(es >> u >> v) || (es >> extra)) throw ParseError(lineno, "malformed edge line '" + line + "'");
        if (u == v) throw ParseError(lineno, "self-loop at vertex " + std::to_string(u));
        if (u < 1 || v < 1 || static_cast<std::size_t>(u) > *n || static_cast<std::size_t>(v) > *n)
            throw ParseError(lineno, "vertex id out of range 1.." + std::to_string(*n));
        NodeId a = static_cast<NodeId>(std::min(u, v)), b = static_cast<NodeId>(std::max(u, v));
        auto& s = seen[a - 1];
        if (std::find(s.begin(), s.end(), b) != s.end())
            throw ParseError(lineno, "duplicate edge {" + std::to_string(a) + "," + std::to_string(b) + "}");
        s.push_back(b);
        edges.emplace_back(a, b);
    }
    if (!n) throw ParseError(lineno == 0 ? 1 : lineno, "missing header 'n <vertex-count>'");
    return Graph(*n, edges);
}

std::string serialize_edge_list(const Graph& g) {
    std::ostringstream out;
    out << "n " << g.size() << '\n';
    for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
    return out.str();
}

Graph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_edge_list(buf.str());
}

void write_edge_list_file(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << serialize_edge_list(g);
}

Graph embed(const Graph& g, std::size_t n, const std::vector<NodeId>& map) {
    if (map.size() != g.size()) throw ParameterError("embed: map size mismatch");
    std::vector<Edge> e;
    for (auto [u, v] : g.edges()) e.emplace_back(map[u - 1], map[v - 1]);
    return Graph(n, e);
}

}  // namespace cclique
