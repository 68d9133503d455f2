#include "cclique/detect_sparse.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "cclique/detect_general.hpp"
#include "cclique/errors.hpp"
#include "cclique/routing.hpp"

namespace cclique {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return b == 0 ? 0 : (a + b - 1) / b; }

std::size_t ceil_sqrt(std::size_t n) {
    std::size_t s = 0;
    while (s * s < n) ++s;
    return s;
}

Word id_word(NodeId v, unsigned id_bits) { return WordPacker().put_id(v, id_bits).word(); }

std::vector<NodeId> decode_ids(const std::vector<Word>& words, unsigned id_bits) {
    std::vector<NodeId> ids;
    ids.reserve(words.size());
    for (const Word& w : words) ids.push_back(WordReader(w).get_id(id_bits));
    return ids;
}

bool sorted_intersect(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) return true;
        if (*i < *j)
            ++i;
        else
            ++j;
    }
    return false;
}

// Pattern test on the graph spanned by a list of known edges.
bool match_edges(const std::vector<Edge>& edges, const SubgraphPattern& pattern) {
    std::vector<NodeId> verts;
    for (auto [u, v] : edges) {
        verts.push_back(u);
        verts.push_back(v);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    const std::size_t size = verts.size(), words = (size + 63) / 64;
    std::vector<std::uint64_t> rows(size * words, 0);
    auto index = [&](NodeId v) {
        return static_cast<std::size_t>(std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
    };
    for (auto [u, v] : edges) {
        std::size_t a = index(u), b = index(v);
        rows[a * words + b / 64] |= std::uint64_t{1} << (b % 64);
        rows[b * words + a / 64] |= std::uint64_t{1} << (a % 64);
    }
    return match_pattern(size, rows, pattern);
}

}  // namespace

// ---------------------------------------------------------------------------
// Bounded degree

DetectionResult tri_neighbors(const Graph& g) {
    const std::size_t n = g.size();
    if (n == 0) throw ParameterError("graph needs at least one vertex");
    Network net(n);
    const unsigned idb = net.id_bits();

    std::vector<std::vector<Word>> contents(n);
    std::vector<std::vector<NodeId>> destinations(n);
    DetectionResult res;
    res.n_effective = n;
    res.originated.assign(n, 0);
    for (NodeId i = 1; i <= n; ++i) {
        for (NodeId v : g.neighbors(i)) contents[i - 1].push_back(id_word(v, idb));
        destinations[i - 1] = g.neighbors(i);
        res.originated[i - 1] = g.degree(i) * g.degree(i);
    }
    RoundRobinOptions opt;
    // In-load of j is the sum of its neighbors' degrees, at most D^2.
    opt.passes = [n](const std::vector<std::size_t>& k) {
        std::size_t d = k.empty() ? 0 : *std::max_element(k.begin(), k.end());
        return ceil_div(d * d, n);
    };
    RoundRobinResult rr = round_robin_messaging(net, contents, destinations, opt);

    for (NodeId j = 1; j <= n; ++j)
        for (const auto& [src, words] : rr.received[j - 1])
            if (sorted_intersect(decode_ids(words, idb), g.neighbors(j))) {
                res.reporters.push_back(j);
                break;
            }
    res.found = announce_found(net, res.reporters);
    res.ledger = net.ledger();
    return res;
}

DetectionResult detect_diameter_d(const Graph& g, const SubgraphPattern& pattern) {
    const std::size_t n = g.size();
    if (n == 0) throw ParameterError("graph needs at least one vertex");
    if (pattern.d < 2 || !pattern.connected()) throw ParameterError("pattern must be connected with d >= 2");
    const std::size_t reps = pattern.diameter();
    Network net(n);
    const unsigned idb = net.id_bits();

    std::vector<std::set<Edge>> known(n);
    std::vector<std::vector<Edge>> fresh(n);
    for (NodeId i = 1; i <= n; ++i)
        for (NodeId v : g.neighbors(i)) {
            Edge e = std::minmax(i, v);
            known[i - 1].insert(e);
            fresh[i - 1].push_back(e);
        }

    DetectionResult res;
    res.n_effective = n;
    res.originated.assign(n, 0);
    std::size_t max_degree = 0;
    for (std::size_t rep = 1; rep <= reps; ++rep) {
        std::vector<std::vector<Word>> contents(n);
        std::vector<std::vector<NodeId>> destinations(n);
        for (NodeId i = 1; i <= n; ++i) {
            for (auto [u, v] : fresh[i - 1]) contents[i - 1].push_back(WordPacker().put_id(u, idb).put_id(v, idb).word());
            destinations[i - 1] = g.neighbors(i);
            res.originated[i - 1] += fresh[i - 1].size() * g.degree(i);
        }
        RoundRobinOptions opt;
        opt.announce = true;
        // The first counts are the degrees; later in-loads are at most D * max count.
        opt.passes = [&, first = rep == 1](const std::vector<std::size_t>& k) {
            std::size_t kmax = k.empty() ? 0 : *std::max_element(k.begin(), k.end());
            if (first) max_degree = kmax;
            return ceil_div(max_degree * kmax, n);
        };
        RoundRobinResult rr = round_robin_messaging(net, contents, destinations, opt);

        for (NodeId j = 1; j <= n; ++j) {
            fresh[j - 1].clear();
            for (const auto& [src, words] : rr.received[j - 1])
                for (const Word& w : words) {
                    WordReader r(w);
                    NodeId u = r.get_id(idb);
                    NodeId v = r.get_id(idb);
                    if (known[j - 1].insert({u, v}).second) fresh[j - 1].push_back({u, v});
                }
        }
    }

    for (NodeId i = 1; i <= n; ++i)
        if (match_edges({known[i - 1].begin(), known[i - 1].end()}, pattern)) res.reporters.push_back(i);
    res.found = announce_found(net, res.reporters);
    res.ledger = net.ledger();
    return res;
}

// ---------------------------------------------------------------------------
// Decomposition and delegates

std::size_t DecompositionTrace::eliminated_in(NodeId v) const {
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const auto& s = steps[k];
        if (std::binary_search(s.active.begin(), s.active.end(), v) && s.degree[v - 1] <= s.threshold) return k;
    }
    throw ContractViolation("vertex never eliminated");
}

std::size_t threshold_for(ThresholdRule rule, std::size_t n, std::size_t a, const DecompositionStep& step) {
    switch (rule) {
        case ThresholdRule::Fixed4A:
            return 4 * a;
        case ThresholdRule::BaseChange:
            return std::max(4 * a, ceil_sqrt(n));
        case ThresholdRule::Uniform: {
            std::size_t sum = 0;
            for (NodeId v : step.active) sum += step.degree[v - 1];
            return std::max(ceil_div(2 * sum, step.active.size()), ceil_sqrt(n));
        }
    }
    throw ParameterError("unknown threshold rule");
}

namespace {

// One round: active nodes broadcast their induced degree.
DecompositionStep announce_degrees(Network& net, const Graph& g, const std::vector<bool>& alive) {
    const std::size_t n = g.size();
    const unsigned idb = net.id_bits();
    std::vector<std::vector<Envelope>> out(n);
    for (NodeId i = 1; i <= n; ++i) {
        if (!alive[i - 1]) continue;
        std::size_t d = 0;
        for (NodeId v : g.neighbors(i)) d += alive[v - 1];
        out[i - 1] = broadcast_word(net, i, WordPacker().put(d, idb).word());
    }
    auto in = net.exchange(out);
    DecompositionStep step;
    step.degree.assign(n, 0);
    for (const auto& e : in[0]) {
        step.active.push_back(e.src);
        step.degree[e.src - 1] = WordReader(e.payload).get(idb);
    }
    return step;
}

// Drops the nodes at or below the threshold; a step that removes nobody cannot end.
void eliminate(const DecompositionStep& step, std::vector<bool>& alive) {
    std::size_t removed = 0;
    for (NodeId v : step.active)
        if (step.degree[v - 1] <= step.threshold) {
            alive[v - 1] = false;
            ++removed;
        }
    if (removed == 0) throw ContractViolation("threshold " + std::to_string(step.threshold) + " eliminates no node");
}

}  // namespace

DecompositionTrace quick_decomposition(Network& net, const Graph& g, ThresholdRule rule, std::size_t a) {
    const std::size_t n = g.size();
    if (net.size() != n) throw ContractViolation("network and graph sizes differ");
    DecompositionTrace trace;
    std::size_t mark = net.mark();
    std::vector<bool> alive(n, true);
    while (std::find(alive.begin(), alive.end(), true) != alive.end()) {
        DecompositionStep step = announce_degrees(net, g, alive);
        step.threshold = threshold_for(rule, n, a, step);
        eliminate(step, alive);
        trace.steps.push_back(std::move(step));
    }
    trace.rounds = net.rounds_since(mark);
    return trace;
}

DecompositionTrace quick_decomposition(const Graph& g, ThresholdRule rule, std::size_t a) {
    if (g.size() == 0) return {};
    Network net(g.size());
    return quick_decomposition(net, g, rule, a);
}

DelegateAssignment assign_delegates(const std::vector<std::size_t>& degree, std::size_t threshold,
                                    std::size_t pool_start) {
    const std::size_t n = degree.size();
    DelegateAssignment as;
    as.threshold = threshold;
    as.delegates.assign(n, {});
    as.role.assign(n, {});
    as.next_pool = n ? pool_start % n : 0;

    std::vector<NodeId> high;
    for (NodeId v = 1; v <= n; ++v)
        if (degree[v - 1] > threshold) high.push_back(v);
    if (high.empty()) return as;
    if (threshold == 0) throw DelegateExhaustion("threshold 0 leaves nodes with unbounded delegate demand");
    std::sort(high.begin(), high.end(), [&](NodeId a, NodeId b) {
        return degree[a - 1] != degree[b - 1] ? degree[a - 1] > degree[b - 1] : a < b;
    });
    std::size_t need = 0;
    for (NodeId v : high) need += ceil_div(degree[v - 1], threshold);
    if (need > n)
        throw DelegateExhaustion("need " + std::to_string(need) + " delegates but only " + std::to_string(n) +
                                 " nodes");

    std::size_t pos = as.next_pool;
    for (NodeId v : high) {
        std::size_t d = degree[v - 1];
        for (std::size_t begin = 0; begin < d; begin += threshold) {
            NodeId del = static_cast<NodeId>(pos + 1);
            as.delegates[v - 1].push_back(del);
            as.role[del - 1] = {v, begin, std::min(d, begin + threshold)};
            pos = (pos + 1) % n;
        }
    }
    as.count = need;
    as.next_pool = pos;
    return as;
}

// ---------------------------------------------------------------------------
// TriArbor

ArborVariant parse_arbor_variant(const std::string& name) {
    if (name == "seq" || name == "sequential") return ArborVariant::Sequential;
    if (name == "par" || name == "parallel") return ArborVariant::Parallel;
    if (name == "base" || name == "base-change") return ArborVariant::BaseChange;
    if (name == "uniform") return ArborVariant::Uniform;
    throw ParameterError("unknown TriArbor variant '" + name + "'");
}

std::string arbor_variant_name(ArborVariant v) {
    switch (v) {
        case ArborVariant::Sequential:
            return "seq";
        case ArborVariant::Parallel:
            return "par";
        case ArborVariant::BaseChange:
            return "base";
        case ArborVariant::Uniform:
            return "uniform";
    }
    return "?";
}

namespace {

// What every node can derive about one iteration, plus the induced lists
// N'_i that only node i itself reads.
struct IterationPlan {
    DecompositionStep step;
    DelegateAssignment asg;
    std::vector<bool> alive;
    std::vector<std::vector<NodeId>> nbr;

    bool low(NodeId v) const { return alive[v - 1] && step.degree[v - 1] <= step.threshold; }
};

IterationPlan make_plan(const Graph& g, DecompositionStep step, DelegateAssignment asg) {
    const std::size_t n = g.size();
    IterationPlan it;
    it.alive.assign(n, false);
    for (NodeId v : step.active) it.alive[v - 1] = true;
    it.nbr.assign(n, {});
    for (NodeId v : step.active)
        for (NodeId u : g.neighbors(v))
            if (it.alive[u - 1]) it.nbr[v - 1].push_back(u);
    it.step = std::move(step);
    it.asg = std::move(asg);
    return it;
}

struct PhaseOutcome {
    std::size_t high = 0, exchange = 0, low = 0;
    std::vector<NodeId> reporters;
    std::size_t low_low = 0, delegate = 0, low_in_bound = 0;
};

ObliviousPlan plan_for(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& structure) {
    std::vector<std::size_t> out(n, 0), in(n, 0);
    std::size_t bound = 0;
    for (auto [s, d] : structure) bound = std::max({bound, ++out[s - 1], ++in[d - 1]});
    return ObliviousPlan(n, structure, bound);
}

// Phases 2-4 and the local check for the given iterations at once. A single
// iteration uses two-round deterministic delivery for the high-degree lists;
// merged iterations may exceed n words per node there and use the oblivious
// schedule instead.
PhaseOutcome run_phases(Network& net, const Graph& g, const std::vector<IterationPlan>& its) {
    const std::size_t n = g.size();
    const unsigned idb = net.id_bits();
    const bool merged = its.size() > 1;
    PhaseOutcome res;

    // High-degree nodes send sublists to their delegates and tell each low
    // neighbor which delegate covers it.
    std::vector<Message> batch, extras;
    std::vector<std::pair<std::size_t, NodeId>> sub_owner;  // (iteration, delegate) per message
    for (std::size_t k = 0; k < its.size(); ++k) {
        const IterationPlan& it = its[k];
        const std::size_t t = it.step.threshold;
        for (NodeId i : it.step.active) {
            const auto& dels = it.asg.delegates[i - 1];
            if (dels.empty()) continue;
            const auto& list = it.nbr[i - 1];
            for (std::size_t p = 0; p < list.size(); ++p) {
                NodeId del = dels[p / t];
                batch.push_back({i, del, id_word(list[p], idb)});
                sub_owner.emplace_back(k, del);
                if (it.low(list[p])) extras.push_back({i, list[p], id_word(del, idb)});
            }
        }
    }
    std::size_t mark = net.mark();
    std::vector<Word> got(batch.size());
    Inboxes told_in;
    if (!merged) {
        DmpResult r = deterministic_message_passing(net, batch, extras, idb);
        std::vector<std::size_t> cursor(n, 0);
        for (std::size_t e = 0; e < batch.size(); ++e) got[e] = r.inbox[batch[e].dst - 1][cursor[batch[e].dst - 1]++].payload;
        told_in = std::move(r.extras);
    } else {
        std::vector<std::pair<NodeId, NodeId>> structure;
        std::vector<Word> payloads;
        for (const auto& m : batch) {
            structure.emplace_back(m.src, m.dst);
            payloads.push_back(m.payload);
        }
        got = plan_for(n, structure).deliver(net, payloads, extras, idb, told_in);
    }
    res.high = net.rounds_since(mark);

    std::vector<std::vector<std::vector<NodeId>>> sub(its.size(), std::vector<std::vector<NodeId>>(n));
    for (std::size_t e = 0; e < batch.size(); ++e)
        sub[sub_owner[e].first][sub_owner[e].second - 1].push_back(WordReader(got[e]).get_id(idb));
    std::vector<std::map<NodeId, NodeId>> told(n);  // low node -> (high neighbor -> its delegate)
    for (NodeId j = 1; j <= n; ++j)
        for (const auto& d : told_in[j - 1]) told[j - 1][d.src] = WordReader(d.payload).get_id(idb);

    // Delegates of one principal share their sublists.
    std::vector<std::pair<NodeId, NodeId>> structure;
    std::vector<Word> payloads;
    std::vector<std::pair<std::size_t, NodeId>> ex_owner;
    for (std::size_t k = 0; k < its.size(); ++k) {
        const IterationPlan& it = its[k];
        for (NodeId i : it.step.active) {
            const auto& dels = it.asg.delegates[i - 1];
            for (NodeId d : dels)
                for (NodeId v : sub[k][d - 1])
                    for (NodeId d2 : dels) {
                        if (d2 == d) continue;
                        structure.emplace_back(d, d2);
                        payloads.push_back(id_word(v, idb));
                        ex_owner.emplace_back(k, d2);
                    }
        }
    }
    mark = net.mark();
    std::vector<Word> got3 = plan_for(n, structure).deliver(net, payloads);
    res.exchange = net.rounds_since(mark);
    std::vector<std::vector<std::vector<NodeId>>> full = sub;
    for (std::size_t e = 0; e < got3.size(); ++e)
        full[ex_owner[e].first][ex_owner[e].second - 1].push_back(WordReader(got3[e]).get_id(idb));
    for (auto& per : full)
        for (auto& list : per) std::sort(list.begin(), list.end());

    // Low-degree nodes send their list to low neighbors and to the delegates
    // covering them at high neighbors.
    std::vector<std::vector<Word>> contents(n);
    std::vector<std::vector<NodeId>> destinations(n);
    std::vector<std::size_t> sender_iter(n, 0);
    bool any = false;
    for (std::size_t k = 0; k < its.size(); ++k) {
        const IterationPlan& it = its[k];
        for (NodeId i : it.step.active) {
            if (!it.low(i) || it.nbr[i - 1].empty()) continue;
            any = true;
            sender_iter[i - 1] = k;
            auto& dst = destinations[i - 1];
            for (NodeId j : it.nbr[i - 1]) {
                contents[i - 1].push_back(id_word(j, idb));
                if (it.low(j)) {
                    dst.push_back(j);
                } else {
                    auto f = told[i - 1].find(j);
                    if (f == told[i - 1].end()) throw ContractViolation("low node was not told its delegate");
                    dst.push_back(f->second);
                }
            }
            std::sort(dst.begin(), dst.end());
            dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
        }
    }
    if (any) {
        RoundRobinOptions opt;
        // Receive bound from public data: a low node hears from at most its
        // degree many senders, a delegate from at most its range.
        opt.passes = [&](const std::vector<std::size_t>& k) {
            std::vector<std::size_t> kmax(its.size(), 0);
            for (NodeId i = 1; i <= n; ++i)
                if (k[i - 1]) kmax[sender_iter[i - 1]] = std::max(kmax[sender_iter[i - 1]], k[i - 1]);
            std::size_t worst = 0;
            for (NodeId j = 1; j <= n; ++j) {
                std::size_t load = 0;
                for (std::size_t q = 0; q < its.size(); ++q) {
                    const IterationPlan& it = its[q];
                    if (it.low(j)) load += it.step.degree[j - 1] * kmax[q];
                    const DelegateRole& r = it.asg.role[j - 1];
                    if (r.principal) load += (r.end - r.begin) * kmax[q];
                }
                worst = std::max(worst, load);
            }
            res.low_in_bound = worst;
            return ceil_div(worst, n);
        };
        mark = net.mark();
        RoundRobinResult rr = round_robin_messaging(net, contents, destinations, opt);
        res.low = net.rounds_since(mark);

        for (NodeId j = 1; j <= n; ++j) {
            bool hit = false;
            for (const auto& [i, words] : rr.received[j - 1]) {
                std::vector<NodeId> list = decode_ids(words, idb);
                const std::size_t k = sender_iter[i - 1];
                const IterationPlan& it = its[k];
                if (it.low(j) && std::binary_search(list.begin(), list.end(), j) &&
                    sorted_intersect(list, it.nbr[j - 1])) {
                    ++res.low_low;
                    hit = true;
                }
                const DelegateRole& r = it.asg.role[j - 1];
                if (r.principal) {
                    const auto& whole = full[k][j - 1];
                    if (std::binary_search(whole.begin(), whole.end(), i) && sorted_intersect(list, whole)) {
                        ++res.delegate;
                        hit = true;
                    }
                }
            }
            if (hit) res.reporters.push_back(j);
        }
    }
    return res;
}

ThresholdRule rule_of(ArborVariant v) {
    switch (v) {
        case ArborVariant::Sequential:
        case ArborVariant::Parallel:
            return ThresholdRule::Fixed4A;
        case ArborVariant::BaseChange:
            return ThresholdRule::BaseChange;
        case ArborVariant::Uniform:
            return ThresholdRule::Uniform;
    }
    return ThresholdRule::Fixed4A;
}

void record(ArborDebug& dbg, const IterationPlan& it) {
    dbg.delegates_per_iteration.push_back(it.asg.count);
    for (std::size_t v = 0; v < it.asg.role.size(); ++v)
        if (it.asg.role[v].principal) ++dbg.delegate_roles[v];
}

}  // namespace

ArborResult tri_arbor(const Graph& g, ArborVariant variant, std::size_t a) {
    const std::size_t n = g.size();
    if (n == 0) throw ParameterError("graph needs at least one vertex");
    const ThresholdRule rule = rule_of(variant);
    Network net(n);
    ArborResult res;
    ArborDebug& dbg = res.debug;
    dbg.delegate_roles.assign(n, 0);

    auto absorb = [&](const PhaseOutcome& o) {
        dbg.low_low_hits += o.low_low;
        dbg.delegate_hits += o.delegate;
        dbg.low_in_bound = std::max(dbg.low_in_bound, o.low_in_bound);
    };

    if (variant == ArborVariant::Sequential) {
        std::vector<bool> alive(n, true);
        while (!res.found && std::find(alive.begin(), alive.end(), true) != alive.end()) {
            DecompositionStep step = announce_degrees(net, g, alive);
            step.threshold = threshold_for(rule, n, a, step);
            dbg.trace.steps.push_back(step);
            ++dbg.trace.rounds;
            IterationPlan it = make_plan(g, step, assign_delegates(step.degree, step.threshold));
            it.asg.iteration = dbg.trace.steps.size() - 1;
            eliminate(step, alive);
            record(dbg, it);
            PhaseOutcome o = run_phases(net, g, {it});
            absorb(o);
            res.found = announce_found(net, o.reporters);
            dbg.phase_rounds.push_back({1, o.high, o.exchange, o.low, 1});
        }
    } else {
        dbg.trace = quick_decomposition(net, g, rule, a);
        std::vector<IterationPlan> its;
        std::size_t pool = 0;
        for (const auto& step : dbg.trace.steps) {
            DelegateAssignment asg = assign_delegates(step.degree, step.threshold, pool);
            asg.iteration = its.size();
            pool = asg.next_pool;
            its.push_back(make_plan(g, step, std::move(asg)));
            record(dbg, its.back());
        }
        PhaseOutcome o = run_phases(net, g, its);
        absorb(o);
        res.found = announce_found(net, o.reporters);
        dbg.phase_rounds.push_back({dbg.trace.rounds, o.high, o.exchange, o.low, 1});
    }
    res.ledger = net.ledger();
    return res;
}

ArborResult tri_arbor(const Graph& g, ArborVariant variant) {
    return tri_arbor(g, variant, std::max<std::size_t>(1, degeneracy(g)));
}

}  // namespace cclique
