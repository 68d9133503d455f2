#include "cclique/detect_general.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <tuple>

#include "cclique/errors.hpp"
#include "cclique/routing.hpp"

namespace cclique {

namespace {

// One neighbor sublist N_l ∩ S_b wanted by a slot.
struct Request {
    std::uint32_t slot;
    NodeId l;
    std::uint32_t b;
    std::uint32_t words;
    std::size_t first;  // index of the first word in the plan, or npos when local
};

constexpr std::size_t local_request = static_cast<std::size_t>(-1);

// Everything that depends only on (n, d, packed).
struct Layout {
    PartitionScheme scheme;
    std::vector<Request> requests;
    std::vector<std::size_t> slot_begin;  // requests of slot r: [slot_begin[r], slot_begin[r + 1])
    std::vector<NodeId> real_end;         // last real vertex of each subset (0 if none)
    std::unique_ptr<ObliviousPlan> plan;
    std::vector<std::uint64_t> originated;
};

std::shared_ptr<const Layout> make_layout(std::size_t n, std::size_t d, bool packed) {
    auto lay = std::make_shared<Layout>();
    lay->scheme = build_partition(n, d);
    const PartitionScheme& s = lay->scheme;
    const unsigned wb = word_bits_for(n);

    std::vector<std::uint32_t> real(s.parts);
    lay->real_end.resize(s.parts);
    for (std::size_t b = 0; b < s.parts; ++b) {
        NodeId lo = s.subsets[b].front(), hi = s.subsets[b].back();
        real[b] = lo > n ? 0 : static_cast<std::uint32_t>(std::min<std::size_t>(hi, n) - lo + 1);
        lay->real_end[b] = real[b] ? lo + real[b] - 1 : 0;
    }

    std::vector<std::pair<NodeId, NodeId>> structure;
    for (std::size_t r = 0; r < s.n_effective; ++r) {
        lay->slot_begin.push_back(lay->requests.size());
        const auto& t = s.assignment[r];
        std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = j + 1; k < d; ++k) pairs.emplace_back(t[j], t[k]);
        // Position j supplies toward position k; this keeps every vertex's
        // load equal. Only exact repeats are dropped.
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

        NodeId dst = s.host(r);
        for (auto [a, b] : pairs) {
            if (real[b] == 0) continue;
            std::uint32_t words = packed ? (real[b] + wb - 1) / wb : real[b];
            for (NodeId l : s.subsets[a]) {
                if (l > n) break;
                std::size_t first = local_request;
                if (l != dst) {
                    first = structure.size();
                    for (std::uint32_t w = 0; w < words; ++w) structure.emplace_back(l, dst);
                }
                lay->requests.push_back({static_cast<std::uint32_t>(r), l, b, words, first});
            }
        }
    }
    lay->slot_begin.push_back(lay->requests.size());

    BatchLoad load;
    load.out.assign(n, 0);
    load.in.assign(n, 0);
    std::size_t bound = 0;
    for (auto [src, dst] : structure) {
        bound = std::max(bound, ++load.out[src - 1]);
        bound = std::max(bound, ++load.in[dst - 1]);
    }
    lay->plan = std::make_unique<ObliviousPlan>(n, structure, bound);
    lay->originated.assign(load.out.begin(), load.out.end());
    return lay;
}

std::shared_ptr<const Layout> cached_layout(std::size_t n, std::size_t d, bool packed) {
    static std::mutex mu;
    static std::map<std::tuple<std::size_t, std::size_t, bool>, std::shared_ptr<const Layout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(n, d, packed);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto lay = make_layout(n, d, packed);
    cache.emplace(key, lay);
    return lay;
}

// The words vertex l sends for N_l ∩ S_b.
void encode_sublist(const Graph& g, const Layout& lay, const Request& q, unsigned id_bits, unsigned wb, bool packed,
                    std::vector<Word>& out) {
    NodeId lo = lay.scheme.subsets[q.b].front(), hi = lay.real_end[q.b];
    const auto& nb = g.neighbors(q.l);
    auto from = std::lower_bound(nb.begin(), nb.end(), lo);
    auto to = std::upper_bound(from, nb.end(), hi);
    if (packed) {
        std::size_t count = hi - lo + 1;
        std::vector<Word> words(q.words);
        for (std::uint32_t w = 0; w < q.words; ++w)
            words[w].width = static_cast<std::uint8_t>(std::min<std::size_t>(wb, count - w * wb));
        for (auto it = from; it != to; ++it) {
            std::size_t off = *it - lo;
            words[off / wb].bits |= std::uint64_t{1} << (off % wb);
        }
        out.insert(out.end(), words.begin(), words.end());
    } else {
        std::uint32_t w = 0;
        for (auto it = from; it != to; ++it, ++w) out.push_back(WordPacker().put(1, 1).put_id(*it, id_bits).word());
        for (; w < q.words; ++w) out.push_back(WordPacker().put(0, 1).put(0, id_bits).word());
    }
}

void decode_sublist(const Layout& lay, const Request& q, const Word* words, unsigned id_bits, bool packed,
                    std::vector<Edge>& edges) {
    NodeId lo = lay.scheme.subsets[q.b].front();
    for (std::uint32_t w = 0; w < q.words; ++w) {
        if (packed) {
            unsigned wb = word_bits_for(lay.scheme.n);
            for (unsigned bit = 0; bit < words[w].width; ++bit)
                if ((words[w].bits >> bit) & 1) edges.emplace_back(q.l, static_cast<NodeId>(lo + w * wb + bit));
        } else {
            WordReader r(words[w]);
            if (r.get(1) == 0) break;
            edges.emplace_back(q.l, r.get_id(id_bits));
        }
    }
}

}  // namespace

PartitionScheme build_partition(std::size_t n, std::size_t d) {
    if (n < 1) throw ParameterError("partition needs n >= 1");
    if (d < 2) throw ParameterError("partition needs d >= 2");
    auto power = [d](std::size_t b) {
        std::size_t p = 1;
        for (std::size_t i = 0; i < d; ++i) p *= b;
        return p;
    };
    PartitionScheme s;
    s.n = n;
    s.d = d;
    s.parts = 1;
    while (power(s.parts) < n) ++s.parts;
    s.n_effective = power(s.parts);
    s.part_size = s.n_effective / s.parts;
    for (std::size_t i = 0; i < s.parts; ++i) {
        std::vector<NodeId> sub(s.part_size);
        std::iota(sub.begin(), sub.end(), static_cast<NodeId>(i * s.part_size + 1));
        s.subsets.push_back(std::move(sub));
    }
    for (std::size_t r = 0; r < s.n_effective; ++r) {
        std::vector<std::uint32_t> t(d);
        std::size_t x = r;
        for (std::size_t j = d; j-- > 0;) {
            t[j] = static_cast<std::uint32_t>(x % s.parts);
            x /= s.parts;
        }
        s.assignment.push_back(std::move(t));
    }
    return s;
}

bool match_pattern(std::size_t size, const std::vector<std::uint64_t>& rows, const SubgraphPattern& pattern) {
    const std::size_t d = pattern.d, words = (size + 63) / 64;
    if (d == 0) return true;
    if (d > size) return false;

    std::vector<std::vector<std::size_t>> padj(d);
    for (auto [a, b] : pattern.edges) {
        padj[a - 1].push_back(b - 1);
        padj[b - 1].push_back(a - 1);
    }
    // Match order: each next pattern vertex has the most already placed neighbors.
    std::vector<std::size_t> order;
    std::vector<bool> placed(d, false);
    for (std::size_t step = 0; step < d; ++step) {
        std::size_t best = d;
        std::pair<std::size_t, std::size_t> key{0, 0};
        for (std::size_t p = 0; p < d; ++p) {
            if (placed[p]) continue;
            std::size_t back = 0;
            for (std::size_t q : padj[p]) back += placed[q];
            std::pair<std::size_t, std::size_t> k{back, padj[p].size()};
            if (best == d || k > key) best = p, key = k;
        }
        placed[best] = true;
        order.push_back(best);
    }

    std::vector<std::size_t> image(d);
    std::vector<std::uint64_t> used(words, 0), cand(words);
    auto extend = [&](auto&& self, std::size_t step) -> bool {
        if (step == d) return true;
        std::size_t p = order[step];
        std::fill(cand.begin(), cand.end(), ~std::uint64_t{0});
        if (size % 64) cand[words - 1] = (std::uint64_t{1} << (size % 64)) - 1;
        for (std::size_t i = 0; i < step; ++i) {
            std::size_t q = order[i];
            if (std::find(padj[p].begin(), padj[p].end(), q) == padj[p].end()) continue;
            const std::uint64_t* row = &rows[image[q] * words];
            for (std::size_t w = 0; w < words; ++w) cand[w] &= row[w];
        }
        std::vector<std::uint64_t> mine(words);
        for (std::size_t w = 0; w < words; ++w) mine[w] = cand[w] & ~used[w];
        for (std::size_t w = 0; w < words; ++w)
            for (std::uint64_t bits = mine[w]; bits; bits &= bits - 1) {
                std::size_t v = w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits));
                image[p] = v;
                used[w] |= std::uint64_t{1} << (v % 64);
                bool ok = self(self, step + 1);
                used[w] &= ~(std::uint64_t{1} << (v % 64));
                if (ok) return true;
            }
        return false;
    };
    return extend(extend, 0);
}

DetectionResult d_clique0(const Graph& g, const SubgraphPattern& pattern, bool packed) {
    if (pattern.d < 2) throw ParameterError("pattern needs at least 2 vertices");
    if (g.size() < 1) throw ParameterError("graph needs at least one vertex");
    const std::size_t n = g.size();
    auto lay = cached_layout(n, pattern.d, packed);
    const PartitionScheme& s = lay->scheme;
    Network net(n, packed);
    const unsigned id_bits = net.id_bits(), wb = net.word_bits();

    std::vector<Word> payloads;
    payloads.reserve(lay->plan->messages());
    for (const Request& q : lay->requests)
        if (q.first != local_request) encode_sublist(g, *lay, q, id_bits, wb, packed, payloads);
    std::vector<Word> got = lay->plan->deliver(net, payloads);

    std::vector<bool> hit(n, false);
    for (std::size_t r = 0; r < s.n_effective; ++r) {
        NodeId me = s.host(r);
        if (hit[me - 1]) continue;
        // Real vertices of the slot's subsets, in local index order.
        std::vector<std::uint32_t> parts(s.assignment[r]);
        std::sort(parts.begin(), parts.end());
        parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
        std::vector<NodeId> verts;
        for (auto b : parts)
            for (NodeId v = s.subsets[b].front(); v <= lay->real_end[b] && lay->real_end[b]; ++v) verts.push_back(v);
        auto index = [&](NodeId v) {
            return static_cast<std::size_t>(std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
        };

        std::vector<Edge> edges;
        std::vector<Word> scratch;
        for (std::size_t i = lay->slot_begin[r]; i < lay->slot_begin[r + 1]; ++i) {
            const Request& q = lay->requests[i];
            const Word* words;
            if (q.first == local_request) {
                scratch.clear();
                encode_sublist(g, *lay, q, id_bits, wb, packed, scratch);
                words = scratch.data();
            } else {
                words = &got[q.first];
            }
            decode_sublist(*lay, q, words, id_bits, packed, edges);
        }

        const std::size_t size = verts.size(), words = (size + 63) / 64;
        std::vector<std::uint64_t> rows(size * words, 0);
        for (auto [u, v] : edges) {
            std::size_t a = index(u), b = index(v);
            rows[a * words + b / 64] |= std::uint64_t{1} << (b % 64);
            rows[b * words + a / 64] |= std::uint64_t{1} << (a % 64);
        }
        if (match_pattern(size, rows, pattern)) hit[me - 1] = true;
    }

    DetectionResult res;
    res.n_effective = s.n_effective;
    res.originated = lay->originated;
    for (NodeId i = 1; i <= n; ++i)
        if (hit[i - 1]) res.reporters.push_back(i);
    res.found = announce_found(net, res.reporters);
    res.ledger = net.ledger();
    return res;
}

DetectionResult tri_partition(const Graph& g, bool packed) { return d_clique0(g, SubgraphPattern::triangle(), packed); }

}  // namespace cclique
