#include "cclique/routing.hpp"

#include <algorithm>
#include <numeric>

#include "cclique/errors.hpp"

namespace cclique {

namespace {

using Outboxes = std::vector<std::vector<Envelope>>;

// Appends `low` below `high`: the receiver knows low's width.
Word concat(const Word& low, const Word& high) {
    if (low.width + high.width > 64) throw ContractViolation("concatenated word too wide");
    return {low.bits | (high.bits << low.width), static_cast<std::uint8_t>(low.width + high.width)};
}

Word high_part(const Word& w, unsigned low_width) {
    return {w.bits >> low_width, static_cast<std::uint8_t>(w.width - low_width)};
}

Word low_part(const Word& w, unsigned low_width) {
    std::uint64_t mask = low_width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << low_width) - 1;
    return {w.bits & mask, static_cast<std::uint8_t>(low_width)};
}

void check_endpoints(std::size_t n, const Message& m) {
    if (m.src < 1 || m.src > n || m.dst < 1 || m.dst > n) throw ContractViolation("message endpoint out of range");
}

// Two rounds over relays: message e goes src -> relay(e) -> dst. Every node
// knows src/dst/relay of every message, so relays and destinations decode by
// position in their src-sorted inbox. `pick` lists the message indices.
void relay_two_rounds(Network& net, const std::vector<NodeId>& src, const std::vector<NodeId>& dst,
                      const std::vector<NodeId>& relay, const std::vector<Word>& payload,
                      const std::vector<std::size_t>& pick, const std::vector<Message>& extras, unsigned extra_width,
                      Inboxes& inbox, Inboxes& extra_inbox, std::vector<Word>* by_index = nullptr) {
    const std::size_t n = net.size();
    // Stage 1 plan per receiving relay: (sender, message or npos, extra or npos).
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    struct Slot {
        NodeId from;
        std::size_t msg, extra;
    };
    std::vector<std::vector<Slot>> expect(n);
    for (std::size_t e : pick) expect[relay[e] - 1].push_back({src[e], e, none});
    for (auto& v : expect) std::sort(v.begin(), v.end(), [](const Slot& a, const Slot& b) { return a.from < b.from; });
    for (std::size_t x = 0; x < extras.size(); ++x) {
        auto& v = expect[extras[x].dst - 1];
        auto it = std::lower_bound(v.begin(), v.end(), extras[x].src,
                                   [](const Slot& s, NodeId from) { return s.from < from; });
        if (it != v.end() && it->from == extras[x].src) {
            if (it->extra != none) throw ContractViolation("two extras on one link");
            it->extra = x;
        } else {
            v.insert(it, {extras[x].src, none, x});
        }
    }

    Outboxes out(n);
    for (std::size_t r = 0; r < n; ++r)
        for (const Slot& s : expect[r]) {
            Word w;
            if (s.msg != none && s.extra != none) {
                if (extras[s.extra].payload.width > extra_width) throw ContractViolation("extra wider than declared");
                Word lo = extras[s.extra].payload;
                lo.width = static_cast<std::uint8_t>(extra_width);
                w = concat(lo, payload[s.msg]);
            } else if (s.msg != none) {
                w = payload[s.msg];
            } else {
                w = extras[s.extra].payload;
            }
            out[s.from - 1].push_back({s.from, static_cast<NodeId>(r + 1), w});
        }
    auto in = net.exchange(out);

    // Relays decode; destinations plan stage 2.
    std::vector<Word> held(payload.size());
    for (std::size_t r = 0; r < n; ++r) {
        const auto& box = in[r];
        if (box.size() != expect[r].size()) throw ContractViolation("relay inbox does not match the schedule");
        for (std::size_t q = 0; q < box.size(); ++q) {
            const Slot& s = expect[r][q];
            if (box[q].src != s.from) throw ContractViolation("relay inbox out of order");
            Word w = box[q].payload;
            if (s.msg != none && s.extra != none) {
                extra_inbox[r].push_back({s.from, low_part(w, extra_width)});
                held[s.msg] = high_part(w, extra_width);
            } else if (s.msg != none) {
                held[s.msg] = w;
            } else {
                extra_inbox[r].push_back({s.from, w});
            }
        }
    }
    if (pick.empty()) return;

    Outboxes out2(n);
    std::vector<std::vector<std::pair<NodeId, std::size_t>>> expect2(n);
    for (std::size_t e : pick) {
        out2[relay[e] - 1].push_back({relay[e], dst[e], held[e]});
        expect2[dst[e] - 1].push_back({relay[e], e});
    }
    auto in2 = net.exchange(out2);
    for (std::size_t j = 0; j < n; ++j) {
        auto& ex = expect2[j];
        std::sort(ex.begin(), ex.end());
        if (in2[j].size() != ex.size()) throw ContractViolation("destination inbox does not match the schedule");
        std::vector<std::pair<std::size_t, Delivered>> got;
        for (std::size_t q = 0; q < ex.size(); ++q) {
            if (in2[j][q].src != ex[q].first) throw ContractViolation("destination inbox out of order");
            got.push_back({ex[q].second, {src[ex[q].second], in2[j][q].payload}});
            if (by_index) (*by_index)[ex[q].second] = in2[j][q].payload;
        }
        std::sort(got.begin(), got.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& g : got) inbox[j].push_back(g.second);
    }
}

}  // namespace

BatchLoad batch_load(std::size_t n, const std::vector<Message>& batch) {
    BatchLoad l;
    l.out.assign(n, 0);
    l.in.assign(n, 0);
    for (const auto& m : batch) {
        check_endpoints(n, m);
        l.max_out = std::max(l.max_out, ++l.out[m.src - 1]);
        l.max_in = std::max(l.max_in, ++l.in[m.dst - 1]);
    }
    return l;
}

std::vector<std::uint32_t> color_bipartite(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges,
                                           std::size_t colors) {
    const std::size_t words = (colors + 63) / 64;
    std::vector<std::int32_t> left(n * colors, -1), right(n * colors, -1);
    std::vector<std::uint64_t> lused(n * words, 0), rused(n * words, 0);
    std::vector<std::uint32_t> col(edges.size(), 0);

    auto first_free = [&](const std::vector<std::uint64_t>& used, std::size_t v) -> std::size_t {
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t freebits = ~used[v * words + w];
            if (freebits) {
                std::size_t c = w * 64 + static_cast<std::size_t>(__builtin_ctzll(freebits));
                if (c < colors) return c;
                break;
            }
        }
        throw ContractViolation("degree exceeds the number of colors");
    };
    auto set = [&](std::size_t e, std::size_t c) {
        std::size_t u = edges[e].first - 1, v = edges[e].second - 1;
        col[e] = static_cast<std::uint32_t>(c);
        left[u * colors + c] = static_cast<std::int32_t>(e);
        right[v * colors + c] = static_cast<std::int32_t>(e);
        lused[u * words + c / 64] |= std::uint64_t{1} << (c % 64);
        rused[v * words + c / 64] |= std::uint64_t{1} << (c % 64);
    };
    auto unset = [&](std::size_t e) {
        std::size_t u = edges[e].first - 1, v = edges[e].second - 1, c = col[e];
        left[u * colors + c] = -1;
        right[v * colors + c] = -1;
        lused[u * words + c / 64] &= ~(std::uint64_t{1} << (c % 64));
        rused[v * words + c / 64] &= ~(std::uint64_t{1} << (c % 64));
    };

    std::vector<std::size_t> path;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e].first < 1 || edges[e].first > n || edges[e].second < 1 || edges[e].second > n)
            throw ContractViolation("edge endpoint out of range");
        std::size_t u = edges[e].first - 1, v = edges[e].second - 1;
        std::size_t a = first_free(lused, u), b = first_free(rused, v);
        if (right[v * colors + a] < 0) {
            set(e, a);
            continue;
        }
        // Flip the a/b alternating path that starts at v with its a-edge; it
        // cannot reach u because u has no a-edge.
        path.clear();
        std::size_t at = v, want = a;
        bool on_right = true;
        while (true) {
            std::int32_t f = on_right ? right[at * colors + want] : left[at * colors + want];
            if (f < 0) break;
            path.push_back(static_cast<std::size_t>(f));
            at = on_right ? edges[f].first - 1 : edges[f].second - 1;
            on_right = !on_right;
            want = want == a ? b : a;
        }
        for (std::size_t f : path) unset(f);
        for (std::size_t f : path) {
            // col[f] still holds the old color after unset.
            set(f, col[f] == a ? b : a);
        }
        set(e, a);
    }
    return col;
}

std::vector<Message> pad_to_regular(std::size_t n, const std::vector<Message>& batch, std::vector<bool>& dummy) {
    BatchLoad l = batch_load(n, batch);
    if (l.max_out > n || l.max_in > n) throw ContractViolation("batch exceeds n messages at some node");
    std::vector<Message> out = batch;
    dummy.assign(batch.size(), false);
    std::vector<std::size_t> od(n), id(n);
    for (std::size_t i = 0; i < n; ++i) {
        od[i] = n - l.out[i];
        id[i] = n - l.in[i];
        std::size_t self = std::min(od[i], id[i]);
        for (std::size_t s = 0; s < self; ++s) out.push_back({NodeId(i + 1), NodeId(i + 1), {}});
        od[i] -= self;
        id[i] -= self;
    }
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i)
        while (od[i] > 0) {
            while (id[j] == 0) ++j;
            std::size_t take = std::min(od[i], id[j]);
            for (std::size_t s = 0; s < take; ++s) out.push_back({NodeId(i + 1), NodeId(j + 1), {}});
            od[i] -= take;
            id[j] -= take;
        }
    dummy.resize(out.size(), true);
    return out;
}

std::vector<std::uint32_t> good_labeling(std::size_t n, const std::vector<Message>& padded) {
    BatchLoad l = batch_load(n, padded);
    for (std::size_t i = 0; i < n; ++i)
        if (l.out[i] != n || l.in[i] != n)
            throw ContractViolation("labeling needs an n-regular batch; node " + std::to_string(i + 1) + " has out " +
                                    std::to_string(l.out[i]) + ", in " + std::to_string(l.in[i]));
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(padded.size());
    for (const auto& m : padded) edges.emplace_back(m.src, m.dst);
    auto col = color_bipartite(n, edges, n);
    for (auto& c : col) ++c;
    return col;
}

DmpResult deterministic_message_passing(Network& net, const std::vector<Message>& batch,
                                        const std::vector<Message>& extras, unsigned extra_width) {
    const std::size_t n = net.size();
    BatchLoad l = batch_load(n, batch);
    if (l.max_out > n || l.max_in > n) throw ContractViolation("batch exceeds n messages at some node");
    for (const auto& x : extras) check_endpoints(n, x);

    DmpResult res;
    res.inbox.assign(n, {});
    res.extras.assign(n, {});
    if (batch.empty() && extras.empty()) return res;

    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<NodeId> src, dst, relay;
    std::vector<Word> payload;
    for (const auto& m : batch) {
        edges.emplace_back(m.src, m.dst);
        src.push_back(m.src);
        dst.push_back(m.dst);
        payload.push_back(m.payload);
    }
    auto col = color_bipartite(n, edges, n);
    for (auto c : col) relay.push_back(static_cast<NodeId>(c + 1));
    std::vector<std::size_t> pick(batch.size());
    std::iota(pick.begin(), pick.end(), 0);
    relay_two_rounds(net, src, dst, relay, payload, pick, extras, extra_width, res.inbox, res.extras);
    return res;
}

ObliviousPlan::ObliviousPlan(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& structure,
                             std::size_t bound)
    : n_(n) {
    std::vector<std::size_t> out(n, 0), in(n, 0);
    for (auto [s, d] : structure) {
        if (s < 1 || s > n || d < 1 || d > n) throw ContractViolation("message endpoint out of range");
        if (++out[s - 1] > bound || ++in[d - 1] > bound)
            throw ContractViolation("batch exceeds the per-node bound " + std::to_string(bound));
        src_.push_back(s);
        dst_.push_back(d);
    }
    stripes_ = (bound + n - 1) / n;
    color_ = structure.empty() ? std::vector<std::uint32_t>{} : color_bipartite(n, structure, stripes_ * n);
}

Inboxes ObliviousPlan::execute(Network& net, const std::vector<Word>& payloads) const {
    return run(net, payloads, nullptr, {}, 0, nullptr);
}

std::vector<Word> ObliviousPlan::deliver(Network& net, const std::vector<Word>& payloads) const {
    std::vector<Word> got(payloads.size());
    run(net, payloads, &got, {}, 0, nullptr);
    return got;
}

std::vector<Word> ObliviousPlan::deliver(Network& net, const std::vector<Word>& payloads,
                                         const std::vector<Message>& extras, unsigned extra_width,
                                         Inboxes& extra_inbox) const {
    std::vector<Word> got(payloads.size());
    extra_inbox.assign(n_, {});
    run(net, payloads, &got, extras, extra_width, &extra_inbox);
    return got;
}

Inboxes ObliviousPlan::run(Network& net, const std::vector<Word>& payloads, std::vector<Word>* by_index,
                           const std::vector<Message>& extras, unsigned extra_width, Inboxes* extra_inbox) const {
    if (net.size() != n_) throw ContractViolation("plan built for a different clique size");
    if (payloads.size() != src_.size()) throw ContractViolation("payload count does not match the plan");
    for (const auto& m : extras) check_endpoints(n_, m);
    Inboxes inbox(n_), unused(n_);
    Inboxes& xin = extra_inbox ? *extra_inbox : unused;
    std::vector<std::vector<std::size_t>> by_stripe(stripes_);
    for (std::size_t e = 0; e < color_.size(); ++e) by_stripe[color_[e] / n_].push_back(e);
    std::vector<NodeId> relay(color_.size());
    for (std::size_t e = 0; e < color_.size(); ++e) relay[e] = static_cast<NodeId>(color_[e] % n_ + 1);
    bool extras_sent = extras.empty();
    for (const auto& pick : by_stripe) {
        if (pick.empty()) continue;
        relay_two_rounds(net, src_, dst_, relay, payloads, pick, extras_sent ? std::vector<Message>{} : extras,
                         extra_width, inbox, xin, by_index);
        extras_sent = true;
    }
    // Extras alone still need their round.
    if (!extras_sent) relay_two_rounds(net, src_, dst_, relay, payloads, {}, extras, extra_width, inbox, xin, by_index);
    return inbox;
}

Inboxes oblivious_schedule(Network& net, const std::vector<Message>& batch, std::size_t bound) {
    std::vector<std::pair<NodeId, NodeId>> structure;
    std::vector<Word> payloads;
    for (const auto& m : batch) {
        structure.emplace_back(m.src, m.dst);
        payloads.push_back(m.payload);
    }
    return ObliviousPlan(net.size(), structure, bound).execute(net, payloads);
}

// ---------------------------------------------------------------------------
// Round-robin messaging

std::size_t passes_for_total(std::size_t n, const std::vector<std::size_t>& k) {
    std::size_t total = std::accumulate(k.begin(), k.end(), std::size_t{0});
    return (total + n - 1) / n;
}

unsigned round_robin_content_bits(const Network& net, bool announce) {
    return announce ? net.word_bits() - 1 : net.word_bits() - net.id_bits() - 1;
}

RoundRobinResult round_robin_messaging(Network& net, const std::vector<std::vector<Word>>& contents,
                                       const std::vector<std::vector<NodeId>>& destinations,
                                       const RoundRobinOptions& options) {
    const std::size_t n = net.size();
    const unsigned idb = net.id_bits();
    if (contents.size() != n || destinations.size() != n) throw ContractViolation("need one content per node");
    if (!options.passes) throw ContractViolation("round-robin needs a pass bound");
    const unsigned content_bits = round_robin_content_bits(net, options.announce);
    for (std::size_t i = 0; i < n; ++i) {
        if (!options.announce && contents[i].size() > n)
            throw ContractViolation("content of node " + std::to_string(i + 1) + " exceeds n words");
        for (const Word& w : contents[i])
            if (w.width > content_bits) throw ContractViolation("content word too wide for round-robin");
        const auto& d = destinations[i];
        for (std::size_t q = 0; q < d.size(); ++q)
            if (d[q] < 1 || d[q] > n || (q > 0 && d[q] <= d[q - 1]))
                throw ContractViolation("destinations must be sorted, distinct and in range");
    }

    RoundRobinResult res;
    res.received.assign(n, {});
    std::vector<std::size_t>& k = res.counts;
    k.assign(n, 0);

    if (options.announce) {
        Outboxes out(n);
        for (NodeId i = 1; i <= n; ++i) {
            std::size_t c = contents[i - 1].size();
            if (c == 0) continue;
            if (net.word_bits() < 64 && (c >> net.word_bits()) != 0) throw ContractViolation("count too large");
            out[i - 1] = broadcast_word(net, i, {c, static_cast<std::uint8_t>(net.word_bits())});
        }
        auto in = net.exchange(out);
        for (const auto& e : in[0]) k[e.src - 1] = e.payload.bits;
    }

    // First distribution round: word (h - 1) mod k to holder h, with the
    // notify bit and (without announce) the count.
    std::vector<std::vector<std::vector<Envelope>>> held;  // held[p][h - 1], sorted by source
    std::vector<std::vector<NodeId>> sources(n);
    {
        Outboxes out(n);
        for (NodeId i = 1; i <= n; ++i) {
            const auto& c = contents[i - 1];
            if (c.empty()) continue;
            const auto& d = destinations[i - 1];
            for (NodeId h = 1; h <= n; ++h) {
                bool notify = std::binary_search(d.begin(), d.end(), h);
                WordPacker p;
                p.put(notify ? 1 : 0, 1);
                if (!options.announce) p.put(c.size() - 1, idb);
                out[i - 1].push_back({i, h, concat(p.word(), c[(h - 1) % c.size()])});
            }
        }
        auto in = net.exchange(out);
        held.emplace_back(n);
        const unsigned header = options.announce ? 1 : 1 + idb;
        for (std::size_t h = 0; h < n; ++h)
            for (const auto& e : in[h]) {
                WordReader r(e.payload);
                bool notify = r.get(1) == 1;
                if (!options.announce) {
                    std::size_t c = r.get(idb) + 1;
                    // Every node hears every count; node 1's view is the shared one.
                    if (h == 0) k[e.src - 1] = c;
                }
                if (notify) sources[h].push_back(e.src);
                held[0][h].push_back({e.src, e.dst, high_part(e.payload, header)});
            }
    }

    const std::size_t c = options.passes(k);
    res.passes = c;

    // Each destination lays its sources' blocks out on positions 0, 1, ...;
    // position t is served by holder (t mod n) + 1 in request round t / n.
    std::vector<std::size_t> load(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        for (NodeId i : sources[j]) load[j] += k[i - 1];
        if (load[j] > c * n)
            throw ContractViolation("round-robin pass bound too small for node " + std::to_string(j + 1));
    }
    auto period = [&](std::size_t ki) { return ki / std::gcd(ki, n); };

    // Remaining distribution rounds: holder h gets word (h - 1 + n p) mod k.
    for (std::size_t p = 1; p < c; ++p) {
        Outboxes out(n);
        for (NodeId i = 1; i <= n; ++i) {
            const auto& ci = contents[i - 1];
            if (ci.empty() || p >= period(ci.size())) continue;
            for (NodeId h = 1; h <= n; ++h) out[i - 1].push_back({i, h, ci[(h - 1 + n * p) % ci.size()]});
        }
        held.push_back(net.exchange(out));
    }

    auto held_word = [&](std::size_t h, NodeId src, std::size_t round) -> Word {
        std::size_t p = round % period(k[src - 1]);
        const auto& box = held[p][h];
        auto it = std::lower_bound(box.begin(), box.end(), src,
                                   [](const Envelope& e, NodeId s) { return e.src < s; });
        if (it == box.end() || it->src != src) throw ContractViolation("holder lacks a requested word");
        return it->payload;
    };

    // Block starts per destination.
    std::vector<std::vector<std::size_t>> start(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t t = 0;
        for (NodeId i : sources[j]) {
            start[j].push_back(t);
            t += k[i - 1];
        }
        res.received[j].reserve(sources[j].size());
        for (NodeId i : sources[j]) res.received[j].push_back({i, std::vector<Word>(k[i - 1])});
    }

    for (std::size_t r = 0; r < c; ++r) {
        Outboxes req(n);
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t lo = r * n, hi = std::min((r + 1) * n, load[j]);
            std::size_t b = 0;
            for (std::size_t t = lo; t < hi; ++t) {
                while (b + 1 < start[j].size() && start[j][b + 1] <= t) ++b;
                NodeId h = static_cast<NodeId>(t % n + 1);
                req[j].push_back({NodeId(j + 1), h, WordPacker().put_id(sources[j][b], idb).word()});
            }
        }
        auto in = net.exchange(req);
        Outboxes resp(n);
        for (std::size_t h = 0; h < n; ++h)
            for (const auto& e : in[h]) {
                NodeId src = WordReader(e.payload).get_id(idb);
                resp[h].push_back({NodeId(h + 1), e.src, held_word(h, src, r)});
            }
        auto back = net.exchange(resp);
        for (std::size_t j = 0; j < n; ++j) {
            // Responses arrive sorted by holder; recover each position t.
            std::size_t lo = r * n;
            std::size_t b = 0;
            for (const auto& e : back[j]) {
                std::size_t t = lo + (e.src - 1);
                while (b + 1 < start[j].size() && start[j][b + 1] <= t) ++b;
                while (b > 0 && start[j][b] > t) --b;
                auto& slot = res.received[j][b];
                slot.second[t % k[slot.first - 1]] = e.payload;
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Randomized delivery

// Word layout, low to high: a 2-bit kind, then
//   kind 0 (final):    source id, payload
//   kind 1 (to relay): destination id, payload
//   kind 2 (hand-off): 2-bit shift s, source id, payload; the destination is
//                      implied by the link: receiver = sender + dst + s + 1 (mod n).
unsigned relay_payload_bits(const Network& net) { return net.id_bits(); }

Inboxes randomized_delivery(Network& net, const std::vector<Message>& batch, std::uint64_t seed) {
    const std::size_t n = net.size();
    const unsigned idb = net.id_bits();
    const unsigned max_payload = relay_payload_bits(net);
    BatchLoad l = batch_load(n, batch);
    for (const auto& m : batch)
        if (m.payload.width > max_payload) throw ContractViolation("payload too wide for relayed delivery");

    Inboxes inbox(n);
    if (batch.empty()) return inbox;

    struct Range {
        NodeId dst;
        std::size_t begin, end;
    };
    struct Held {
        NodeId dst, src;
        Word payload;
        bool handed;  // arrived by a hand-off; served first
    };
    std::vector<std::vector<std::pair<NodeId, Word>>> own(n);
    for (const auto& m : batch) own[m.src - 1].push_back({m.dst, m.payload});
    std::vector<std::vector<Range>> ranges(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& o = own[i];
        std::stable_sort(o.begin(), o.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t q = 0; q < o.size();) {
            std::size_t e = q;
            while (e < o.size() && o[e].first == o[q].first) ++e;
            ranges[i].push_back({o[q].first, q, e});
            q = e;
        }
    }
    std::vector<std::vector<Held>> held(n);
    std::vector<std::mt19937_64> rng;
    for (std::size_t i = 0; i < n; ++i) rng.push_back(node_rng(seed, NodeId(i + 1), 0x7e1a7));

    auto header = [&](unsigned kind) { return WordPacker().put(kind, 2); };
    std::size_t pending = batch.size();
    const std::size_t limit = 64 + 16 * ((std::max(l.max_out, l.max_in) + n - 1) / n);
    std::vector<std::uint32_t> mark(n, 0);
    std::uint32_t stamp = 0;
    std::vector<NodeId> idle;

    for (std::size_t round = 0; pending > 0; ++round) {
        if (round >= limit) throw NonTermination("randomized delivery did not finish");
        Outboxes out(n);
        for (std::size_t v = 0; v < n; ++v) {
            const NodeId me = NodeId(v + 1);
            ++stamp;
            auto send = [&](NodeId to, const Word& w) {
                mark[to - 1] = stamp;
                out[v].push_back({me, to, w});
            };

            // Held messages: the oldest hand-off first, one per destination.
            auto& h = held[v];
            std::stable_sort(h.begin(), h.end(), [](const Held& a, const Held& b) {
                return a.dst != b.dst ? a.dst < b.dst : a.handed > b.handed;
            });
            std::vector<Held> extra, keep;
            for (std::size_t q = 0; q < h.size(); ++q) {
                if (q > 0 && h[q].dst == h[q - 1].dst) {
                    extra.push_back(h[q]);
                    continue;
                }
                send(h[q].dst, concat(header(0).put_id(h[q].src, idb).word(), h[q].payload));
            }

            auto& rg = ranges[v];
            for (auto& r : rg) {
                if (r.begin == r.end || mark[r.dst - 1] == stamp) continue;
                send(r.dst, concat(header(0).put_id(me, idb).word(), own[v][r.begin++].second));
            }

            // Surplus held messages move on to a neighbor whose offset encodes
            // the destination.
            for (const Held& x : extra) {
                bool moved = false;
                for (unsigned s = 0; s < 4 && !moved; ++s) {
                    NodeId to = static_cast<NodeId>((v + (x.dst - 1) + s + 1) % n + 1);
                    if (to == me || to == x.dst || mark[to - 1] == stamp) continue;
                    send(to, concat(header(2).put(s, 2).put_id(x.src, idb).word(), x.payload));
                    moved = true;
                }
                if (!moved) keep.push_back(x);
            }
            h.swap(keep);

            idle.clear();
            for (NodeId j = 1; j <= n; ++j)
                if (j != me && mark[j - 1] != stamp) idle.push_back(j);
            bool progress = true;
            while (!idle.empty() && progress) {
                progress = false;
                for (auto& r : rg) {
                    if (r.begin == r.end || idle.empty()) continue;
                    std::size_t pick = std::uniform_int_distribution<std::size_t>(0, idle.size() - 1)(rng[v]);
                    NodeId via = idle[pick];
                    idle[pick] = idle.back();
                    idle.pop_back();
                    send(via, concat(header(1).put_id(r.dst, idb).word(), own[v][--r.end].second));
                    progress = true;
                }
            }
            rg.erase(std::remove_if(rg.begin(), rg.end(), [](const Range& r) { return r.begin == r.end; }),
                     rg.end());
        }

        auto in = net.exchange(out);
        for (std::size_t v = 0; v < n; ++v)
            for (const auto& e : in[v]) {
                WordReader r(e.payload);
                unsigned kind = static_cast<unsigned>(r.get(2));
                if (kind == 0) {
                    NodeId src = r.get_id(idb);
                    inbox[v].push_back({src, high_part(e.payload, 2 + idb)});
                    --pending;
                } else if (kind == 1) {
                    NodeId dst = r.get_id(idb);
                    held[v].push_back({dst, e.src, high_part(e.payload, 2 + idb), false});
                } else {
                    std::size_t s = r.get(2);
                    NodeId src = r.get_id(idb);
                    NodeId dst = static_cast<NodeId>((v + 4 * n - (e.src - 1) - s - 1) % n + 1);
                    held[v].push_back({dst, src, high_part(e.payload, 4 + idb), true});
                }
            }
    }
    for (auto& box : inbox)
        std::sort(box.begin(), box.end(), [](const Delivered& a, const Delivered& b) {
            return a.src != b.src ? a.src < b.src : a.payload.bits < b.payload.bits;
        });
    return inbox;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<Edge>> learn_full_graph(Network& net, const Graph& g) {
    const std::size_t n = net.size();
    if (g.size() != n) throw ContractViolation("graph size does not match the clique");
    const unsigned idb = net.id_bits();
    std::vector<std::vector<Word>> contents(n);
    std::vector<std::vector<NodeId>> dests(n);
    std::vector<NodeId> everyone(n);
    std::iota(everyone.begin(), everyone.end(), NodeId{1});
    for (NodeId v = 1; v <= n; ++v) {
        for (NodeId u : g.neighbors(v)) contents[v - 1].push_back(WordPacker().put_id(u, idb).word());
        if (!contents[v - 1].empty()) dests[v - 1] = everyone;
    }
    RoundRobinOptions opt;
    opt.passes = [n](const std::vector<std::size_t>& k) { return passes_for_total(n, k); };
    auto rr = round_robin_messaging(net, contents, dests, opt);

    std::vector<std::vector<Edge>> known(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (const auto& [src, words] : rr.received[j])
            for (const Word& w : words) {
                NodeId u = WordReader(w).get_id(idb);
                if (src < u) known[j].emplace_back(src, u);
            }
        std::sort(known[j].begin(), known[j].end());
    }
    return known;
}

}  // namespace cclique
