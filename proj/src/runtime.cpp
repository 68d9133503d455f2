#include "cclique/runtime.hpp"

#include <algorithm>
#include <limits>

#include "cclique/errors.hpp"

namespace cclique {

unsigned ceil_log2(std::uint64_t x) {
    unsigned b = 0;
    while ((std::uint64_t{1} << b) < x) ++b;
    return b;
}

WordPacker& WordPacker::put(std::uint64_t value, unsigned width) {
    if (width_ + width > 64) throw ContractViolation("word packer overflow");
    if (width < 64 && (value >> width) != 0) throw ContractViolation("field value exceeds its width");
    if (width > 0) bits_ |= value << width_;
    width_ += width;
    return *this;
}

std::uint64_t WordReader::get(unsigned width) {
    if (pos_ + width > w_.width) throw ContractViolation("word reader past end of word");
    std::uint64_t mask = width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
    std::uint64_t v = (w_.bits >> pos_) & mask;
    pos_ += width;
    return v;
}

bool operator==(const LinkUse& a, const LinkUse& b) {
    return a.src == b.src && a.dst == b.dst && a.count == b.count;
}

bool operator==(const RoundLedger& a, const RoundLedger& b) {
    auto same_round = [](const RoundStats& x, const RoundStats& y) {
        return x.words == y.words && x.link_words == y.link_words && x.max_link_use == y.max_link_use;
    };
    return a.rounds == b.rounds && a.words == b.words && a.link_words == b.link_words &&
           a.bits_sent == b.bits_sent && a.max_link_use == b.max_link_use && a.per_node_sent == b.per_node_sent &&
           a.per_node_received == b.per_node_received && a.per_node_link_sent == b.per_node_link_sent &&
           a.per_node_link_received == b.per_node_link_received &&
           std::equal(a.per_round.begin(), a.per_round.end(), b.per_round.begin(), b.per_round.end(), same_round) &&
           a.per_round_link_use == b.per_round_link_use;
}

void RoundLedger::append(const RoundLedger& o) {
    if (o.per_node_sent.size() != per_node_sent.size()) throw ContractViolation("ledgers of different sizes");
    rounds += o.rounds;
    words += o.words;
    link_words += o.link_words;
    bits_sent += o.bits_sent;
    max_link_use = std::max(max_link_use, o.max_link_use);
    for (std::size_t i = 0; i < per_node_sent.size(); ++i) {
        per_node_sent[i] += o.per_node_sent[i];
        per_node_received[i] += o.per_node_received[i];
        per_node_link_sent[i] += o.per_node_link_sent[i];
        per_node_link_received[i] += o.per_node_link_received[i];
    }
    per_round.insert(per_round.end(), o.per_round.begin(), o.per_round.end());
    per_round_link_use.insert(per_round_link_use.end(), o.per_round_link_use.begin(), o.per_round_link_use.end());
}

std::mt19937_64 node_rng(std::uint64_t seed, NodeId node, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(node), static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

Network::Network(std::size_t n, bool packed, bool record_links)
    : n_(n),
      id_bits_(id_bits_for(n)),
      word_bits_(word_bits_for(n)),
      packed_(packed),
      record_links_(record_links),
      ledger_(n),
      stamp_(n * n, 0),
      load_(n * n, 0) {
    if (n == 0) throw ParameterError("network needs n >= 1");
    if (n > std::numeric_limits<NodeId>::max()) throw ParameterError("network too large");
}

std::vector<std::vector<Envelope>> Network::exchange(const std::vector<std::vector<Envelope>>& outboxes) {
    if (outboxes.size() != n_) throw ContractViolation("exchange needs one outbox per node");
    const std::size_t round = ++ledger_.rounds;
    const auto stamp = static_cast<std::uint32_t>(round);
    RoundStats stats;
    std::vector<std::vector<Envelope>> inboxes(n_);
    std::vector<LinkUse> used;

    for (std::size_t i = 0; i < n_; ++i) {
        const NodeId me = static_cast<NodeId>(i + 1);
        for (const Envelope& e : outboxes[i]) {
            if (e.src != me) throw ContractViolation("envelope source does not match sending node");
            if (e.dst < 1 || e.dst > n_) throw ContractViolation("envelope destination out of range");
            if (e.payload.width > word_bits_)
                throw ContractViolation("payload of " + std::to_string(e.payload.width) + " bits exceeds word of " +
                                        std::to_string(word_bits_) + " bits");
            std::size_t link = i * n_ + (e.dst - 1);
            if (stamp_[link] != stamp) {
                stamp_[link] = stamp;
                load_[link] = 0;
            }
            if (++load_[link] > 1) throw CapacityViolation(round, me, e.dst, load_[link]);
            if (record_links_) used.push_back({me, e.dst, 1});

            ++stats.words;
            ++ledger_.per_node_sent[i];
            ++ledger_.per_node_received[e.dst - 1];
            if (e.dst != me) {
                ++stats.link_words;
                ++ledger_.per_node_link_sent[i];
                ++ledger_.per_node_link_received[e.dst - 1];
                ledger_.bits_sent += e.payload.width;
            }
            inboxes[e.dst - 1].push_back(e);
        }
    }
    if (stats.link_words > 0) stats.max_link_use = 1;
    ledger_.words += stats.words;
    ledger_.link_words += stats.link_words;
    ledger_.max_link_use = std::max(ledger_.max_link_use, stats.max_link_use);
    ledger_.per_round.push_back(stats);
    if (record_links_) ledger_.per_round_link_use.push_back(std::move(used));
    return inboxes;
}

std::vector<Envelope> broadcast_word(const Network& net, NodeId src, const Word& w) {
    if (w.width > net.word_bits()) throw ContractViolation("broadcast payload exceeds word size");
    std::vector<Envelope> out;
    out.reserve(net.size());
    for (NodeId j = 1; j <= net.size(); ++j) out.push_back({src, j, w});
    return out;
}

RunResult run(std::vector<std::unique_ptr<NodeProgram>>& programs, std::size_t max_rounds, std::uint64_t seed,
              bool packed) {
    const std::size_t n = programs.size();
    if (n == 0) throw ParameterError("run needs at least one program");
    if (max_rounds == 0) throw ParameterError("run needs max_rounds > 0");

    Network net(n, packed);
    RunResult result;
    result.outputs.assign(n, {});
    std::vector<std::mt19937_64> rngs;
    rngs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) rngs.push_back(node_rng(seed, static_cast<NodeId>(i + 1)));

    std::vector<bool> halted(n, false);
    std::vector<std::vector<Envelope>> inboxes(n), outboxes(n);
    for (std::size_t step = 1;; ++step) {
        bool all_halted = true, in_flight = false;
        for (std::size_t i = 0; i < n; ++i) {
            outboxes[i].clear();
            if (!halted[i]) {
                StepResult r = programs[i]->step(step, inboxes[i], rngs[i]);
                if (!r.output.empty()) result.outputs[i] = std::move(r.output);
                outboxes[i] = std::move(r.outbox);
                halted[i] = r.halted;
            }
            all_halted = all_halted && halted[i];
            in_flight = in_flight || !outboxes[i].empty();
        }
        if (all_halted && !in_flight) break;
        if (net.ledger().rounds >= max_rounds)
            throw NonTermination("no global halt within " + std::to_string(max_rounds) + " rounds");
        inboxes = net.exchange(outboxes);
    }
    result.ledger = net.ledger();
    return result;
}

}  // namespace cclique
