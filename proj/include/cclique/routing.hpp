#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "cclique/runtime.hpp"

namespace cclique {

struct Message {
    NodeId src = 0;
    NodeId dst = 0;
    Word payload;
};

struct Delivered {
    NodeId src = 0;
    Word payload;

    friend bool operator==(const Delivered&, const Delivered&) = default;
};

// inbox[j - 1] holds what node j received.
using Inboxes = std::vector<std::vector<Delivered>>;

// Per-node out and in message counts of a batch.
struct BatchLoad {
    std::vector<std::size_t> out, in;
    std::size_t max_out = 0, max_in = 0;
};
BatchLoad batch_load(std::size_t n, const std::vector<Message>& batch);

// Proper edge coloring of the bipartite multigraph (sources on the left,
// destinations on the right) with colors 0..colors-1. Needs every left and
// right degree <= colors. Deterministic: edges are colored in input order and
// conflicts are resolved by alternating-path flips.
std::vector<std::uint32_t> color_bipartite(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges,
                                           std::size_t colors);

// Pads a batch with self-addressed dummies until every node is the source of
// exactly n and the destination of exactly n messages. dummy[e] marks padding.
std::vector<Message> pad_to_regular(std::size_t n, const std::vector<Message>& batch, std::vector<bool>& dummy);

// Labels 1..n for an n-regular batch: each label class is a perfect matching,
// so a destination never sees a label twice and a source never holds two
// messages with one label. Throws ContractViolation if the batch is not regular.
std::vector<std::uint32_t> good_labeling(std::size_t n, const std::vector<Message>& padded);

// Two-round delivery for a globally known batch with in/out <= n: message with
// label k goes to relay k, which forwards it. Extras are single words that ride
// along in the first round; an extra on a link that also carries a first-stage
// message is appended in the low `extra_width` bits of that word. A batch with
// no messages and no extras costs no rounds.
struct DmpResult {
    Inboxes inbox;
    Inboxes extras;
};
DmpResult deterministic_message_passing(Network& net, const std::vector<Message>& batch,
                                        const std::vector<Message>& extras = {}, unsigned extra_width = 0);

// A labeling of a globally known batch structure into stripes of n labels,
// reusable for any payloads over the same structure.
class ObliviousPlan {
public:
    ObliviousPlan(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& structure, std::size_t bound);

    std::size_t size() const { return n_; }
    std::size_t stripes() const { return stripes_; }
    std::size_t messages() const { return src_.size(); }
    // Runs the plan; payloads[e] belongs to structure[e].
    Inboxes execute(Network& net, const std::vector<Word>& payloads) const;
    // Same delivery; result[e] is the word structure[e]'s destination received.
    std::vector<Word> deliver(Network& net, const std::vector<Word>& payloads) const;
    // As deliver(), with single-word extras riding along in the first round as
    // in deterministic_message_passing; received extras go to `extra_inbox`.
    std::vector<Word> deliver(Network& net, const std::vector<Word>& payloads, const std::vector<Message>& extras,
                              unsigned extra_width, Inboxes& extra_inbox) const;

private:
    Inboxes run(Network& net, const std::vector<Word>& payloads, std::vector<Word>* by_index,
                const std::vector<Message>& extras, unsigned extra_width, Inboxes* extra_inbox) const;

    std::size_t n_, stripes_;
    std::vector<NodeId> src_, dst_;
    std::vector<std::uint32_t> color_;
};

// Delivery in at most 2 * ceil(bound / n) rounds when every node sends and
// receives at most `bound` messages.
Inboxes oblivious_schedule(Network& net, const std::vector<Message>& batch, std::size_t bound);

// Each source i has a content of k(i) words that it sends to all of its
// destinations; destinations are private to the source. The first round also
// spreads the counts k(i) (or an extra announce round broadcasts them, which
// frees the count bits and allows k(i) > n). After that every node knows the
// count vector and evaluates `passes(k)`, a global upper bound on
// ceil(in-load / n); with c passes the scheme takes 3c rounds (plus one with
// announce), so exactly 3 when c = 1.
struct RoundRobinOptions {
    bool announce = false;
    std::function<std::size_t(const std::vector<std::size_t>&)> passes;
};

struct RoundRobinResult {
    // received[j - 1]: (source, content) for every source that addressed j.
    std::vector<std::vector<std::pair<NodeId, std::vector<Word>>>> received;
    std::vector<std::size_t> counts;
    std::size_t passes = 0;
};

// Largest content word the scheme can carry.
unsigned round_robin_content_bits(const Network& net, bool announce);

RoundRobinResult round_robin_messaging(Network& net, const std::vector<std::vector<Word>>& contents,
                                       const std::vector<std::vector<NodeId>>& destinations,
                                       const RoundRobinOptions& options);

// ceil(sum(k) / n): the pass bound when every node may address every node.
std::size_t passes_for_total(std::size_t n, const std::vector<std::size_t>& k);

// Randomized delivery with no global knowledge: every round a node forwards one
// held message per destination, sends one own message directly to each
// remaining destination, passes surplus held messages to a neighbor whose link
// offset encodes the destination, and hands leftover own messages to random
// idle links. Runs until everything arrived. Payloads are limited to
// relay_payload_bits().
unsigned relay_payload_bits(const Network& net);
Inboxes randomized_delivery(Network& net, const std::vector<Message>& batch, std::uint64_t seed);

// Every node learns the whole edge set (as sorted (u, v), u < v lists).
std::vector<std::vector<Edge>> learn_full_graph(Network& net, const Graph& g);

}  // namespace cclique
