#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "cclique/graph.hpp"

namespace cclique {

// ceil(log2 x) for x >= 1.
unsigned ceil_log2(std::uint64_t x);

// Bits needed for one vertex id in a clique of n nodes (ids are sent as v - 1).
inline unsigned id_bits_for(std::size_t n) { return n <= 2 ? 1u : ceil_log2(n); }
inline unsigned word_bits_for(std::size_t n) { return 2 * id_bits_for(n) + 4; }

// One message unit: `width` meaningful low bits of `bits`.
struct Word {
    std::uint64_t bits = 0;
    std::uint8_t width = 0;

    friend bool operator==(const Word&, const Word&) = default;
};

struct Envelope {
    NodeId src = 0;
    NodeId dst = 0;
    Word payload;
};

// Appends fixed-width fields low to high.
class WordPacker {
public:
    WordPacker& put(std::uint64_t value, unsigned width);
    WordPacker& put_id(NodeId v, unsigned id_bits) { return put(v - 1, id_bits); }
    Word word() const { return {bits_, static_cast<std::uint8_t>(width_)}; }

private:
    std::uint64_t bits_ = 0;
    unsigned width_ = 0;
};

// Reads fields in the order they were packed.
class WordReader {
public:
    explicit WordReader(const Word& w) : w_(w) {}
    std::uint64_t get(unsigned width);
    NodeId get_id(unsigned id_bits) { return static_cast<NodeId>(get(id_bits) + 1); }

private:
    Word w_;
    unsigned pos_ = 0;
};

struct RoundStats {
    std::uint64_t words = 0;       // including self-deliveries
    std::uint64_t link_words = 0;  // src != dst only
    std::uint64_t max_link_use = 0;
};

struct LinkUse {
    NodeId src, dst;
    std::uint32_t count;
};

struct RoundLedger {
    std::size_t rounds = 0;
    std::uint64_t words = 0;
    std::uint64_t link_words = 0;
    std::uint64_t bits_sent = 0;
    std::uint64_t max_link_use = 0;
    std::vector<std::uint64_t> per_node_sent;
    std::vector<std::uint64_t> per_node_received;
    std::vector<std::uint64_t> per_node_link_sent;
    std::vector<std::uint64_t> per_node_link_received;
    std::vector<RoundStats> per_round;
    // Filled only when link recording is enabled.
    std::vector<std::vector<LinkUse>> per_round_link_use;

    explicit RoundLedger(std::size_t n = 0)
        : per_node_sent(n), per_node_received(n), per_node_link_sent(n), per_node_link_received(n) {}

    // Adds a later phase run on another network of the same size.
    void append(const RoundLedger& later);

    friend bool operator==(const RoundLedger& a, const RoundLedger& b);
};

bool operator==(const LinkUse& a, const LinkUse& b);

// Per-node deterministic random stream derived from (seed, node, stream).
std::mt19937_64 node_rng(std::uint64_t seed, NodeId node, std::uint64_t stream = 0);

// The clique: n nodes, one word per ordered pair per round. Every call to
// exchange() is one synchronous round and is charged to the ledger even if
// nothing is sent.
class Network {
public:
    explicit Network(std::size_t n, bool packed = false, bool record_links = false);

    std::size_t size() const { return n_; }
    unsigned id_bits() const { return id_bits_; }
    unsigned word_bits() const { return word_bits_; }
    bool packed() const { return packed_; }

    // outboxes[i] holds the envelopes sent by node i + 1; returns the inboxes,
    // each sorted by source. Throws CapacityViolation or ContractViolation.
    std::vector<std::vector<Envelope>> exchange(const std::vector<std::vector<Envelope>>& outboxes);

    const RoundLedger& ledger() const { return ledger_; }

    // Marks the current round count; rounds_since() gives the rounds spent after it.
    std::size_t mark() const { return ledger_.rounds; }
    std::size_t rounds_since(std::size_t m) const { return ledger_.rounds - m; }

private:
    std::size_t n_;
    unsigned id_bits_, word_bits_;
    bool packed_, record_links_;
    RoundLedger ledger_;
    std::vector<std::uint32_t> stamp_;  // n*n, last round a link was used
    std::vector<std::uint32_t> load_;
};

// Outbox sending w from `src` to every node including itself.
std::vector<Envelope> broadcast_word(const Network& net, NodeId src, const Word& w);

struct StepResult {
    std::vector<Envelope> outbox;
    bool halted = false;
    std::vector<Word> output;  // replaces the node's output when non-empty
};

class NodeProgram {
public:
    virtual ~NodeProgram() = default;
    // Called once per round while the node is running; `round` starts at 1 and
    // the inbox holds everything addressed to this node in the previous round.
    virtual StepResult step(std::size_t round, const std::vector<Envelope>& inbox, std::mt19937_64& rng) = 0;
};

struct RunResult {
    std::vector<std::vector<Word>> outputs;
    RoundLedger ledger;
};

// Lock-step execution of one program per node. Stops once every node has
// halted and no message is in flight; throws NonTermination if that takes more
// than max_rounds rounds.
RunResult run(std::vector<std::unique_ptr<NodeProgram>>& programs, std::size_t max_rounds, std::uint64_t seed = 0,
              bool packed = false);

}  // namespace cclique
