#pragma once

#include <cstdint>
#include <vector>

#include "cclique/runtime.hpp"

namespace cclique {

struct DetectionResult {
    bool found = false;
    RoundLedger ledger;
    std::size_t n_effective = 0;
    // Nodes whose own local check succeeded, before the final broadcast.
    std::vector<NodeId> reporters;
    // Payload words each node originated; the ledger also counts relay hops.
    std::vector<std::uint64_t> originated;
};

// One round in which every reporter broadcasts a 1-bit flag; returns whether
// anything was heard (every node hears the same thing).
bool announce_found(Network& net, const std::vector<NodeId>& reporters);

}  // namespace cclique
