#include "cclique/detection.hpp"

namespace cclique {

bool announce_found(Network& net, const std::vector<NodeId>& reporters) {
    std::vector<std::vector<Envelope>> out(net.size());
    for (NodeId i : reporters) out[i - 1] = broadcast_word(net, i, WordPacker().put(1, 1).word());
    auto in = net.exchange(out);
    // Every node decides the same way; node 1 speaks for all.
    return !in[0].empty();
}

}  // namespace cclique
