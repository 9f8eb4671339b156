#include "hybowave/synthetic.hpp"

#include "hybowave/errors.hpp"
#include "hybowave/random.hpp"

#include <string>
#include <vector>

namespace hwn {

Graph hierarchical_benchmark(std::uint64_t seed, const HierarchyOptions& options) {
  if (options.hubs < 1 || options.mids_per_hub < 1 || options.leaves_per_mid < 1) {
    throw ContractViolation("hierarchy sizes must be positive");
  }
  NodeIndex index;
  EdgeList edges;
  std::vector<std::vector<NodeId>> communities(static_cast<std::size_t>(options.hubs));
  std::vector<NodeId> hubs;

  for (int h = 0; h < options.hubs; ++h) {
    const NodeId hub = index.intern("h" + std::to_string(h));
    hubs.push_back(hub);
    auto& members = communities[static_cast<std::size_t>(h)];
    members.push_back(hub);
    for (int m = 0; m < options.mids_per_hub; ++m) {
      const std::string mid_label = std::to_string(h) + "_" + std::to_string(m);
      const NodeId mid = index.intern("m" + mid_label);
      members.push_back(mid);
      edges.push_back(Edge::canonical(hub, mid));
      for (int l = 0; l < options.leaves_per_mid; ++l) {
        const NodeId leaf = index.intern("l" + mid_label + "_" + std::to_string(l));
        members.push_back(leaf);
        edges.push_back(Edge::canonical(mid, leaf));
      }
    }
  }
  if (hubs.size() == 2) {
    edges.push_back(Edge::canonical(hubs[0], hubs[1]));
  } else if (hubs.size() > 2) {
    for (std::size_t i = 0; i < hubs.size(); ++i) edges.push_back(Edge::canonical(hubs[i], hubs[(i + 1) % hubs.size()]));
  }

  const auto n = static_cast<NodeId>(index.size());
  const Graph tree(n, edges);
  Rng rng = Rng::stream(seed, 0x41E2);
  for (const auto& members : communities) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        if (tree.has_edge(members[a], members[b])) continue;
        if (rng.bernoulli(options.intra_probability)) edges.push_back(Edge::canonical(members[a], members[b]));
      }
    }
  }
  return Graph(n, edges, std::move(index));
}

}  // namespace hwn
