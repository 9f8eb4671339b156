#ifndef HYBOWAVE_SYNTHETIC_HPP
#define HYBOWAVE_SYNTHETIC_HPP

#include "hybowave/graph.hpp"

#include <cstdint>

namespace hwn {

struct HierarchyOptions {
  int hubs = 3;
  int mids_per_hub = 3;
  int leaves_per_mid = 9;
  /// Probability of adding each non-tree pair inside one hub's subtree.
  double intra_probability = 0.1;
};

/// Three-level hierarchy: hubs joined in a cycle (a single edge for two hubs),
/// each hub parenting `mids_per_hub` mid nodes, each mid parenting
/// `leaves_per_mid` leaves, plus random intra-community edges. Labels are
/// h<i>, m<i>_<j> and l<i>_<j>_<k>. Defaults give N = 93.
Graph hierarchical_benchmark(std::uint64_t seed, const HierarchyOptions& options = {});

}  // namespace hwn

#endif  // HYBOWAVE_SYNTHETIC_HPP
