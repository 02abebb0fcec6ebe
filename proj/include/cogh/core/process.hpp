#pragma once

#include <functional>
#include <span>

#include "cogh/core/hierarchy.hpp"

namespace cogh {

// Single-node updates. Each returns a hierarchy identical to the input except
// for node `i`. The first four are identities on the world node.
Result<ActiveHierarchy> prediction_update(const ActiveHierarchy& ah, NodeId i);
Result<ActiveHierarchy> correction_update(const ActiveHierarchy& ah, NodeId i);
Result<ActiveHierarchy> transition_learn_update(const ActiveHierarchy& ah, NodeId i);
Result<ActiveHierarchy> utility_update(const ActiveHierarchy& ah, NodeId i);
Result<ActiveHierarchy> action_update(const ActiveHierarchy& ah, NodeId i);

using PassFn = std::function<Result<ActiveHierarchy>(const ActiveHierarchy&, NodeId)>;

// Left fold of `pass` over `sequence`.
Result<ActiveHierarchy> update_pass(const PassFn& pass, const ActiveHierarchy& ah,
                                    std::span<const NodeId> sequence);

// Explicit orderings, used to check that any order respecting the graphs gives
// the same result.
struct PassOrders {
  std::vector<NodeId> up;    // respects the upward graph
  std::vector<NodeId> down;  // respects the downward graph
};

Result<ActiveHierarchy> process_update(const ActiveHierarchy& ah, const PassOrders& orders);

// Prediction (down), correction, transition learning, utility (up), action (down).
Result<ActiveHierarchy> process_update(const ActiveHierarchy& ah);

// Whether `sequence` is a permutation of the hierarchy's nodes in which every
// edge tail precedes its head (upward graph, or downward graph if `downward`).
bool respects_order(const Hierarchy& h, std::span<const NodeId> sequence, bool downward);

}  // namespace cogh
