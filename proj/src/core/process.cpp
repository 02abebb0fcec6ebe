#include "cogh/core/process.hpp"

#include <map>
#include <set>

namespace cogh {

namespace {

Error unknown_node(NodeId i) { return make_error(ErrorCode::UnknownNode, to_string(i) + " is not in the hierarchy"); }

// C = union of context maps applied to the predicted beliefs of upper neighbours.
ValueSet gather_context(const ActiveHierarchy& ah, NodeId i) {
  ValueSet c;
  for (const FunctionTuple* e : ah.hierarchy().edges_above(i))
    if (e->context) c.merge(e->context(ah.node(e->upper).predicted_belief));
  return c;
}

}  // namespace

Result<ActiveHierarchy> prediction_update(const ActiveHierarchy& ah, NodeId i) {
  if (!ah.contains(i)) return unknown_node(i);
  if (i == ah.hierarchy().world()) return ah;

  const NodeInterface& node = ah.hierarchy().node(i);
  ActiveNode n = ah.node(i);
  const ValueSet context = gather_context(ah, i);
  const Value s = node.transition_apply(n.transition_model, n.current_belief, context,
                                        node.policy_apply(n.policy, n.current_belief));
  n.predicted_belief = s;
  n.corrected_belief = s;
  return ah.with_node(std::move(n));
}

Result<ActiveHierarchy> correction_update(const ActiveHierarchy& ah, NodeId i) {
  if (!ah.contains(i)) return unknown_node(i);
  if (i == ah.hierarchy().world()) return ah;
  const auto below = ah.hierarchy().edges_below(i);
  if (below.empty()) return ah;

  ValueSet observations;
  for (const FunctionTuple* e : below)
    if (e->sensing) observations.merge(e->sensing(ah.node(e->lower).corrected_belief));

  ActiveNode n = ah.node(i);
  n.corrected_belief = ah.hierarchy().node(i).observation_update(n.corrected_belief, observations);
  return ah.with_node(std::move(n));
}

Result<ActiveHierarchy> transition_learn_update(const ActiveHierarchy& ah, NodeId i) {
  if (!ah.contains(i)) return unknown_node(i);
  if (i == ah.hierarchy().world()) return ah;

  const NodeInterface& node = ah.hierarchy().node(i);
  ActiveNode n = ah.node(i);
  const ValueSet context = gather_context(ah, i);
  n.transition_model = node.transition_learn(n.transition_model, n.current_belief, context,
                                             node.policy_apply(n.policy, n.current_belief), n.corrected_belief);
  return ah.with_node(std::move(n));
}

Result<ActiveHierarchy> utility_update(const ActiveHierarchy& ah, NodeId i) {
  if (!ah.contains(i)) return unknown_node(i);
  if (i == ah.hierarchy().world()) return ah;

  ValueSet utilities;
  for (const FunctionTuple* e : ah.hierarchy().edges_below(i))
    if (e->utility) utilities.merge(e->utility(ah.node(e->lower).planning_state));

  ActiveNode n = ah.node(i);
  n.planning_state = ah.hierarchy().node(i).utility_absorb(n.planning_state, utilities);
  return ah.with_node(std::move(n));
}

Result<ActiveHierarchy> action_update(const ActiveHierarchy& ah, NodeId i) {
  if (!ah.contains(i)) return unknown_node(i);

  ValueSet tasks;
  for (const FunctionTuple* e : ah.hierarchy().edges_above(i)) {
    if (!e->task_param) continue;
    const ActiveNode& upper = ah.node(e->upper);
    const NodeInterface& upper_node = ah.hierarchy().node(e->upper);
    tasks.merge(e->task_param(upper_node.policy_apply(upper.policy, upper.current_belief)));
  }

  const NodeInterface& node = ah.hierarchy().node(i);
  ActiveNode n = ah.node(i);
  PlanOutput planned = node.plan(n.policy, n.transition_model, tasks, n.planning_state, n.corrected_belief);
  n.policy = std::move(planned.policy);
  n.planning_state = std::move(planned.planning_state);
  n.current_belief = n.corrected_belief;

  if (i == ah.hierarchy().world()) {
    // The world's state is its belief; acting on it changes all three slots.
    const Value next = node.actuate(n.current_belief, tasks);
    n.current_belief = next;
    n.predicted_belief = next;
    n.corrected_belief = next;
  }
  return ah.with_node(std::move(n));
}

Result<ActiveHierarchy> update_pass(const PassFn& pass, const ActiveHierarchy& ah,
                                    std::span<const NodeId> sequence) {
  ActiveHierarchy current = ah;
  for (NodeId id : sequence) {
    auto next = pass(current, id);
    if (!next) return next.error();
    current = std::move(next).value();
  }
  return current;
}

bool respects_order(const Hierarchy& h, std::span<const NodeId> sequence, bool downward) {
  if (sequence.size() != h.nodes().size()) return false;
  std::map<NodeId, std::size_t> pos;
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    if (!h.contains(sequence[k]) || !pos.emplace(sequence[k], k).second) return false;
  }
  for (const auto& e : h.edges()) {
    const bool up_edge = e.sensing != nullptr;
    const bool down_edge = e.task_param != nullptr;
    if (!downward && up_edge && pos.at(e.lower) > pos.at(e.upper)) return false;
    if (downward && down_edge && pos.at(e.upper) > pos.at(e.lower)) return false;
  }
  return true;
}

Result<ActiveHierarchy> process_update(const ActiveHierarchy& ah, const PassOrders& orders) {
  const auto report = validate(ah.hierarchy());
  if (!report.ok()) return make_error(ErrorCode::InvalidHierarchy, report.str());
  if (!respects_order(ah.hierarchy(), orders.up, false) || !respects_order(ah.hierarchy(), orders.down, true))
    return make_error(ErrorCode::InvalidHierarchy, "pass ordering does not respect the hierarchy graphs");

  static const PassFn kPasses[] = {prediction_update, correction_update, transition_learn_update,
                                   utility_update, action_update};
  const std::span<const NodeId> sequences[] = {orders.down, orders.up, orders.up, orders.up, orders.down};

  ActiveHierarchy current = ah;
  for (std::size_t k = 0; k < 5; ++k) {
    auto next = update_pass(kPasses[k], current, sequences[k]);
    if (!next) return next.error();
    current = std::move(next).value();
  }
  return current;
}

Result<ActiveHierarchy> process_update(const ActiveHierarchy& ah) {
  auto up = topo_up(ah.hierarchy());
  if (!up) return up.error();
  auto down = topo_down(ah.hierarchy());
  if (!down) return down.error();
  return process_update(ah, PassOrders{std::move(up).value(), std::move(down).value()});
}

}  // namespace cogh
