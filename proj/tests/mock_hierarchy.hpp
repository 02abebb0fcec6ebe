// Seeded mock nodes over integer values, and random valid hierarchies built
// from them, for order-invariance checks.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <vector>

#include "cogh/core/hierarchy.hpp"
#include "cogh/core/process.hpp"

namespace mock {

using cogh::NodeId;
using cogh::Value;
using cogh::ValueSet;

inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t num(const Value& v) { return v.holds<std::uint64_t>() ? v.as<std::uint64_t>() : 7; }

// Order-independent digest of a set.
inline std::uint64_t digest(const ValueSet& s) {
  std::uint64_t sum = 0x51ed2701ULL, x = 0;
  for (const Value& v : s) {
    sum += mix(num(v));
    x ^= mix(num(v) + 1);
  }
  return mix(sum ^ (x << 1) ^ s.size());
}

inline Value val(std::uint64_t x) { return Value::of(x); }

class MockNode final : public cogh::NodeInterface {
 public:
  explicit MockNode(std::uint64_t salt) : salt_(salt) {}
  std::string name() const override { return "mock"; }

  Value observation_update(const Value& b, const ValueSet& obs) const override {
    return val(mix(num(b) * 3 + digest(obs) + salt_));
  }
  Value transition_apply(const Value& model, const Value& b, const ValueSet& ctx, const ValueSet& acts) const override {
    return val(mix(num(model) ^ mix(num(b) + 11) ^ mix(digest(ctx) + 13) ^ mix(digest(acts) + 17) ^ salt_));
  }
  Value transition_learn(const Value& model, const Value& before, const ValueSet& ctx, const ValueSet& acts,
                         const Value& after) const override {
    return val(mix(num(model) + mix(num(before)) * 5 + digest(ctx) * 7 + digest(acts) * 11 + num(after) + salt_));
  }
  Value utility_absorb(const Value& ps, const ValueSet& utils) const override {
    return val(mix(num(ps) * 19 + digest(utils) + salt_));
  }
  cogh::PlanOutput plan(const Value& policy, const Value& model, const ValueSet& tasks, const Value& ps,
                        const Value& b) const override {
    const std::uint64_t h = mix(num(policy) ^ mix(num(model) + 1) ^ mix(digest(tasks) + 2) ^ mix(num(ps) + 3) ^
                                mix(num(b) + 4) ^ salt_);
    return {val(h), val(mix(h + num(ps)))};
  }
  ValueSet policy_apply(const Value& policy, const Value& b) const override {
    const std::uint64_t h = mix(num(policy) * 23 + num(b));
    ValueSet out;
    for (std::uint64_t k = 0; k <= h % 3; ++k) out.insert(val(mix(h + k)));
    return out;
  }
  Value actuate(const Value& b, const ValueSet& commands) const override {
    return val(mix(num(b) * 29 + digest(commands) + salt_));
  }
  Value initial_belief() const override { return val(mix(salt_ + 100)); }
  Value initial_policy() const override { return val(mix(salt_ + 200)); }
  Value initial_transition_model() const override { return val(mix(salt_ + 300)); }
  Value initial_planning_state() const override { return val(mix(salt_ + 400)); }

 private:
  std::uint64_t salt_;
};

inline cogh::FunctionTuple mock_edge(NodeId lower, NodeId upper, std::uint64_t salt) {
  cogh::FunctionTuple e;
  e.lower = lower;
  e.upper = upper;
  e.sensing = [salt](const Value& b) { return ValueSet{val(mix(num(b) + salt)), val(mix(num(b) + salt + 1))}; };
  e.context = [salt](const Value& b) { return ValueSet{val(mix(num(b) ^ salt))}; };
  e.utility = [salt](const Value& ps) { return ValueSet{val(mix(num(ps) * 3 + salt))}; };
  e.task_param = [salt](const ValueSet& acts) {
    ValueSet out;
    for (const Value& a : acts) out.insert(val(mix(num(a) + salt) % 5));
    return out;
  };
  return e;
}

// A random valid hierarchy with 2..max_nodes nodes. Node ids are shuffled so
// that the world is not always id 0 and ids do not follow the layering.
inline std::shared_ptr<const cogh::Hierarchy> random_hierarchy(std::mt19937_64& rng, int max_nodes = 6) {
  const int n = std::uniform_int_distribution<int>(2, max_nodes)(rng);
  std::vector<std::uint32_t> ids(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) ids[static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(k * 3 + 1);
  std::shuffle(ids.begin(), ids.end(), rng);
  // Rank k in `ids` is the k-th node in a topological order; rank 0 is the world.
  auto h = std::make_shared<cogh::Hierarchy>(NodeId{ids[0]});
  for (std::uint32_t id : ids) h->add_node(NodeId{id}, std::make_shared<const MockNode>(mix(id + rng() % 1000)));
  std::bernoulli_distribution extra(0.4);
  for (int k = 1; k < n; ++k) {
    const int must = std::uniform_int_distribution<int>(0, k - 1)(rng);
    for (int j = 0; j < k; ++j)
      if (j == must || extra(rng))
        h->add_edge(mock_edge(NodeId{ids[static_cast<std::size_t>(j)]}, NodeId{ids[static_cast<std::size_t>(k)]}, rng()));
  }
  return h;
}

// A random topological order of the upward graph (or of the downward graph).
inline std::vector<NodeId> random_order(const cogh::Hierarchy& h, std::mt19937_64& rng, bool downward) {
  std::map<NodeId, int> indeg;
  for (const auto& [id, _] : h.nodes()) indeg[id] = 0;
  for (const auto& e : h.edges()) ++indeg[downward ? e.lower : e.upper];
  std::vector<NodeId> ready, out;
  for (const auto& [id, d] : indeg)
    if (d == 0) ready.push_back(id);
  while (!ready.empty()) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(rng);
    const NodeId id = ready[k];
    ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(k));
    out.push_back(id);
    for (const auto& e : h.edges()) {
      const NodeId from = downward ? e.upper : e.lower;
      const NodeId to = downward ? e.lower : e.upper;
      if (from == id && --indeg[to] == 0) ready.push_back(to);
    }
  }
  return out;
}

}  // namespace mock
