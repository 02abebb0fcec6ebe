#include <doctest.h>

#include <random>

#include "../mock_hierarchy.hpp"
#include "cogh/core/process.hpp"
#include "cogh/nav/scenario.hpp"

using namespace cogh;

namespace {

std::shared_ptr<Hierarchy> chain(int n) {
  auto h = std::make_shared<Hierarchy>(NodeId{0});
  for (int k = 0; k < n; ++k) h->add_node(NodeId{static_cast<std::uint32_t>(k)}, std::make_shared<mock::MockNode>(k));
  for (int k = 1; k < n; ++k)
    h->add_edge(mock::mock_edge(NodeId{static_cast<std::uint32_t>(k - 1)}, NodeId{static_cast<std::uint32_t>(k)}, k));
  return h;
}

}  // namespace

TEST_CASE("a chain of three nodes validates") {
  auto h = chain(3);
  CHECK(validate(*h).ok());
  auto up = topo_up(*h);
  REQUIRE(up);
  CHECK(*up == std::vector<NodeId>{{0}, {1}, {2}});
  auto down = topo_down(*h);
  REQUIRE(down);
  CHECK(*down == std::vector<NodeId>{{2}, {1}, {0}});
}

TEST_CASE("structural violations are reported") {
  SUBCASE("self loop") {
    auto h = chain(2);
    h->add_edge(mock::mock_edge(NodeId{1}, NodeId{1}, 9));
    CHECK(validate(*h).has(ViolationKind::SelfLoop));
  }
  SUBCASE("duplicate edge") {
    auto h = chain(2);
    h->add_edge(mock::mock_edge(NodeId{0}, NodeId{1}, 9));
    CHECK(validate(*h).has(ViolationKind::DuplicateEdge));
  }
  SUBCASE("cycle") {
    auto h = chain(3);
    h->add_edge(mock::mock_edge(NodeId{2}, NodeId{1}, 9));
    CHECK(validate(*h).has(ViolationKind::Cycle));
    CHECK_FALSE(topo_up(*h));
  }
  SUBCASE("unknown endpoint") {
    auto h = chain(2);
    h->add_edge(mock::mock_edge(NodeId{1}, NodeId{7}, 9));
    CHECK(validate(*h).has(ViolationKind::UnknownEndpoint));
  }
  SUBCASE("world with an input") {
    auto h = chain(3);
    h->add_edge(mock::mock_edge(NodeId{2}, NodeId{0}, 9));
    CHECK(validate(*h).has(ViolationKind::WorldHasInput));
  }
  SUBCASE("second source") {
    auto h = chain(2);
    h->add_node(NodeId{5}, std::make_shared<mock::MockNode>(5));
    CHECK(validate(*h).has(ViolationKind::ExtraSource));
  }
  SUBCASE("missing world") {
    Hierarchy h(NodeId{3});
    h.add_node(NodeId{0}, std::make_shared<mock::MockNode>(1));
    CHECK(validate(h).has(ViolationKind::MissingWorld));
  }
  SUBCASE("edge without sensing") {
    auto e = mock::mock_edge(NodeId{0}, NodeId{1}, 3);
    auto h = chain(1);
    h->add_node(NodeId{1}, std::make_shared<mock::MockNode>(1));
    e.sensing = nullptr;
    h->add_edge(e);
    CHECK(validate(*h).has(ViolationKind::MissingSensing));
  }
}

TEST_CASE("incomparable nodes come out in ascending id order") {
  auto h = std::make_shared<Hierarchy>(NodeId{0});
  for (std::uint32_t k : {0u, 4u, 2u}) h->add_node(NodeId{k}, std::make_shared<mock::MockNode>(k));
  h->add_edge(mock::mock_edge(NodeId{0}, NodeId{4}, 1));
  h->add_edge(mock::mock_edge(NodeId{0}, NodeId{2}, 2));
  CHECK(*topo_up(*h) == std::vector<NodeId>{{0}, {2}, {4}});
  CHECK(*topo_down(*h) == std::vector<NodeId>{{2}, {4}, {0}});
}

TEST_CASE("respects_order checks permutations and edge direction") {
  auto h = chain(3);
  const std::vector<NodeId> good{{0}, {1}, {2}}, bad{{1}, {0}, {2}}, short_seq{{0}, {1}};
  CHECK(respects_order(*h, good, false));
  CHECK_FALSE(respects_order(*h, bad, false));
  CHECK_FALSE(respects_order(*h, short_seq, false));
  CHECK(respects_order(*h, std::vector<NodeId>{{2}, {1}, {0}}, true));
}

TEST_CASE("an ordering that violates the graph is refused") {
  auto h = chain(3);
  auto ah = ActiveHierarchy::initial(h);
  REQUIRE(ah);
  PassOrders o{{{1}, {0}, {2}}, {{2}, {1}, {0}}};
  CHECK_FALSE(process_update(*ah, o));
}

TEST_CASE("single-node updates leave other nodes alone") {
  auto h = chain(3);
  auto ah = ActiveHierarchy::initial(h).value();
  for (auto pass : {prediction_update, correction_update, transition_learn_update, utility_update, action_update}) {
    auto next = pass(ah, NodeId{1});
    REQUIRE(next);
    CHECK(next->node(NodeId{0}) == ah.node(NodeId{0}));
    CHECK(next->node(NodeId{2}) == ah.node(NodeId{2}));
  }
}

TEST_CASE("the world node is untouched by the upward passes") {
  auto h = chain(2);
  auto ah = ActiveHierarchy::initial(h).value();
  for (auto pass : {prediction_update, correction_update, transition_learn_update, utility_update}) {
    auto next = pass(ah, NodeId{0});
    REQUIRE(next);
    CHECK(*next == ah);
  }
}

TEST_CASE("process_update does not depend on the chosen valid ordering") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 40; ++k) {
    auto h = mock::random_hierarchy(rng, 6);
    REQUIRE(validate(*h).ok());
    auto start = ActiveHierarchy::initial(h).value();
    auto ref = process_update(process_update(start).value()).value();
    for (int o = 0; o < 3; ++o) {
      auto cur = start;
      for (int c = 0; c < 2; ++c)
        cur = process_update(cur, {mock::random_order(*h, rng, false), mock::random_order(*h, rng, true)}).value();
      CHECK(cur == ref);
    }
  }
}

TEST_CASE("the navigation wiring is valid") {
  auto h = nav::build_wiring(nav::canonical_scenario());
  REQUIRE(h);
  CHECK(validate(**h).ok());
  CHECK((*h)->nodes().size() == 3);
  CHECK((*h)->edges().size() == 2);
}
