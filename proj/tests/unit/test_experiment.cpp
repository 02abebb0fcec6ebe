#include <doctest.h>

#include <set>
#include <sstream>

#include "cogh/experiment/experiment.hpp"

using namespace cogh;
using namespace cogh::experiment;
using grid::RoomId;

namespace {

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("agent names") {
  CHECK(parse_agent("flat") == AgentKind::Flat);
  CHECK(parse_agent("hierarchical") == AgentKind::Hierarchical);
  CHECK_FALSE(parse_agent("both"));
  CHECK(std::string(to_string(AgentKind::Flat)) == "flat");
}

TEST_CASE("run seeds differ per run and are stable") {
  CHECK(run_seed(7, 0) == run_seed(7, 0));
  std::set<std::uint64_t> seen;
  for (int r = 0; r < 50; ++r) seen.insert(run_seed(7, r));
  CHECK(seen.size() == 50);
  CHECK(run_seed(7, 1) != run_seed(8, 1));
}

TEST_CASE("learn produces one row per agent, run and episode") {
  const auto s = nav::canonical_scenario();
  const auto rows = learn(s, {AgentKind::Flat, AgentKind::Hierarchical}, 2, 3, 1);
  REQUIRE(rows.size() == 2 * 2 * 3);
  CHECK(std::is_sorted(rows.begin(), rows.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::make_tuple(std::string(to_string(a.agent)), a.run, a.episode) <
           std::make_tuple(std::string(to_string(b.agent)), b.run, b.episode);
  }));
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (rows[k].agent == rows[k - 1].agent && rows[k].run == rows[k - 1].run)
      CHECK(rows[k].cumulative_steps > rows[k - 1].cumulative_steps);

  const std::string csv = learn_csv(rows);
  CHECK(csv.rfind("agent,run,episode,steps,cumulative_steps\n", 0) == 0);
  CHECK(lines(csv) == 1 + rows.size());

  SUBCASE("deterministic regardless of thread count") {
    CHECK(learn(s, {AgentKind::Flat, AgentKind::Hierarchical}, 2, 3, 2) == rows);
  }
}

TEST_CASE("mean curves and first_within") {
  std::vector<RunRecord> rows;
  for (int run = 0; run < 2; ++run)
    for (int e = 0; e < 3; ++e) rows.push_back({AgentKind::Flat, run, 0, e, static_cast<std::size_t>(10 * (3 - e) + run), 0});
  const auto curves = mean_curves(rows);
  REQUIRE(curves.count(AgentKind::Flat));
  CHECK(curves.at(AgentKind::Flat) == std::vector<double>{30.5, 20.5, 10.5});
  CHECK(first_within({30, 20, 10.5}, 10, 0.1) == 2);
  CHECK(first_within({30, 20, 12}, 10, 0.1) == -1);
  CHECK(first_within({11, 20}, 10, 0.1) == 0);
}

TEST_CASE("room path text") {
  CHECK(room_path({RoomId{4}, RoomId{5}, RoomId{3}}) == "r4-r5-r3");
  CHECK(room_path({}).empty());
}

TEST_CASE("heatmap counts every step once") {
  const auto s = nav::canonical_scenario();
  auto g = heatmap(s, 10, 5);
  REQUIRE(g);
  CHECK(g->trials == 5);
  CHECK(g->sum() == g->total_steps);
  CHECK(g->counts.size() == 5);
  const std::string csv = heatmap_csv(*g);
  CHECK(csv.rfind("room,x,y,count\n", 0) == 0);
  CHECK(lines(csv) == 1 + 5 * static_cast<std::size_t>(g->width * g->height));
}

TEST_CASE("sweep keeps order and duplicates") {
  auto s = nav::canonical_scenario();
  s.max_steps = 300;
  auto rows = sweep(s, {1.0, 0.9, 1.0}, 30, 1);
  REQUIRE(rows);
  REQUIRE(rows->size() == 3);
  CHECK((*rows)[0].p_intended == 1.0);
  CHECK((*rows)[1].p_intended == 0.9);
  CHECK((*rows)[2].p_intended == 1.0);
  CHECK((*rows)[0].rooms == (*rows)[2].rooms);
  CHECK((*rows)[0].expected_steps == (*rows)[2].expected_steps);
  const std::string csv = sweep_csv(*rows);
  CHECK(csv.rfind("p_intended,room_path,expected_steps\n", 0) == 0);
  CHECK(lines(csv) == 4);
}
