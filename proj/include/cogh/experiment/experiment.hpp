#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cogh/core/result.hpp"
#include "cogh/grid/world.hpp"
#include "cogh/nav/scenario.hpp"
#include "cogh/planner/planner.hpp"

namespace cogh::experiment {

enum class AgentKind { Hierarchical, Flat };

const char* to_string(AgentKind k);
std::optional<AgentKind> parse_agent(const std::string& s);

// Seed of run `run` derived from the scenario seed.
std::uint64_t run_seed(std::uint64_t base, int run);

// One learning-curve point: after training episode `episode`, a greedy
// evaluation episode on a copy of the agent took `steps` world steps.
struct RunRecord {
  AgentKind agent = AgentKind::Hierarchical;
  int run = 0;
  std::uint64_t seed = 0;
  int episode = 0;
  std::size_t steps = 0;
  std::uint64_t cumulative_steps = 0;  // training steps so far, this episode included
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

std::vector<RunRecord> learn_run(const nav::Scenario& s, AgentKind agent, int run, int episodes);

// All runs of every requested agent, sorted by (agent name, run, episode). Runs
// go to `threads` workers (0 = hardware concurrency).
std::vector<RunRecord> learn(const nav::Scenario& s, const std::vector<AgentKind>& agents, int runs, int episodes,
                             unsigned threads = 0);

// Header `agent,run,episode,steps,cumulative_steps`.
std::string learn_csv(const std::vector<RunRecord>& rows);

// Mean evaluation steps per episode over runs, per agent.
std::map<AgentKind, std::vector<double>> mean_curves(const std::vector<RunRecord>& rows);

// First episode whose mean is within `fraction` above `optimum`; -1 if none.
int first_within(const std::vector<double>& curve, double optimum, double fraction);

struct Trained {
  ActiveHierarchy hierarchy;
  int episodes = 0;
  bool converged = false;
  std::optional<long long> plan_cost;  // last plan cost from the start
};

inline constexpr int kConvergenceWindow = 50;

// Trains the hierarchy until the planner's cost from the start has stayed
// within +-1 for kConvergenceWindow consecutive episodes, or `max_episodes`
// have run. With `exact_episodes` it always runs max_episodes.
Result<Trained> train(const nav::Scenario& s, int max_episodes, bool exact_episodes = false);

struct PlanReport {
  planner::Plan plan;
  int episodes = 0;
  bool converged = false;
};

Result<PlanReport> plan_after(const nav::Scenario& s, int max_episodes, bool exact_episodes = false);

std::string room_path(const std::vector<grid::RoomId>& rooms);

// Visit counts of arrival cells over evaluation trials, for every cell of
// every room.
struct VisitationGrid {
  int width = 0;
  int height = 0;
  std::map<grid::RoomId, std::vector<std::uint64_t>> counts;  // row-major
  std::uint64_t total_steps = 0;                              // sum of trajectory lengths
  std::size_t trials = 0;
  std::size_t reached = 0;

  std::uint64_t at(grid::RoomId r, grid::GridPos p) const;
  std::uint64_t sum() const;
};

Result<VisitationGrid> heatmap(const nav::Scenario& s, int max_episodes, int trials);

// Header `room,x,y,count`.
std::string heatmap_csv(const VisitationGrid& g);

struct SweepRow {
  double p_intended = 0;
  std::vector<grid::RoomId> rooms;
  long long expected_steps = 0;  // plan cost under the learned costs
  bool converged = false;
};

// One row per entry of `ps`, duplicates included, in input order.
Result<std::vector<SweepRow>> sweep(const nav::Scenario& s, const std::vector<double>& ps, int max_episodes,
                                    unsigned threads = 0);

// Header `p_intended,room_path,expected_steps`.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace cogh::experiment
