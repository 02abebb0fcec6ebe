#include "cogh/experiment/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <thread>
#include <tuple>

namespace cogh::experiment {

const char* to_string(AgentKind k) { return k == AgentKind::Flat ? "flat" : "hierarchical"; }

std::optional<AgentKind> parse_agent(const std::string& s) {
  if (s == "hierarchical") return AgentKind::Hierarchical;
  if (s == "flat") return AgentKind::Flat;
  return std::nullopt;
}

std::uint64_t run_seed(std::uint64_t base, int run) {
  std::uint64_t x = base + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(run) + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

// Runs job(0..n-1) on up to `threads` workers.
void parallel_for(int n, unsigned threads, const std::function<void(int)>& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(n, 1)));
  if (threads <= 1) {
    for (int k = 0; k < n; ++k) job(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int k = next++; k < n; k = next++) job(k);
    });
  for (auto& t : pool) t.join();
}

std::vector<RunRecord> learn_hierarchical(const nav::Scenario& base, int run, int episodes) {
  nav::Scenario s = base;
  s.seed = run_seed(base.seed, run);
  std::vector<RunRecord> out;
  auto built = nav::build_hierarchy(s);
  if (!built) return out;
  ActiveHierarchy ah = std::move(built).value();
  std::uint64_t total = 0;
  for (int e = 0; e < episodes; ++e) {
    auto tr = nav::run_episode(ah, s, s.max_steps, rl::Mode::Learning);
    if (!tr) break;
    total += tr->steps;
    ah = std::move(tr->final);
    auto ev = nav::run_episode(ah, s, s.max_steps, rl::Mode::Evaluation);
    if (!ev) break;
    out.push_back({AgentKind::Hierarchical, run, s.seed, e, ev->steps, total});
  }
  return out;
}

std::vector<RunRecord> learn_flat(const nav::Scenario& s, int run, int episodes) {
  const std::uint64_t seed = run_seed(s.seed, run);
  nav::FlatAgent agent(s.map, s.learner, seed);
  grid::WorldState world;
  world.map = s.map;
  world.rng.seed(run_seed(seed, 1));
  std::vector<RunRecord> out;
  std::uint64_t total = 0;
  for (int e = 0; e < episodes; ++e) {
    total += nav::run_flat_episode(agent, world, s, s.max_steps, rl::Mode::Learning).steps;
    nav::FlatAgent probe = agent;
    grid::WorldState probe_world = world;
    const auto ev = nav::run_flat_episode(probe, probe_world, s, s.max_steps, rl::Mode::Evaluation);
    out.push_back({AgentKind::Flat, run, seed, e, ev.steps, total});
  }
  return out;
}

}  // namespace

std::vector<RunRecord> learn_run(const nav::Scenario& s, AgentKind agent, int run, int episodes) {
  return agent == AgentKind::Flat ? learn_flat(s, run, episodes) : learn_hierarchical(s, run, episodes);
}

std::vector<RunRecord> learn(const nav::Scenario& s, const std::vector<AgentKind>& agents, int runs, int episodes,
                             unsigned threads) {
  const int n = static_cast<int>(agents.size()) * std::max(runs, 0);
  std::vector<std::vector<RunRecord>> parts(static_cast<std::size_t>(n));
  parallel_for(n, threads, [&](int k) {
    parts[static_cast<std::size_t>(k)] = learn_run(s, agents[static_cast<std::size_t>(k / runs)], k % runs, episodes);
  });
  std::vector<RunRecord> rows;
  for (auto& p : parts) rows.insert(rows.end(), p.begin(), p.end());
  std::sort(rows.begin(), rows.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::make_tuple(std::string(to_string(a.agent)), a.run, a.episode) <
           std::make_tuple(std::string(to_string(b.agent)), b.run, b.episode);
  });
  return rows;
}

std::string learn_csv(const std::vector<RunRecord>& rows) {
  std::ostringstream os;
  os << "agent,run,episode,steps,cumulative_steps\n";
  for (const RunRecord& r : rows)
    os << to_string(r.agent) << ',' << r.run << ',' << r.episode << ',' << r.steps << ',' << r.cumulative_steps << '\n';
  return os.str();
}

std::map<AgentKind, std::vector<double>> mean_curves(const std::vector<RunRecord>& rows) {
  std::map<AgentKind, std::vector<double>> sum;
  std::map<AgentKind, std::vector<int>> n;
  for (const RunRecord& r : rows) {
    auto& s = sum[r.agent];
    auto& c = n[r.agent];
    if (static_cast<int>(s.size()) <= r.episode) {
      s.resize(static_cast<std::size_t>(r.episode) + 1, 0.0);
      c.resize(static_cast<std::size_t>(r.episode) + 1, 0);
    }
    s[static_cast<std::size_t>(r.episode)] += static_cast<double>(r.steps);
    ++c[static_cast<std::size_t>(r.episode)];
  }
  for (auto& [k, s] : sum)
    for (std::size_t e = 0; e < s.size(); ++e) s[e] = n[k][e] ? s[e] / n[k][e] : 0.0;
  return sum;
}

int first_within(const std::vector<double>& curve, double optimum, double fraction) {
  for (std::size_t e = 0; e < curve.size(); ++e)
    if (curve[e] <= optimum * (1.0 + fraction)) return static_cast<int>(e);
  return -1;
}

Result<Trained> train(const nav::Scenario& s, int max_episodes, bool exact_episodes) {
  auto built = nav::build_hierarchy(s);
  if (!built) return built.error();
  Trained t{std::move(built).value(), 0, false, std::nullopt};
  std::vector<long long> window;
  for (int e = 0; e < max_episodes; ++e) {
    auto r = nav::run_episode(t.hierarchy, s, s.max_steps, rl::Mode::Learning);
    if (!r) return r.error();
    t.hierarchy = std::move(r->final);
    t.episodes = e + 1;
    auto p = nav::plan_from_start(t.hierarchy, s);
    if (!p) {
      window.clear();
      t.plan_cost.reset();
      continue;
    }
    t.plan_cost = p->total_cost;
    window.push_back(p->total_cost);
    if (static_cast<int>(window.size()) > kConvergenceWindow) window.erase(window.begin());
    t.converged = static_cast<int>(window.size()) == kConvergenceWindow &&
                  std::all_of(window.begin(), window.end(), [&](long long c) { return std::llabs(c - window.front()) <= 1; });
    if (t.converged && !exact_episodes) break;
  }
  return t;
}

Result<PlanReport> plan_after(const nav::Scenario& s, int max_episodes, bool exact_episodes) {
  auto t = train(s, max_episodes, exact_episodes);
  if (!t) return t.error();
  auto p = nav::plan_from_start(t->hierarchy, s);
  if (!p) return p.error();
  return PlanReport{std::move(p).value(), t->episodes, t->converged};
}

std::string room_path(const std::vector<grid::RoomId>& rooms) {
  std::string out;
  for (std::size_t k = 0; k < rooms.size(); ++k) out += (k ? "-" : "") + grid::to_string(rooms[k]);
  return out;
}

std::uint64_t VisitationGrid::at(grid::RoomId r, grid::GridPos p) const {
  auto it = counts.find(r);
  if (it == counts.end() || p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) return 0;
  return it->second[static_cast<std::size_t>(p.y * width + p.x)];
}

std::uint64_t VisitationGrid::sum() const {
  std::uint64_t n = 0;
  for (const auto& [r, c] : counts)
    for (auto v : c) n += v;
  return n;
}

Result<VisitationGrid> heatmap(const nav::Scenario& s, int max_episodes, int trials) {
  auto t = train(s, max_episodes);
  if (!t) return t.error();
  VisitationGrid g;
  g.width = s.map->width();
  g.height = s.map->height();
  for (grid::RoomId r : s.map->room_ids())
    g.counts[r].assign(static_cast<std::size_t>(g.width * g.height), 0);
  ActiveHierarchy ah = std::move(t->hierarchy);
  for (int k = 0; k < trials; ++k) {
    auto ev = nav::run_episode(ah, s, s.max_steps, rl::Mode::Evaluation, {true});
    if (!ev) return ev.error();
    ah = std::move(ev->final);
    ++g.trials;
    if (ev->reached) ++g.reached;
    g.total_steps += ev->steps;
    for (const grid::TrajectoryRow& row : ev->trajectory) {
      if (row.t == 0) continue;  // the start is not an arrival
      auto& c = g.counts[row.location.room];
      ++c[static_cast<std::size_t>(row.location.pos.y * g.width + row.location.pos.x)];
    }
  }
  return g;
}

std::string heatmap_csv(const VisitationGrid& g) {
  std::ostringstream os;
  os << "room,x,y,count\n";
  for (const auto& [r, c] : g.counts)
    for (int y = 0; y < g.height; ++y)
      for (int x = 0; x < g.width; ++x)
        os << grid::to_string(r) << ',' << x << ',' << y << ',' << c[static_cast<std::size_t>(y * g.width + x)] << '\n';
  return os.str();
}

Result<std::vector<SweepRow>> sweep(const nav::Scenario& s, const std::vector<double>& ps, int max_episodes,
                                    unsigned threads) {
  const int n = static_cast<int>(ps.size());
  std::vector<std::optional<Result<PlanReport>>> out(ps.size());
  parallel_for(n, threads, [&](int k) {
    nav::Scenario sk = s;
    sk.motion.p_intended = ps[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(k)] = plan_after(sk, max_episodes);
  });
  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const auto& r = *out[k];
    if (!r) return r.error();
    rows.push_back({ps[k], r->plan.rooms(), r->plan.total_cost, r->converged});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "p_intended,room_path,expected_steps\n";
  for (const SweepRow& r : rows) {
    char p[32];
    std::snprintf(p, sizeof p, "%g", r.p_intended);
    os << p << ',' << room_path(r.rooms) << ',' << r.expected_steps << '\n';
  }
  return os.str();
}

}  // namespace cogh::experiment
