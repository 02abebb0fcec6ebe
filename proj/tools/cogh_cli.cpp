// Command-line front end: validate, learn, plan, heatmap, sweep.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cogh/config/scenario_file.hpp"
#include "cogh/core/hierarchy.hpp"
#include "cogh/experiment/experiment.hpp"

namespace {

using namespace cogh;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kIoError = 2;

struct Common {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  int episodes = 2000;
  int runs = 10;
  std::string out;
};

// Loads the scenario; on failure prints the error and sets `code`.
std::optional<nav::Scenario> load(const Common& c, int& code) {
  auto doc = config::load_scenario(c.scenario);
  if (!doc) {
    const auto& e = doc.error();
    if (e.kind == config::ParseErrorKind::Io) std::cerr << "error: " << e.message << '\n';
    else std::cerr << c.scenario << ':' << e.str() << '\n';
    code = config::is_validation_error(e.kind) ? kFailure : kIoError;
    return std::nullopt;
  }
  nav::Scenario s = doc->scenario;
  if (c.seed) s.seed = *c.seed;
  return s;
}

int emit(const Common& c, const std::string& text) {
  if (c.out.empty() || c.out == "-") {
    std::cout << text;
    return kOk;
  }
  std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
  if (!(f << text)) {
    std::cerr << "error: cannot write " << c.out << '\n';
    return kIoError;
  }
  return kOk;
}

int cmd_validate(const Common& c) {
  int code = kOk;
  auto s = load(c, code);
  if (!s) return code;
  auto h = nav::build_wiring(*s);
  if (!h) {
    std::cerr << "invalid: " << h.error().str() << '\n';
    return kFailure;
  }
  const ValidationReport report = validate(**h);
  if (!report.ok()) {
    std::cerr << "invalid hierarchy:\n" << report.str() << '\n';
    return kFailure;
  }
  std::cout << "ok: " << s->map->room_ids().size() << " rooms, " << s->map->doorways().size() << " doorways, "
            << (*h)->nodes().size() << " nodes, " << (*h)->edges().size() << " edges\n";
  return kOk;
}

int cmd_learn(const Common& c, const std::string& agent) {
  int code = kOk;
  auto s = load(c, code);
  if (!s) return code;
  std::vector<experiment::AgentKind> agents;
  if (agent == "both") agents = {experiment::AgentKind::Flat, experiment::AgentKind::Hierarchical};
  else agents = {*experiment::parse_agent(agent)};
  return emit(c, experiment::learn_csv(experiment::learn(*s, agents, c.runs, c.episodes)));
}

int cmd_plan(const Common& c, bool exact) {
  int code = kOk;
  auto s = load(c, code);
  if (!s) return code;
  auto r = experiment::plan_after(*s, c.episodes, exact);
  if (!r) {
    std::cerr << "no plan: " << r.error().str() << '\n';
    return kFailure;
  }
  std::ostringstream os;
  os << planner::plan_text(r->plan) << "rooms:" << experiment::room_path(r->plan.rooms()) << '\n'
     << "episodes:" << r->episodes << (r->converged ? " converged" : " not-converged") << '\n';
  return emit(c, os.str());
}

int cmd_heatmap(const Common& c, int trials) {
  int code = kOk;
  auto s = load(c, code);
  if (!s) return code;
  auto g = experiment::heatmap(*s, c.episodes, trials);
  if (!g) {
    std::cerr << "error: " << g.error().str() << '\n';
    return kFailure;
  }
  return emit(c, experiment::heatmap_csv(*g));
}

int cmd_sweep(const Common& c, const std::vector<double>& ps) {
  int code = kOk;
  auto s = load(c, code);
  if (!s) return code;
  auto rows = experiment::sweep(*s, ps, c.episodes);
  if (!rows) {
    std::cerr << "no plan: " << rows.error().str() << '\n';
    return kFailure;
  }
  return emit(c, experiment::sweep_csv(*rows));
}

void common_flags(CLI::App* sub, Common& c, bool runs) {
  sub->add_option("--scenario", c.scenario, "scenario file (.chs)")->required();
  sub->add_option("--seed", c.seed, "override the scenario seed");
  sub->add_option("--out", c.out, "output file (default stdout)");
  sub->add_option("--episodes", c.episodes, "training episodes (cap when training to convergence)")
      ->check(CLI::NonNegativeNumber);
  if (runs) sub->add_option("--runs", c.runs, "independent runs per agent")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cognitive hierarchy navigation experiments"};
  app.require_subcommand(1);
  Common c;

  auto* validate_cmd = app.add_subcommand("validate", "check a scenario file");
  validate_cmd->add_option("--scenario", c.scenario, "scenario file (.chs)")->required();
  validate_cmd->add_option("--seed", c.seed, "override the scenario seed");

  std::string agent = "both";
  auto* learn_cmd = app.add_subcommand("learn", "learning curves as CSV");
  common_flags(learn_cmd, c, true);
  learn_cmd->add_option("--agent", agent, "hierarchical, flat or both")
      ->check(CLI::IsMember({"hierarchical", "flat", "both"}));

  bool exact = false;
  auto* plan_cmd = app.add_subcommand("plan", "train, then print the planner's plan from the start");
  common_flags(plan_cmd, c, false);
  plan_cmd->add_flag("--exact", exact, "train exactly --episodes episodes instead of stopping at convergence");

  int trials = 1000;
  auto* heat_cmd = app.add_subcommand("heatmap", "visit counts over evaluation trials as CSV");
  common_flags(heat_cmd, c, false);
  heat_cmd->add_option("--trials", trials, "evaluation trials")->check(CLI::PositiveNumber);

  std::vector<double> ps = {0.8, 0.4};
  auto* sweep_cmd = app.add_subcommand("sweep", "chosen route per slip probability as CSV");
  common_flags(sweep_cmd, c, false);
  sweep_cmd->add_option("--p", ps, "p_intended values")->delimiter(',')->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kIoError;
  }

  if (*validate_cmd) return cmd_validate(c);
  if (*learn_cmd) return cmd_learn(c, agent);
  if (*plan_cmd) return cmd_plan(c, exact);
  if (*heat_cmd) return cmd_heatmap(c, trials);
  if (*sweep_cmd) return cmd_sweep(c, ps);
  return kIoError;
}
