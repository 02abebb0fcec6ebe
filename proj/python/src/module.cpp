// Python bindings: load and validate scenarios, plan, learn, heatmap, sweep.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "cogh/config/scenario_file.hpp"
#include "cogh/core/hierarchy.hpp"
#include "cogh/experiment/experiment.hpp"

namespace py = pybind11;
using namespace cogh;

namespace {

// Raised for files that parse but describe an invalid world or hierarchy.
PyObject* g_validation_error = nullptr;

[[noreturn]] void raise_parse(const config::ParseError& e, const std::string& where) {
  if (e.kind == config::ParseErrorKind::Io) {
    PyErr_SetString(PyExc_OSError, e.message.c_str());
    throw py::error_already_set();
  }
  const std::string msg = where + ":" + e.str();
  if (config::is_validation_error(e.kind)) {
    PyErr_SetString(g_validation_error, msg.c_str());
    throw py::error_already_set();
  }
  throw py::value_error(msg);
}

nav::Scenario load(const std::string& path, std::optional<std::uint64_t> seed) {
  auto doc = config::load_scenario(path);
  if (!doc) raise_parse(doc.error(), path);
  nav::Scenario s = doc->scenario;
  if (seed) s.seed = *seed;
  return s;
}

nav::Scenario from_text(const std::string& text) {
  auto doc = config::parse_scenario(text);
  if (!doc) raise_parse(doc.error(), "<text>");
  return doc->scenario;
}

std::vector<std::string> room_names(const std::vector<grid::RoomId>& rooms) {
  std::vector<std::string> out;
  for (auto r : rooms) out.push_back(grid::to_string(r));
  return out;
}

py::dict validate_file(const std::string& path) {
  const nav::Scenario s = load(path, std::nullopt);
  auto h = nav::build_wiring(s);
  if (!h) {
    PyErr_SetString(g_validation_error, h.error().str().c_str());
    throw py::error_already_set();
  }
  const ValidationReport report = cogh::validate(**h);
  if (!report.ok()) {
    PyErr_SetString(g_validation_error, report.str().c_str());
    throw py::error_already_set();
  }
  py::dict d;
  d["rooms"] = s.map->room_ids().size();
  d["doorways"] = s.map->doorways().size();
  d["nodes"] = (*h)->nodes().size();
  d["edges"] = (*h)->edges().size();
  d["p_intended"] = s.motion.p_intended;
  d["seed"] = s.seed;
  return d;
}

py::dict plan(const std::string& path, int episodes, std::optional<std::uint64_t> seed, bool exact) {
  const nav::Scenario s = load(path, seed);
  Result<experiment::PlanReport> r = [&] {
    py::gil_scoped_release unlocked;
    return experiment::plan_after(s, episodes, exact);
  }();
  if (!r) throw py::value_error(r.error().str());
  py::list steps;
  for (const auto& st : r->plan.steps) steps.append(py::make_tuple(planner::to_string(st.action), st.cost));
  py::dict d;
  d["steps"] = steps;
  d["cost"] = r->plan.total_cost;
  d["rooms"] = room_names(r->plan.rooms());
  d["episodes"] = r->episodes;
  d["converged"] = r->converged;
  d["text"] = planner::plan_text(r->plan);
  return d;
}

std::string learn_csv(const std::string& path, const std::string& agent, int runs, int episodes,
                      std::optional<std::uint64_t> seed) {
  const nav::Scenario s = load(path, seed);
  std::vector<experiment::AgentKind> agents;
  if (agent == "both") {
    agents = {experiment::AgentKind::Flat, experiment::AgentKind::Hierarchical};
  } else if (auto k = experiment::parse_agent(agent)) {
    agents = {*k};
  } else {
    throw py::value_error("agent must be hierarchical, flat or both");
  }
  if (runs < 1 || episodes < 0) throw py::value_error("runs must be >= 1 and episodes >= 0");
  py::gil_scoped_release unlocked;
  return experiment::learn_csv(experiment::learn(s, agents, runs, episodes));
}

std::string heatmap_csv(const std::string& path, int episodes, int trials, std::optional<std::uint64_t> seed) {
  const nav::Scenario s = load(path, seed);
  if (trials < 1) throw py::value_error("trials must be >= 1");
  Result<experiment::VisitationGrid> g = [&] {
    py::gil_scoped_release unlocked;
    return experiment::heatmap(s, episodes, trials);
  }();
  if (!g) throw py::value_error(g.error().str());
  return experiment::heatmap_csv(*g);
}

py::list sweep(const std::string& path, const std::vector<double>& ps, int episodes,
               std::optional<std::uint64_t> seed) {
  const nav::Scenario s = load(path, seed);
  for (double p : ps)
    if (p < 0.0 || p > 1.0) throw py::value_error("p_intended values must lie in [0, 1]");
  auto rows = [&] {
    py::gil_scoped_release unlocked;
    return experiment::sweep(s, ps, episodes);
  }();
  if (!rows) throw py::value_error(rows.error().str());
  py::list out;
  for (const auto& r : *rows) {
    py::dict d;
    d["p_intended"] = r.p_intended;
    d["rooms"] = room_names(r.rooms);
    d["expected_steps"] = r.expected_steps;
    d["converged"] = r.converged;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cognitive hierarchy navigation engine";
  // Module-lifetime type object; never released.
  g_validation_error = PyErr_NewException("cognitive_hierarchy._core.ValidationError", PyExc_ValueError, nullptr);
  m.attr("ValidationError") = py::handle(g_validation_error);

  m.def("canonical_scenario_text", [] { return config::render_scenario(nav::canonical_scenario()); },
        "The built-in five-room scenario as .chs text.");
  m.def(
      "check_text",
      [](const std::string& text) {
        const nav::Scenario s = from_text(text);
        return config::render_scenario(s);
      },
      py::arg("text"), "Parse .chs text and return it re-rendered; raises on errors.");
  m.def("validate", &validate_file, py::arg("path"), "Check a scenario file; returns a summary dict.");
  m.def("plan", &plan, py::arg("path"), py::arg("episodes") = 2000, py::arg("seed") = py::none(),
        py::arg("exact") = false, "Train, then plan from the start.");
  m.def("learn_csv", &learn_csv, py::arg("path"), py::arg("agent") = "both", py::arg("runs") = 10,
        py::arg("episodes") = 2000, py::arg("seed") = py::none(), "Learning curves as CSV text.");
  m.def("heatmap_csv", &heatmap_csv, py::arg("path"), py::arg("episodes") = 2000, py::arg("trials") = 1000,
        py::arg("seed") = py::none(), "Visit counts over evaluation trials as CSV text.");
  m.def("sweep", &sweep, py::arg("path"), py::arg("ps") = std::vector<double>{0.8, 0.4}, py::arg("episodes") = 2000,
        py::arg("seed") = py::none(), "Chosen route per p_intended.");
}
