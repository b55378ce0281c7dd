#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corridor/facts.hpp"
#include "corridor/flow.hpp"
#include "corridor/objective.hpp"
#include "corridor/plan.hpp"
#include "corridor/search.hpp"
#include "corridor/timeline.hpp"

namespace py = pybind11;
using namespace corridor;

namespace {

ParseOptions parse_options(bool decimal_input) {
  ParseOptions options;
  options.decimal_input = decimal_input;
  return options;
}

SignalPlan plan_or_identity(const Instance& instance,
                            const std::optional<std::string>& plan_json) {
  return plan_json ? plan_from_json(instance, *plan_json) : identity_plan(instance);
}

py::dict counters_dict(const std::map<LinkId, Pcu>& counters) {
  py::dict out;
  for (const auto& [id, value] : counters)
    out[py::str(to_string(id))] = value.raw();
  return out;
}

py::dict simulate_dict(const Instance& instance,
                       const std::optional<std::string>& plan_json) {
  Trace trace = simulate(instance, plan_or_identity(instance, plan_json));
  const CorridorState& final_state = trace.final_state();
  py::dict occ;
  for (const auto& [id, value] : final_state.occ)
    occ[py::str(to_string(id))] = value.raw();
  py::dict out;
  out["horizon"] = final_state.t;
  out["final_counters"] = counters_dict(final_state.counter);
  out["final_occupancies"] = occ;
  return out;
}

std::string solve_json(const Instance& instance, const std::string& objective_text,
                       const std::string& mode, const std::string& engine,
                       int beam_width, std::optional<double> timeout,
                       const std::optional<std::string>& bound,
                       const std::optional<std::string>& baseline_facts,
                       bool decimal_input) {
  Instance prepared = instance;
  if (bound) prepared.bound = pcu_from_decimal(*bound);

  Objective objective;
  if (!objective_text.empty()) objective = parse_objective(prepared, objective_text);

  std::optional<std::map<LinkId, Pcu>> baseline;
  if (baseline_facts)
    baseline = parse_baseline(*baseline_facts, prepared, parse_options(decimal_input));

  SearchMode search_mode;
  if (mode == "decision")
    search_mode = SearchMode::kDecision;
  else if (mode == "optimise")
    search_mode = SearchMode::kOptimise;
  else
    throw std::invalid_argument("mode must be 'decision' or 'optimise'");

  SearchProblem problem = make_problem(std::move(prepared), std::move(objective),
                                       search_mode, std::move(baseline), timeout);
  SearchResult result;
  if (engine == "exhaustive")
    result = enumerate_all(problem);
  else if (engine == "bnb")
    result = branch_and_bound(problem);
  else if (engine == "beam")
    result = beam_search(problem, beam_width);
  else
    throw std::invalid_argument("engine must be 'exhaustive', 'bnb' or 'beam'");
  return result_to_json(problem, result);
}

py::dict check_plan_dict(const Instance& instance, const std::string& plan_json) {
  SearchProblem problem = make_problem(instance);
  PlanReport report = check_plan(problem, plan_from_json(instance, plan_json));
  py::list value;
  for (const Pcu& tier : report.value) value.append(tier.raw());
  py::dict out;
  out["legal"] = report.legal;
  out["feasible"] = report.feasible();
  out["bound_satisfied"] = report.bound_satisfied;
  out["bound_failures"] = report.bound_failures;
  out["value"] = value;
  out["final_counters"] = counters_dict(report.final_counters);
  if (report.stability)
    out["stability_violation"] = report.stability->message;
  return out;
}

}  // namespace

PYBIND11_MODULE(_corridor, m) {
  m.doc() = "Signal-plan optimisation: fact-file parsing, simulation and search";

  py::register_exception<fact_error>(m, "FactError", PyExc_ValueError);

  py::class_<Instance>(m, "Instance")
      .def_property_readonly("horizon", [](const Instance& i) { return i.horizon; })
      .def_property_readonly("bound", [](const Instance& i) { return i.bound.raw(); })
      .def_property_readonly("junctions",
                             [](const Instance& i) {
                               std::vector<std::string> ids;
                               for (const Junction& junction : i.junctions)
                                 ids.push_back(junction.id);
                               return ids;
                             })
      .def_property_readonly("links",
                             [](const Instance& i) {
                               std::vector<std::string> ids;
                               for (const Link& link : i.links)
                                 ids.push_back(to_string(link.id));
                               return ids;
                             })
      .def_property_readonly("goal_links",
                             [](const Instance& i) {
                               std::vector<std::string> ids;
                               for (const LinkId& id : i.goal_links())
                                 ids.push_back(to_string(id));
                               return ids;
                             })
      .def(py::self == py::self)
      .def("__repr__", [](const Instance& i) {
        return "Instance(junctions=" + std::to_string(i.junctions.size()) +
               ", links=" + std::to_string(i.links.size()) +
               ", horizon=" + std::to_string(i.horizon) + ")";
      });

  m.def(
      "parse",
      [](const std::string& text, bool decimal_input) {
        return parse_instance(text, parse_options(decimal_input)).instance;
      },
      py::arg("text"), py::arg("decimal_input") = false,
      "Parse a ground-fact instance file into an Instance");

  m.def(
      "parse_with_warnings",
      [](const std::string& text, bool decimal_input) {
        ParseResult result = parse_instance(text, parse_options(decimal_input));
        return std::make_pair(std::move(result.instance), std::move(result.warnings));
      },
      py::arg("text"), py::arg("decimal_input") = false);

  m.def("emit", &emit_facts, py::arg("instance"),
        "Render the instance back into its canonical fact-file form");

  m.def(
      "validate",
      [](const Instance& instance) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const Violation& violation : validate(instance))
          out.emplace_back(violation.code, violation.message);
        return out;
      },
      py::arg("instance"), "Structural violations as (code, message) pairs");

  m.def(
      "decision_points",
      [](const Instance& instance, const std::string& junction_id) {
        const Junction* junction = instance.find_junction(junction_id);
        if (!junction) throw std::invalid_argument("unknown junction " + junction_id);
        std::vector<std::pair<int, int>> out;
        for (const DecisionPoint& point : decision_points(*junction, instance.horizon))
          out.emplace_back(point.cycle_index, point.time);
        return out;
      },
      py::arg("instance"), py::arg("junction"),
      "(cycle_index, time) pairs at which the junction may switch configuration");

  m.def("identity_plan",
        [](const Instance& instance) {
          return plan_to_json(instance, identity_plan(instance));
        },
        py::arg("instance"), "Plan JSON that keeps every initial configuration");

  m.def("simulate", &simulate_dict, py::arg("instance"),
        py::arg("plan_json") = std::nullopt,
        "Run the plan to the horizon; final counters and occupancies as raw "
        "scaled integers");

  m.def(
      "trace_csv",
      [](const Instance& instance, const std::optional<std::string>& plan_json) {
        return trace_to_csv(simulate(instance, plan_or_identity(instance, plan_json)));
      },
      py::arg("instance"), py::arg("plan_json") = std::nullopt,
      "Per-second occupancy/counter CSV of one run");

  m.def("solve", &solve_json, py::arg("instance"), py::arg("objective") = std::string(),
        py::arg("mode") = "optimise", py::arg("engine") = "bnb",
        py::arg("beam_width") = 64, py::arg("timeout") = std::nullopt,
        py::arg("bound") = std::nullopt, py::arg("baseline_facts") = std::nullopt,
        py::arg("decimal_input") = false,
        "Search for a signal plan; returns the result as a JSON string");

  m.def("check_plan", &check_plan_dict, py::arg("instance"), py::arg("plan_json"),
        "Audit one plan: k-legality, bound satisfaction and objective value");
}
